import { afterEach, describe, expect, it, vi } from "vitest";
import { ApiClient, ApiError } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient", () => {
  it("posts queries as JSON and returns the payload untouched", async () => {
    const payload = { results: [], performance: { stages: [], p_global: 1.0 } };
    const fetchSpy = vi.fn(async () => jsonResponse(payload));
    vi.stubGlobal("fetch", fetchSpy);

    const got = await new ApiClient().query("ana", "sports", "footy", 5);
    expect(got).toEqual(payload);

    const [url, init] = fetchSpy.mock.calls[0] as [string, RequestInit];
    expect(url).toBe("/api/query");
    expect(init.method).toBe("POST");
    expect((init.headers as Record<string, string>)["content-type"])
      .toBe("application/json");
    expect(JSON.parse(init.body as string))
      .toEqual({ user: "ana", domain: "sports", text: "footy", k: 5 });
  });

  it("prefixes a configured base URL", async () => {
    const fetchSpy = vi.fn(async () => jsonResponse({ counts: {}, total: 0, mean_tau: {}, performance: null }));
    vi.stubGlobal("fetch", fetchSpy);

    await new ApiClient("http://10.0.0.7:8971").stats();
    expect(fetchSpy.mock.calls[0][0]).toBe("http://10.0.0.7:8971/api/stats");
  });

  it("sends feedback and unwraps nothing", async () => {
    const fetchSpy = vi.fn(async () => jsonResponse({ ok: { tau: 2.0 } }));
    vi.stubGlobal("fetch", fetchSpy);

    const ack = await new ApiClient().feedback("ana", "sports-000", 5);
    expect(ack.ok.tau).toBe(2.0);
    expect(JSON.parse((fetchSpy.mock.calls[0][1] as RequestInit).body as string))
      .toEqual({ user: "ana", doc: "sports-000", rating: 5 });
  });

  it("encodes suggestion query params", async () => {
    const fetchSpy = vi.fn(async () => jsonResponse([]));
    vi.stubGlobal("fetch", fetchSpy);

    await new ApiClient().suggestions("u v", "sports", 3);
    expect(fetchSpy.mock.calls[0][0])
      .toBe("/api/suggestions?user=u+v&domain=sports&k=3");
  });

  it("encodes document ids in the path", async () => {
    const fetchSpy = vi.fn(async () =>
      jsonResponse({ record: {}, tier: "usual", tau: 1.0, storyboard: [] }));
    vi.stubGlobal("fetch", fetchSpy);

    await new ApiClient().doc("a/b c");
    expect(fetchSpy.mock.calls[0][0]).toBe("/api/doc/a%2Fb%20c");
  });

  it("maps error bodies to ApiError with the service code", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      jsonResponse({ error: "UnknownUser", message: "no such user 'bo'" }, 404)));

    const err = await new ApiClient().stats().catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).code).toBe("UnknownUser");
    expect((err as ApiError).status).toBe(404);
    expect((err as ApiError).message).toContain("bo");
  });

  it("treats non-JSON replies as a network error", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      new Response("<html>gateway timeout</html>", { status: 504 })));

    const err = await new ApiClient().stats().catch((e: unknown) => e);
    expect((err as ApiError).code).toBe("NetworkError");
    expect((err as ApiError).status).toBe(504);
  });

  it("wraps fetch rejections with status 0", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => {
      throw new TypeError("fetch failed");
    }));

    const err = await new ApiClient().query("a", "d", "t", 1).catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).code).toBe("NetworkError");
    expect((err as ApiError).status).toBe(0);
  });
});
