import { vi } from "vitest";
import type {
  ApiLike, QueryResponse, ResultRow, StatsResponse, Suggestion,
} from "../src/api.js";

export function row(docId: string, score: number, tier = "usual"): ResultRow {
  return {
    doc_id: docId,
    score,
    tier,
    breakdown: { concept: 0.8, text: 0.4, pref: 0.1, pher: 0.5 },
    storyboard: [
      { shot: 0, frame: 3, hist: [0.5, 0.25, 0.25, 0, 0, 0] },
      { shot: 1, frame: 9, hist: [0, 0, 0.5, 0.5, 0, 0] },
    ],
  };
}

export function queryPayload(rows: ResultRow[], pGlobal = 0.72): QueryResponse {
  return {
    results: rows,
    performance: {
      stages: [
        { name: "enrich", p: 1.0 },
        { name: "map", p: 0.9 },
        { name: "retrieve", p: 0.8 },
        { name: "feedback", p: 1.0 },
      ],
      p_global: pGlobal,
    },
  };
}

export function statsPayload(): StatsResponse {
  return {
    counts: { active: 2, usual: 5, depreciated: 1 },
    total: 8,
    mean_tau: { active: 2.1, usual: 1.0, depreciated: 0.1 },
    performance: null,
  };
}

export const CHIPS: Suggestion[] = [
  { text: "cycling tour", source: "history" },
  { text: "Football", source: "predictive" },
];

/** fake service where every method is a spy with a sensible default */
export function makeApi(overrides: Partial<ApiLike> = {}): ApiLike {
  return {
    query: vi.fn(async () => queryPayload([row("d1", 0.9), row("d2", 0.5)])),
    feedback: vi.fn(async () => ({ ok: { tau: 2.6 } })),
    suggestions: vi.fn(async () => CHIPS),
    stats: vi.fn(async () => statsPayload()),
    doc: vi.fn(async () => {
      throw new Error("unused");
    }),
    ...overrides,
  };
}

export function deferred<T>() {
  let resolve!: (value: T) => void;
  let reject!: (reason?: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

export async function flush(): Promise<void> {
  // drain the microtask queue a few layers deep
  for (let i = 0; i < 8; i += 1) await Promise.resolve();
}
