/** Typed client for the retrieval engine's JSON gateway.
 *
 * Mirrors the wire shapes one-to-one; no client-side reshaping beyond
 * parsing. Error bodies are {"error": code, "message": text} and are
 * surfaced as ApiError so callers can show the code verbatim.
 */

export interface Breakdown {
  concept: number;
  text: number;
  pref: number;
  pher: number;
}

export interface Keyframe {
  shot: number;
  frame: number;
  hist: number[];
}

export interface ResultRow {
  doc_id: string;
  score: number;
  tier: string;
  breakdown: Breakdown;
  storyboard: Keyframe[];
}

export interface StageP {
  name: string;
  p: number;
}

export interface Performance {
  stages: StageP[];
  p_global: number;
}

export interface QueryResponse {
  results: ResultRow[];
  performance: Performance;
}

export interface Suggestion {
  text: string;
  source: "history" | "predictive";
}

export interface StatsResponse {
  counts: Record<string, number>;
  total: number;
  mean_tau: Record<string, number>;
  performance: Performance | null;
}

export interface FeedbackResponse {
  ok: { tau: number };
}

export interface ShotDict {
  start_idx: number;
  end_idx: number;
  keyframe_idx: number;
  keyframe_hist: number[] | null;
}

export interface RecordDict {
  doc_id: string;
  title: string;
  media_info: Record<string, string>;
  shots: ShotDict[];
  text_terms: string[];
  meta: Record<string, string>;
  concepts: [string, number][];
}

export interface DocResponse {
  record: RecordDict;
  tier: string;
  tau: number;
  storyboard: Keyframe[];
}

/** code is the service's error code ("UnknownUser", ...) or
 *  "NetworkError" when no response arrived at all. */
export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.status = status;
  }
}

async function parseOrThrow<T>(res: Response): Promise<T> {
  let body: unknown;
  try {
    body = await res.json();
  } catch {
    throw new ApiError("NetworkError", "response was not JSON", res.status);
  }
  if (!res.ok) {
    const err = body as { error?: string; message?: string };
    throw new ApiError(err.error ?? "NetworkError",
                       err.message ?? `HTTP ${res.status}`, res.status);
  }
  return body as T;
}

/** Everything the UI needs from the service; tests supply fakes. */
export interface ApiLike {
  query(user: string, domain: string, text: string, k: number): Promise<QueryResponse>;
  feedback(user: string, doc: string, rating: number): Promise<FeedbackResponse>;
  suggestions(user: string, domain: string, k: number): Promise<Suggestion[]>;
  stats(): Promise<StatsResponse>;
  doc(docId: string): Promise<DocResponse>;
}

export class ApiClient implements ApiLike {
  constructor(private readonly base: string = "") {}

  private async get<T>(path: string): Promise<T> {
    let res: Response;
    try {
      res = await fetch(this.base + path);
    } catch (exc) {
      throw new ApiError("NetworkError", String(exc), 0);
    }
    return parseOrThrow<T>(res);
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    let res: Response;
    try {
      res = await fetch(this.base + path, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (exc) {
      throw new ApiError("NetworkError", String(exc), 0);
    }
    return parseOrThrow<T>(res);
  }

  query(user: string, domain: string, text: string, k: number): Promise<QueryResponse> {
    return this.post<QueryResponse>("/api/query", { user, domain, text, k });
  }

  feedback(user: string, doc: string, rating: number): Promise<FeedbackResponse> {
    return this.post<FeedbackResponse>("/api/feedback", { user, doc, rating });
  }

  suggestions(user: string, domain: string, k: number): Promise<Suggestion[]> {
    const q = new URLSearchParams({ user, domain, k: String(k) });
    return this.get<Suggestion[]>(`/api/suggestions?${q}`);
  }

  stats(): Promise<StatsResponse> {
    return this.get<StatsResponse>("/api/stats");
  }

  doc(docId: string): Promise<DocResponse> {
    return this.get<DocResponse>(`/api/doc/${encodeURIComponent(docId)}`);
  }
}
