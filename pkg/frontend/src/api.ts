// Typed client for the bounds service. The UI never computes a bound
// itself: every displayed number is a verbatim service response.

export interface ApiErrorDetail {
  code: string;
  message: string;
  field?: string | null;
}

export class ServiceError extends Error {
  constructor(readonly status: number, readonly detail: ApiErrorDetail) {
    super(detail.message);
    this.name = "ServiceError";
  }
}

export interface BoundResult {
  estimand: string;
  value: number;
  components: Record<string, number>;
  inputs: Record<string, unknown>;
}

export interface SharpnessResult {
  verdict: "sharp" | "inconclusive" | "not_sharp";
  message: string;
  reason: string;
  sharp_limit: number;
  sv_bound?: number;
  af_bound?: number;
}

export interface GridResult {
  uy_axis: number[];
  tu_axis: number[];
  bounds: number[][];
  verdicts: string[][];
  sharp_limit: number;
  af_bound: number | null;
}

export interface ModelParamsResult {
  BF_U?: number;
  BF_1?: number;
  BF_0?: number;
  reverse_treatment: boolean;
  estimand: string;
  causal_value: number;
  observed_value: number;
  note?: string;
  [key: string]: unknown;
}

export interface SummaryResult {
  stage: number;
  n_rows: number;
  n_selected: number;
  proportions: Record<string, { t0: number; t1: number; overall: number }>;
  observed: Record<string, number>;
}

interface Envelope<T> {
  ok: boolean;
  result?: T;
  error?: ApiErrorDetail;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    let payload: Envelope<T>;
    try {
      payload = (await response.json()) as Envelope<T>;
    } catch {
      throw new ServiceError(response.status, {
        code: "bad_response",
        message: `service returned unparseable response (${response.status})`,
      });
    }
    if (!response.ok || !payload.ok || payload.result === undefined) {
      throw new ServiceError(
        response.status,
        payload.error ?? { code: "unknown", message: `request failed (${response.status})` },
      );
    }
    return payload.result;
  }

  svBound(body: Record<string, unknown>): Promise<BoundResult> {
    return this.post("/api/sv-bound", body);
  }

  svParams(body: Record<string, unknown>): Promise<ModelParamsResult> {
    return this.post("/api/sv-params", body);
  }

  sharp(body: Record<string, unknown>): Promise<SharpnessResult> {
    return this.post("/api/sharp", body);
  }

  sharpnessGrid(body: Record<string, unknown>): Promise<GridResult> {
    return this.post("/api/sharpness-grid", body);
  }

  afBound(body: Record<string, unknown>): Promise<BoundResult> {
    return this.post("/api/af-bound", body);
  }

  summarize(body: Record<string, unknown>): Promise<SummaryResult> {
    return this.post("/api/summarize", body);
  }

  async health(): Promise<boolean> {
    try {
      const response = await fetch(this.baseUrl + "/api/health");
      return response.ok;
    } catch {
      return false;
    }
  }
}

// In-flight coordination: when edits outpace responses, only the newest
// request per key may surface its result (stale ones resolve to null).
export class LatestWins {
  private readonly seq = new Map<string, number>();

  async run<T>(key: string, task: () => Promise<T>): Promise<T | null> {
    const id = (this.seq.get(key) ?? 0) + 1;
    this.seq.set(key, id);
    try {
      const result = await task();
      return this.seq.get(key) === id ? result : null;
    } catch (error) {
      if (this.seq.get(key) === id) {
        throw error;
      }
      return null;
    }
  }
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) {
      clearTimeout(timer);
    }
    timer = setTimeout(() => fn(...args), waitMs);
  };
}
