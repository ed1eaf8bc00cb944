// Session state lives entirely client-side and round-trips through the
// URL hash so an analysis view can be shared as a link.

export interface GridConfig {
  uyMin: number;
  uyMax: number;
  tuMin: number;
  tuMax: number;
  steps: number;
}

export interface SessionState {
  estimand: "RR_sub" | "RD_sub";
  rrUy: number;
  rrTu: number;
  p0: number | null;
  p1: number | null;
  af: number | null;
  grid: GridConfig;
}

export const DEFAULT_STATE: SessionState = {
  estimand: "RR_sub",
  rrUy: 2.71,
  rrTu: 2.33,
  p0: 0.27,
  p1: null,
  af: 3.5,
  grid: { uyMin: 1, uyMax: 12, tuMin: 1, tuMax: 12, steps: 60 },
};

const REQUIRED_KEYS = ["rrUy", "rrTu"] as const;
const OPTIONAL_KEYS = ["p0", "p1", "af"] as const;
const GRID_KEYS = ["uyMin", "uyMax", "tuMin", "tuMax", "steps"] as const;

export function encodeHash(state: SessionState): string {
  const params = new URLSearchParams();
  params.set("est", state.estimand);
  for (const key of REQUIRED_KEYS) {
    params.set(key, String(state[key]));
  }
  for (const key of OPTIONAL_KEYS) {
    const value = state[key];
    // an empty value encodes an intentionally cleared field, which must
    // survive the round trip even when the default is non-null
    params.set(key, value !== null && Number.isFinite(value) ? String(value) : "");
  }
  for (const key of GRID_KEYS) {
    params.set(`g_${key}`, String(state.grid[key]));
  }
  return params.toString();
}

export function decodeHash(hash: string): SessionState {
  const clean = hash.startsWith("#") ? hash.slice(1) : hash;
  const params = new URLSearchParams(clean);
  const state: SessionState = {
    ...DEFAULT_STATE,
    grid: { ...DEFAULT_STATE.grid },
  };
  const est = params.get("est");
  if (est === "RR_sub" || est === "RD_sub") {
    state.estimand = est;
  }
  for (const key of REQUIRED_KEYS) {
    const raw = params.get(key);
    if (raw === null || raw === "") {
      continue;
    }
    const value = Number(raw);
    if (Number.isFinite(value)) {
      state[key] = value;
    }
  }
  for (const key of OPTIONAL_KEYS) {
    const raw = params.get(key);
    if (raw === null) {
      continue;
    }
    if (raw === "") {
      state[key] = null;
      continue;
    }
    const value = Number(raw);
    if (Number.isFinite(value)) {
      state[key] = value;
    }
  }
  for (const key of GRID_KEYS) {
    const raw = params.get(`g_${key}`);
    if (raw === null) {
      continue;
    }
    const value = Number(raw);
    if (Number.isFinite(value) && value > 0) {
      state.grid[key] = value;
    }
  }
  return state;
}
