// Workbench assembly: three panels over one shared session state that
// round-trips through the URL hash.

import { ApiClient, LatestWins, ServiceError, debounce } from "./api.js";
import { DataPanel } from "./datapanel.js";
import { ParameterExplorer } from "./explorer.js";
import { CellHit, RegionHeatmap } from "./heatmap.js";
import { fullPrecision, paramDisplay } from "./format.js";
import { SessionState, decodeHash, encodeHash } from "./state.js";

const api = new ApiClient("");
const state: SessionState = decodeHash(window.location.hash);
const gridRequests = new LatestWins();

function pushState(): void {
  history.replaceState(null, "", `#${encodeHash(state)}`);
}

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

const explorer = new ParameterExplorer(el("explorer"), api, state, pushState);

const hoverInfo = el<HTMLElement>("heatmap-hover");
const heatmap = new RegionHeatmap(
  el<HTMLCanvasElement>("heatmap-canvas"),
  (hit: CellHit | null) => {
    if (!hit) {
      hoverInfo.textContent = "hover a cell";
      return;
    }
    hoverInfo.textContent =
      `RR_UY|S=1 = ${paramDisplay(hit.rrUy)}, RR_TU|S=1 = ${paramDisplay(hit.rrTu)}` +
      ` -> BF_U = ${paramDisplay(hit.bound)} (${hit.verdict.replace("_", " ")})`;
    hoverInfo.title = fullPrecision(hit.bound);
  },
  (hit: CellHit) => {
    // the what-if loop: a clicked cell becomes the explorer's input
    explorer.setParameters(hit.rrUy, hit.rrTu);
  },
);

const gridBanner = el<HTMLElement>("heatmap-banner");

async function refreshGrid(): Promise<void> {
  if (state.p0 === null) {
    gridBanner.hidden = false;
    gridBanner.textContent = "enter P(Y=1|T=0,I_S=1) in the explorer to draw the region map";
    return;
  }
  const { uyMin, uyMax, tuMin, tuMax, steps } = state.grid;
  try {
    const grid = await gridRequests.run("grid", () =>
      api.sharpnessGrid({
        uy_min: uyMin,
        uy_max: uyMax,
        uy_steps: steps,
        tu_min: tuMin,
        tu_max: tuMax,
        tu_steps: steps,
        p0: state.p0,
        af: state.af ?? undefined,
      }),
    );
    if (grid === null) {
      return;
    }
    gridBanner.hidden = true;
    heatmap.render(grid);
    el<HTMLElement>("heatmap-legend").textContent =
      `sharp limit 1/p0 = ${paramDisplay(grid.sharp_limit)}` +
      (grid.af_bound != null ? `, AF bound = ${paramDisplay(grid.af_bound)}` : "");
  } catch (error) {
    gridBanner.hidden = false;
    gridBanner.textContent =
      error instanceof ServiceError ? error.detail.message : "service unreachable";
  }
}

const refreshGridDebounced = debounce(() => void refreshGrid(), 250);

function bindGridControls(): void {
  const fields: Array<[string, keyof SessionState["grid"]]> = [
    ["grid-uy-min", "uyMin"],
    ["grid-uy-max", "uyMax"],
    ["grid-tu-min", "tuMin"],
    ["grid-tu-max", "tuMax"],
    ["grid-steps", "steps"],
  ];
  for (const [id, key] of fields) {
    const input = el<HTMLInputElement>(id);
    input.value = String(state.grid[key]);
    input.addEventListener("input", () => {
      const value = Number(input.value);
      if (Number.isFinite(value) && value > 0) {
        state.grid[key] = value;
        pushState();
        refreshGridDebounced();
      }
    });
  }
}

new DataPanel(el("datapanel"), api);

bindGridControls();
void refreshGrid();

// re-draw the region map when explorer edits change p0 or the AF bound
let lastGridKey = "";
window.setInterval(() => {
  const key = `${state.p0}|${state.af}|${JSON.stringify(state.grid)}`;
  if (key !== lastGridKey) {
    lastGridKey = key;
    refreshGridDebounced();
  }
}, 300);

void api.health().then((healthy) => {
  const banner = el<HTMLElement>("health-banner");
  banner.hidden = healthy;
});
