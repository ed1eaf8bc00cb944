// Round trip against the real bounds service: the workbench's client and
// formatting must reproduce the published workflow numbers verbatim.

import { spawn, spawnSync } from "node:child_process";
import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { badgeClassFor, boundDisplay, paramDisplay } from "../src/format.js";
import { DEFAULT_STATE, decodeHash, encodeHash } from "../src/state.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const FIXTURE = path.resolve(here, "../../src/selbounds/data/zika_learner.csv");
const PYTHON = process.env.SELBOUNDS_PYTHON ?? "python3";

const serviceAvailable =
  spawnSync(PYTHON, ["-c", "import selbounds.service"], { timeout: 30_000 }).status === 0;

describe.skipIf(!serviceAvailable)("workbench round trip against the live service", () => {
  let child: ReturnType<typeof spawn>;
  let api: ApiClient;

  beforeAll(async () => {
    child = spawn(PYTHON, ["-c", "from selbounds.service import serve; serve(port=0)"], {
      stdio: ["ignore", "pipe", "pipe"],
    });
    const base = await new Promise<string>((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("service did not start")), 20_000);
      let buffer = "";
      child.stdout!.on("data", (chunk: Buffer) => {
        buffer += chunk.toString();
        const match = /listening on (http:\/\/[\d.]+:\d+)/.exec(buffer);
        if (match) {
          clearTimeout(timer);
          resolve(match[1]);
        }
      });
      child.on("exit", () => reject(new Error("service exited early")));
    });
    api = new ApiClient(base);
  }, 30_000);

  afterAll(() => {
    child?.kill();
  });

  it("reproduces the published bound and badge from the explorer inputs", async () => {
    const bound = await api.svBound({
      estimand: "RR_sub",
      rr_uy_s1: DEFAULT_STATE.rrUy,
      rr_tu_s1: DEFAULT_STATE.rrTu,
    });
    expect(boundDisplay(bound.value)).toBe("1.56");

    const verdict = await api.sharp({
      bf_u: Number(boundDisplay(bound.value)),
      p0: DEFAULT_STATE.p0,
      sv: Number(boundDisplay(bound.value)),
      af: DEFAULT_STATE.af,
    });
    expect(verdict.verdict).toBe("sharp");
    expect(badgeClassFor(verdict.verdict)).toBe("badge badge-sharp");
  }, 15_000);

  it("model extraction fills the explorer with the published parameters", async () => {
    const model = {
      Vval: [[1, 0.85], [0, 0.15]],
      Uval: [[1, 0.5], [0, 0.5]],
      Tcoef: [-6.2, 1.75],
      Ycoef: [-5.2, 5.0, -1.0],
      Scoef: [
        [1.2, 0.0, 2.0, -4.0],
        [2.2, 0.5, -2.75, 0.0],
      ],
      Mmodel: "L",
    };
    const params = await api.svParams({
      estimand: "RR_sub",
      model,
      pY1_T1_S1: 0.286,
      pY1_T0_S1: 0.004,
    });
    expect(params.reverse_treatment).toBe(true);
    expect(paramDisplay(params["RR_UY|S=1"] as number)).toBe("2.7089");
    expect(paramDisplay(params["RR_TU|S=1"] as number)).toBe("2.3293");
    expect(paramDisplay(params.BF_U as number)).toBe("1.5625");
  }, 15_000);

  it("renders both frontier contours for the published single-selection inputs", async () => {
    // close-up strip along the outcome axis with the treatment parameter
    // effectively unconstrained, so the bound tracks the axis finely
    const p0 = 1 / 3.667;
    const af = 3.669;
    const grid = await api.sharpnessGrid({
      uy_axis: Array.from({ length: 61 }, (_, i) => 3.66 + i * (0.02 / 60)),
      tu_axis: [1e6],
      p0,
      af,
    });
    expect(grid.sharp_limit).toBeCloseTo(3.667, 5);
    const seen = new Set<string>();
    for (let i = 0; i < grid.uy_axis.length; i++) {
      const bound = grid.bounds[i][0];
      const verdict = grid.verdicts[i][0];
      seen.add(verdict);
      if (bound <= grid.sharp_limit) {
        expect(verdict).toBe("sharp");
      } else if (bound > af) {
        expect(verdict).toBe("not_sharp");
      } else {
        expect(verdict).toBe("inconclusive");
      }
    }
    // all three regions visible: the two contours are distinct and ordered
    expect(seen).toEqual(new Set(["sharp", "inconclusive", "not_sharp"]));
  }, 15_000);

  it("caps oversized grids with a banner-worthy message", async () => {
    await expect(
      api.sharpnessGrid({
        uy_min: 1, uy_max: 5, uy_steps: 501,
        tu_min: 1, tu_max: 5, tu_steps: 10,
        p0: 0.27,
      }),
    ).rejects.toMatchObject({ status: 422 });
  }, 15_000);

  it("shows 3.50 for the frozen register upload with the reversal toggle on", async () => {
    const csv = readFileSync(FIXTURE, "utf-8");
    const bound = await api.afBound({
      estimand: "RR_sub",
      csv,
      outcome_col: "mic_ceph",
      treatment_col: "zika",
      selection_col: "sel_ind",
      reverse_treatment: true,
    });
    expect(boundDisplay(bound.value)).toBe("3.50");

    // toggling the reversal off changes the bound (different orientation)
    const unreversed = await api.afBound({
      estimand: "RR_sub",
      csv,
      outcome_col: "mic_ceph",
      treatment_col: "zika",
      selection_col: "sel_ind",
      reverse_treatment: false,
    });
    expect(unreversed.value).not.toBe(bound.value);

    const summary = await api.summarize({ csv, stage: 2 });
    expect(summary.n_rows).toBe(5000);
    expect(summary.proportions.mic_ceph.t1).toBeGreaterThan(0);
  }, 20_000);

  it("hash state restore reproduces identical displayed results", async () => {
    const state = { ...DEFAULT_STATE, rrUy: 2.71, rrTu: 2.33 };
    const restored = decodeHash(`#${encodeHash(state)}`);
    expect(restored).toEqual(state);
    const [first, second] = await Promise.all([
      api.svBound({ estimand: state.estimand, rr_uy_s1: state.rrUy, rr_tu_s1: state.rrTu }),
      api.svBound({
        estimand: restored.estimand,
        rr_uy_s1: restored.rrUy,
        rr_tu_s1: restored.rrTu,
      }),
    ]);
    expect(boundDisplay(first.value)).toBe(boundDisplay(second.value));
    expect(first.value).toBe(second.value);
  }, 15_000);
});
