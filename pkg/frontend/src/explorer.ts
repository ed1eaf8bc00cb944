// Parameter explorer: live bound + sharpness verdict while the analyst
// edits sensitivity parameters (or derives them from a model spec).

import { ApiClient, LatestWins, ServiceError, debounce } from "./api.js";
import { badgeClassFor, boundDisplay, fullPrecision, paramDisplay } from "./format.js";
import { SessionState } from "./state.js";

export class ParameterExplorer {
  private readonly latest = new LatestWins();
  private readonly refresh = debounce(() => void this.update(), 250);

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly state: SessionState,
    private readonly onStateChange: () => void,
  ) {
    this.renderSkeleton();
    this.bindInputs();
    this.syncInputs();
    void this.update();
  }

  private renderSkeleton(): void {
    this.root.innerHTML = `
      <h2>Parameter explorer</h2>
      <div class="field-grid">
        <label>Estimand
          <select id="ex-estimand">
            <option value="RR_sub">relative risk (subpopulation)</option>
            <option value="RD_sub">risk difference (subpopulation)</option>
          </select>
        </label>
        <label>RR<sub>UY|S=1</sub>
          <input id="ex-rr-uy" type="number" step="0.01" min="1">
          <span class="field-error" id="ex-rr-uy-error"></span>
        </label>
        <label>RR<sub>TU|S=1</sub>
          <input id="ex-rr-tu" type="number" step="0.01" min="1">
          <span class="field-error" id="ex-rr-tu-error"></span>
        </label>
        <label>P(Y=1|T=0,I<sub>S</sub>=1)
          <input id="ex-p0" type="number" step="0.01" min="0" max="1">
          <span class="field-error" id="ex-p0-error"></span>
        </label>
        <label id="ex-p1-wrap" hidden>P(Y=1|T=1,I<sub>S</sub>=1)
          <input id="ex-p1" type="number" step="0.01" min="0" max="1">
          <span class="field-error" id="ex-p1-error"></span>
        </label>
        <label>AF bound (optional)
          <input id="ex-af" type="number" step="0.01" min="0">
          <span class="field-error" id="ex-af-error"></span>
        </label>
      </div>
      <div class="result-row">
        <div class="result-card">
          <div class="result-label">SV bound</div>
          <div class="result-value" id="ex-bound">&ndash;</div>
        </div>
        <div class="result-card">
          <div class="result-label">BF<sub>U</sub></div>
          <div class="result-value" id="ex-bfu">&ndash;</div>
        </div>
        <div class="result-card">
          <div class="result-label">Sharpness</div>
          <div id="ex-badge" class="badge">&ndash;</div>
          <div class="reason" id="ex-reason"></div>
        </div>
      </div>
      <details class="model-box">
        <summary>Derive parameters from a model spec</summary>
        <p class="hint">Paste a model JSON (Vval/Uval/Tcoef/Ycoef/Scoef/Mmodel) and the
        observed success probabilities; the service extracts the parameters and
        orients the treatment.</p>
        <textarea id="ex-model" rows="6" spellcheck="false"></textarea>
        <div class="field-grid">
          <label>P(Y=1|T=1,I<sub>S</sub>=1) <input id="ex-model-p1" type="number" step="0.001" min="0" max="1" value="0.286"></label>
          <label>P(Y=1|T=0,I<sub>S</sub>=1) <input id="ex-model-p0" type="number" step="0.001" min="0" max="1" value="0.004"></label>
        </div>
        <button id="ex-model-apply">Extract parameters</button>
        <span class="field-error" id="ex-model-error"></span>
        <span class="hint" id="ex-model-note"></span>
      </details>
    `;
  }

  private input(id: string): HTMLInputElement {
    return this.root.querySelector(`#${id}`) as HTMLInputElement;
  }

  private setText(id: string, text: string, title?: string): void {
    const el = this.root.querySelector(`#${id}`) as HTMLElement;
    el.textContent = text;
    if (title !== undefined) {
      el.title = title;
    }
  }

  private bindInputs(): void {
    const estimand = this.root.querySelector("#ex-estimand") as HTMLSelectElement;
    estimand.addEventListener("change", () => {
      this.state.estimand = estimand.value as SessionState["estimand"];
      this.togglePanels();
      this.onStateChange();
      this.refresh();
    });
    const numeric: Array<[string, keyof SessionState]> = [
      ["ex-rr-uy", "rrUy"],
      ["ex-rr-tu", "rrTu"],
      ["ex-p0", "p0"],
      ["ex-p1", "p1"],
      ["ex-af", "af"],
    ];
    for (const [id, key] of numeric) {
      this.input(id).addEventListener("input", () => {
        const raw = this.input(id).value;
        const value = raw === "" ? null : Number(raw);
        if (value === null || Number.isFinite(value)) {
          (this.state as unknown as Record<string, number | null>)[key] = value;
          this.onStateChange();
          this.refresh();
        }
      });
    }
    const apply = this.root.querySelector("#ex-model-apply") as HTMLButtonElement;
    apply.addEventListener("click", () => void this.applyModel());
  }

  private togglePanels(): void {
    const p1wrap = this.root.querySelector("#ex-p1-wrap") as HTMLElement;
    p1wrap.hidden = this.state.estimand !== "RD_sub";
  }

  syncInputs(): void {
    (this.root.querySelector("#ex-estimand") as HTMLSelectElement).value = this.state.estimand;
    this.input("ex-rr-uy").value = String(this.state.rrUy);
    this.input("ex-rr-tu").value = String(this.state.rrTu);
    this.input("ex-p0").value = this.state.p0 === null ? "" : String(this.state.p0);
    this.input("ex-p1").value = this.state.p1 === null ? "" : String(this.state.p1);
    this.input("ex-af").value = this.state.af === null ? "" : String(this.state.af);
    this.togglePanels();
  }

  setParameters(rrUy: number, rrTu: number): void {
    this.state.rrUy = rrUy;
    this.state.rrTu = rrTu;
    this.syncInputs();
    this.onStateChange();
    void this.update();
  }

  private clearErrors(): void {
    for (const el of this.root.querySelectorAll(".field-error")) {
      el.textContent = "";
    }
  }

  private showError(error: unknown): void {
    if (error instanceof ServiceError) {
      const field = error.detail.field ?? "";
      const target = {
        rr_uy_s1: "ex-rr-uy-error",
        rr_tu_s1: "ex-rr-tu-error",
        p0: "ex-p0-error",
        pY1_T0_S1: "ex-p0-error",
        pY1_T1_S1: "ex-p1-error",
        bf_u: "ex-rr-uy-error",
      }[field];
      const message = error.detail.message;
      if (target) {
        this.setText(target, message);
        return;
      }
      this.setText("ex-reason", message);
    } else {
      this.setText("ex-reason", "service unreachable");
    }
  }

  async update(): Promise<void> {
    this.clearErrors();
    const { estimand, rrUy, rrTu, p0, p1, af } = this.state;
    const body: Record<string, unknown> = {
      estimand,
      rr_uy_s1: rrUy,
      rr_tu_s1: rrTu,
    };
    if (estimand === "RD_sub") {
      body.pY1_T1_S1 = p1;
      body.pY1_T0_S1 = p0;
    }
    try {
      const bound = await this.latest.run("bound", () => this.api.svBound(body));
      if (bound === null) {
        return; // superseded by a newer edit
      }
      const bfu = bound.components["BF_U"];
      this.setText("ex-bound", boundDisplay(bound.value), fullPrecision(bound.value));
      this.setText("ex-bfu", paramDisplay(bfu), fullPrecision(bfu));
      if (p0 === null) {
        this.setBadge(null, "enter P(Y=1|T=0,I_S=1) for a verdict");
        return;
      }
      const verdict = await this.latest.run("sharp", () =>
        this.api.sharp({
          bf_u: bfu,
          p0,
          sv: bound.value,
          af: af ?? undefined,
          estimand,
        }),
      );
      if (verdict !== null) {
        this.setBadge(verdict.verdict, verdict.reason);
      }
    } catch (error) {
      this.setText("ex-bound", "–");
      this.setText("ex-bfu", "–");
      this.setBadge(null, "");
      this.showError(error);
    }
  }

  private setBadge(verdict: string | null, reason: string): void {
    const badge = this.root.querySelector("#ex-badge") as HTMLElement;
    if (verdict === null) {
      badge.className = "badge";
      badge.textContent = "–";
    } else {
      badge.className = badgeClassFor(verdict);
      badge.textContent = verdict.replace("_", " ");
    }
    this.setText("ex-reason", reason);
  }

  private async applyModel(): Promise<void> {
    this.setText("ex-model-error", "");
    this.setText("ex-model-note", "");
    const textarea = this.root.querySelector("#ex-model") as HTMLTextAreaElement;
    let model: unknown;
    try {
      model = JSON.parse(textarea.value);
    } catch {
      this.setText("ex-model-error", "not valid JSON");
      return;
    }
    try {
      const result = await this.api.svParams({
        estimand: this.state.estimand,
        model,
        pY1_T1_S1: Number(this.input("ex-model-p1").value),
        pY1_T0_S1: Number(this.input("ex-model-p0").value),
      });
      const rrUy = result["RR_UY|S=1"] as number;
      const rrTu = result["RR_TU|S=1"] as number;
      this.setParameters(rrUy, rrTu);
      const reversed = result.reverse_treatment ? "treatment reversed" : "treatment kept";
      this.setText("ex-model-note", `${reversed}; ${result.note ?? ""}`);
    } catch (error) {
      if (error instanceof ServiceError) {
        this.setText("ex-model-error", error.detail.message);
      } else {
        this.setText("ex-model-error", "service unreachable");
      }
    }
  }
}
