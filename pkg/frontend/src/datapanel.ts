// Data panel: upload a register CSV, read off the assumption-free bound
// and the stagewise proportion table. Treatment reversal is an explicit
// analyst toggle, mirroring the convention that bounds apply to a
// positively oriented bias.

import { ApiClient, ServiceError, SummaryResult } from "./api.js";
import { boundDisplay, fullPrecision, percentDisplay } from "./format.js";

export class DataPanel {
  private csvText: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {
    this.renderSkeleton();
    this.bind();
  }

  private renderSkeleton(): void {
    this.root.innerHTML = `
      <h2>Data panel</h2>
      <div class="field-grid">
        <label>Register CSV
          <input id="dp-file" type="file" accept=".csv,text/csv">
        </label>
        <label>Estimand
          <select id="dp-estimand">
            <option value="RR_sub">relative risk (subpopulation)</option>
            <option value="RD_sub">risk difference (subpopulation)</option>
            <option value="RR_tot">relative risk (total)</option>
            <option value="RD_tot">risk difference (total)</option>
          </select>
        </label>
        <label>Outcome column <input id="dp-outcome" value="mic_ceph"></label>
        <label>Treatment column <input id="dp-treatment" value="zika"></label>
        <label>Selection column <input id="dp-selection" value="sel_ind"></label>
        <label class="checkbox-label">
          <input id="dp-reverse" type="checkbox" checked> reverse treatment coding
        </label>
      </div>
      <div class="banner" id="dp-banner" hidden></div>
      <div class="result-row">
        <div class="result-card">
          <div class="result-label">AF bound</div>
          <div class="result-value" id="dp-bound">&ndash;</div>
        </div>
      </div>
      <div id="dp-summary"></div>
    `;
  }

  private el<T extends HTMLElement>(id: string): T {
    return this.root.querySelector(`#${id}`) as T;
  }

  private bind(): void {
    this.el<HTMLInputElement>("dp-file").addEventListener("change", (event) => {
      const input = event.target as HTMLInputElement;
      const file = input.files?.[0];
      if (!file) {
        return;
      }
      const reader = new FileReader();
      reader.onload = () => {
        this.csvText = String(reader.result ?? "");
        void this.update();
      };
      reader.readAsText(file);
    });
    for (const id of ["dp-estimand", "dp-outcome", "dp-treatment", "dp-selection", "dp-reverse"]) {
      this.el(id).addEventListener("change", () => void this.update());
    }
  }

  private banner(message: string | null): void {
    const el = this.el<HTMLElement>("dp-banner");
    el.hidden = message === null;
    el.textContent = message ?? "";
  }

  async update(): Promise<void> {
    if (this.csvText === null) {
      return;
    }
    this.banner(null);
    if (this.csvText.trim() === "") {
      this.banner("uploaded file is empty");
      return;
    }
    const estimand = this.el<HTMLSelectElement>("dp-estimand").value;
    try {
      const bound = await this.api.afBound({
        estimand,
        csv: this.csvText,
        outcome_col: this.el<HTMLInputElement>("dp-outcome").value,
        treatment_col: this.el<HTMLInputElement>("dp-treatment").value,
        selection_col: this.el<HTMLInputElement>("dp-selection").value,
        reverse_treatment: this.el<HTMLInputElement>("dp-reverse").checked,
      });
      const display = this.el<HTMLElement>("dp-bound");
      display.textContent = boundDisplay(bound.value);
      display.title = fullPrecision(bound.value);
    } catch (error) {
      this.el<HTMLElement>("dp-bound").textContent = "–";
      this.banner(
        error instanceof ServiceError ? error.detail.message : "service unreachable",
      );
      return;
    }
    // the proportion table needs the canonical register schema; skip it
    // quietly for ad-hoc column names
    try {
      const summary = await this.api.summarize({ csv: this.csvText });
      this.renderSummary(summary);
    } catch {
      this.el<HTMLElement>("dp-summary").innerHTML = "";
    }
  }

  private renderSummary(summary: SummaryResult): void {
    const rows = Object.entries(summary.proportions)
      .map(
        ([name, cells]) => `
          <tr>
            <td>${name}</td>
            <td title="${fullPrecision(cells.t0)}">${percentDisplay(cells.t0)}</td>
            <td title="${fullPrecision(cells.t1)}">${percentDisplay(cells.t1)}</td>
            <td title="${fullPrecision(cells.overall)}">${percentDisplay(cells.overall)}</td>
          </tr>`,
      )
      .join("");
    this.el<HTMLElement>("dp-summary").innerHTML = `
      <table class="summary-table">
        <caption>${summary.n_selected} of ${summary.n_rows} rows selected (stage ${summary.stage})</caption>
        <thead><tr><th>variable</th><th>T = 0</th><th>T = 1</th><th>overall</th></tr></thead>
        <tbody>${rows}</tbody>
      </table>
    `;
  }
}
