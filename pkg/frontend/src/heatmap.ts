// Sharpness-region heatmap on a plain canvas. Cells are shaded by bound
// value within their verdict's hue; contours appear where neighbouring
// cells change verdict (the sharp-limit frontier and, when an AF bound is
// supplied, the non-sharp frontier).

import { GridResult } from "./api.js";

export type VerdictName = "sharp" | "inconclusive" | "not_sharp";

export interface CellHit {
  row: number;
  col: number;
  rrUy: number;
  rrTu: number;
  bound: number;
  verdict: VerdictName;
}

export interface GridGeometry {
  width: number;
  height: number;
  rows: number;
  cols: number;
}

// rows run along the outcome axis (vertical, top = last), columns along
// the treatment axis (horizontal)
export function cellAt(
  x: number,
  y: number,
  geometry: GridGeometry,
): { row: number; col: number } | null {
  if (x < 0 || y < 0 || x >= geometry.width || y >= geometry.height) {
    return null;
  }
  const col = Math.floor((x / geometry.width) * geometry.cols);
  const rowFromTop = Math.floor((y / geometry.height) * geometry.rows);
  const row = geometry.rows - 1 - rowFromTop;
  if (row < 0 || row >= geometry.rows || col < 0 || col >= geometry.cols) {
    return null;
  }
  return { row, col };
}

const VERDICT_HUE: Record<VerdictName, number> = {
  sharp: 145, // green
  inconclusive: 42, // amber
  not_sharp: 4, // red
};

export function verdictColor(
  verdict: VerdictName,
  bound: number,
  maxBound: number,
): string {
  const hue = VERDICT_HUE[verdict];
  const range = maxBound > 1 ? (bound - 1) / (maxBound - 1) : 0;
  const clamped = Math.max(0, Math.min(1, range));
  const lightness = 82 - 40 * clamped;
  return `hsl(${hue}, 62%, ${lightness.toFixed(1)}%)`;
}

export class RegionHeatmap {
  private grid: GridResult | null = null;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly onHover: (hit: CellHit | null) => void,
    private readonly onSelect: (hit: CellHit) => void,
  ) {
    canvas.addEventListener("mousemove", (event) => {
      this.onHover(this.hit(event));
    });
    canvas.addEventListener("mouseleave", () => this.onHover(null));
    canvas.addEventListener("click", (event) => {
      const hit = this.hit(event);
      if (hit) {
        this.onSelect(hit);
      }
    });
  }

  private geometry(): GridGeometry | null {
    if (!this.grid) {
      return null;
    }
    return {
      width: this.canvas.width,
      height: this.canvas.height,
      rows: this.grid.uy_axis.length,
      cols: this.grid.tu_axis.length,
    };
  }

  private hit(event: MouseEvent): CellHit | null {
    const geometry = this.geometry();
    if (!geometry || !this.grid) {
      return null;
    }
    const rect = this.canvas.getBoundingClientRect();
    const x = ((event.clientX - rect.left) / rect.width) * this.canvas.width;
    const y = ((event.clientY - rect.top) / rect.height) * this.canvas.height;
    const cell = cellAt(x, y, geometry);
    if (!cell) {
      return null;
    }
    return {
      row: cell.row,
      col: cell.col,
      rrUy: this.grid.uy_axis[cell.row],
      rrTu: this.grid.tu_axis[cell.col],
      bound: this.grid.bounds[cell.row][cell.col],
      verdict: this.grid.verdicts[cell.row][cell.col] as VerdictName,
    };
  }

  render(grid: GridResult): void {
    this.grid = grid;
    const ctx = this.canvas.getContext("2d");
    if (!ctx) {
      return;
    }
    const rows = grid.uy_axis.length;
    const cols = grid.tu_axis.length;
    const cw = this.canvas.width / cols;
    const ch = this.canvas.height / rows;
    const maxBound = Math.max(...grid.bounds.map((row) => Math.max(...row)));

    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    for (let i = 0; i < rows; i++) {
      for (let j = 0; j < cols; j++) {
        ctx.fillStyle = verdictColor(
          grid.verdicts[i][j] as VerdictName,
          grid.bounds[i][j],
          maxBound,
        );
        const x = j * cw;
        const y = (rows - 1 - i) * ch;
        ctx.fillRect(x, y, Math.ceil(cw), Math.ceil(ch));
      }
    }

    // frontier contours: edges between cells with different verdicts
    ctx.strokeStyle = "#1e3a5f";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    for (let i = 0; i < rows; i++) {
      for (let j = 0; j < cols; j++) {
        const here = grid.verdicts[i][j];
        if (j + 1 < cols && grid.verdicts[i][j + 1] !== here) {
          const x = (j + 1) * cw;
          const y = (rows - 1 - i) * ch;
          ctx.moveTo(x, y);
          ctx.lineTo(x, y + ch);
        }
        if (i + 1 < rows && grid.verdicts[i + 1][j] !== here) {
          const x = j * cw;
          const y = (rows - 1 - i) * ch;
          ctx.moveTo(x, y);
          ctx.lineTo(x + cw, y);
        }
      }
    }
    ctx.stroke();
  }
}
