import { compact, type Series } from "./data.js";

export interface ChartOptions {
  xLabel: string;
  yLabel: string;
  logY: boolean;
  width?: number;
  height?: number;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const MARGIN = { top: 16, right: 16, bottom: 44, left: 64 };

type Scale = (v: number) => number;

function linearScale(lo: number, hi: number, out0: number, out1: number): Scale {
  const span = hi - lo || 1;
  return (v) => out0 + ((v - lo) / span) * (out1 - out0);
}

function logScale(lo: number, hi: number, out0: number, out1: number): Scale {
  if (lo <= 0 || hi <= 0) {
    throw new Error(`log axis needs positive values, got [${lo}, ${hi}]`);
  }
  const inner = linearScale(Math.log10(lo), Math.log10(hi), out0, out1);
  return (v) => inner(Math.log10(v));
}

function linearTicks(lo: number, hi: number, n = 5): number[] {
  const ticks: number[] = [];
  for (let i = 0; i < n; i++) {
    ticks.push(lo + ((hi - lo) * i) / (n - 1));
  }
  return ticks;
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let d = Math.ceil(Math.log10(lo) - 1e-9); d <= Math.floor(Math.log10(hi) + 1e-9); d++) {
    ticks.push(10 ** d);
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

const fmt = (v: number) => compact(v);
const px = (v: number) => (Math.round(v * 100) / 100).toString();

function extent(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}

/** Render line series to a standalone SVG string. Pure and deterministic. */
export function renderChart(series: Series[], opts: ChartOptions): string {
  if (series.length === 0 || series.every((s) => s.points.length === 0)) {
    throw new Error("nothing to plot: no series points");
  }
  const width = opts.width ?? 640;
  const height = opts.height ?? 420;
  const x0 = MARGIN.left;
  const x1 = width - MARGIN.right;
  const y0 = height - MARGIN.bottom;
  const y1 = MARGIN.top;

  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ys = series.flatMap((s) => s.points.map((p) => p.y));
  const [xLo, xHi] = extent(xs);
  const [yLo, yHi] = extent(ys);
  const sx = linearScale(xLo, xHi, x0, x1);
  const sy = opts.logY ? logScale(yLo, yHi, y0, y1) : linearScale(yLo, yHi, y0, y1);

  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif" font-size="11">`
  );
  out.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  out.push(
    `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#333"/>`
  );

  for (const t of linearTicks(xLo, xHi)) {
    const x = px(sx(t));
    out.push(`<line x1="${x}" y1="${y0}" x2="${x}" y2="${y0 + 4}" stroke="#333"/>`);
    out.push(`<text x="${x}" y="${y0 + 16}" text-anchor="middle">${fmt(t)}</text>`);
  }
  const yTicks = opts.logY ? decadeTicks(yLo, yHi) : linearTicks(yLo, yHi);
  for (const t of yTicks) {
    const y = px(sy(t));
    out.push(`<line x1="${x0 - 4}" y1="${y}" x2="${x0}" y2="${y}" stroke="#333"/>`);
    out.push(`<text x="${x0 - 7}" y="${y}" dy="0.32em" text-anchor="end">${fmt(t)}</text>`);
  }
  out.push(
    `<text x="${px((x0 + x1) / 2)}" y="${height - 8}" text-anchor="middle">${opts.xLabel}</text>`
  );
  out.push(
    `<text x="14" y="${px((y0 + y1) / 2)}" text-anchor="middle" ` +
      `transform="rotate(-90 14 ${px((y0 + y1) / 2)})">${opts.yLabel}</text>`
  );

  let curveIndex = 0;
  for (const s of series) {
    const d = s.points
      .map((p, i) => `${i === 0 ? "M" : "L"}${px(sx(p.x))} ${px(sy(p.y))}`)
      .join(" ");
    if (s.role === "reference") {
      out.push(
        `<path class="series reference" d="${d}" fill="none" stroke="#555" ` +
          `stroke-width="1.5" stroke-dasharray="6 4"/>`
      );
    } else {
      const color = PALETTE[curveIndex % PALETTE.length];
      curveIndex += 1;
      out.push(
        `<path class="series curve" d="${d}" fill="none" stroke="${color}" stroke-width="1.8"/>`
      );
    }
  }

  out.push(...legend(series, x1 - 190, y1 + 10));
  out.push("</svg>");
  return out.join("\n");
}

function legend(series: Series[], x: number, y: number): string[] {
  const out: string[] = [];
  let curveIndex = 0;
  series.forEach((s, i) => {
    const yy = y + 16 * i;
    let stroke = "#555";
    let dash = ` stroke-dasharray="6 4"`;
    if (s.role !== "reference") {
      stroke = PALETTE[curveIndex % PALETTE.length];
      curveIndex += 1;
      dash = "";
    }
    out.push(
      `<line x1="${x}" y1="${yy}" x2="${x + 22}" y2="${yy}" stroke="${stroke}" stroke-width="1.8"${dash}/>`
    );
    out.push(`<text x="${x + 28}" y="${yy}" dy="0.32em">${s.label}</text>`);
  });
  return out;
}

/** Render a small grid of labeled cells (first row shaded) to SVG. */
export function renderGrid(grid: string[][]): string {
  if (grid.length === 0 || grid[0].length === 0) {
    throw new Error("nothing to render: empty grid");
  }
  const cellH = 26;
  const pad = 10;
  const widths = grid[0].map((_, col) =>
    Math.max(...grid.map((row) => (row[col] ?? "").length)) * 7.2 + 2 * pad
  );
  const totalW = widths.reduce((a, b) => a + b, 0);
  const totalH = grid.length * cellH;

  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${px(totalW + 2)}" height="${totalH + 2}" ` +
      `viewBox="0 0 ${px(totalW + 2)} ${totalH + 2}" font-family="Helvetica, Arial, sans-serif" font-size="12">`
  );
  grid.forEach((row, r) => {
    let x = 1;
    row.forEach((cell, c) => {
      const w = widths[c];
      const fill = r === 0 ? "#eee" : "white";
      out.push(
        `<rect x="${px(x)}" y="${1 + r * cellH}" width="${px(w)}" height="${cellH}" ` +
          `fill="${fill}" stroke="#333"/>`
      );
      out.push(
        `<text x="${px(x + w / 2)}" y="${1 + r * cellH + cellH / 2}" dy="0.32em" ` +
          `text-anchor="middle">${cell}</text>`
      );
      x += w;
    });
  });
  out.push("</svg>");
  return out.join("\n");
}
