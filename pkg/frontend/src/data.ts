import { requireColumns, type Table } from "./csv.js";

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  role: "curve" | "reference";
  points: Point[];
}

const byX = (a: Point, b: Point) => a.x - b.x;

function groupBy<K>(rows: Record<string, number>[], key: (r: Record<string, number>) => K): Map<K, Record<string, number>[]> {
  const groups = new Map<K, Record<string, number>[]>();
  for (const row of rows) {
    const k = key(row);
    const bucket = groups.get(k);
    if (bucket) {
      bucket.push(row);
    } else {
      groups.set(k, [row]);
    }
  }
  return groups;
}

/** One fidelity-vs-probability curve per attachment length. */
export function fig3Series(table: Table): Series[] {
  requireColumns(table, ["L0_km", "F", "P_g"]);
  const groups = groupBy(table.rows, (r) => r.L0_km);
  return [...groups.keys()]
    .sort((a, b) => a - b)
    .map((l0) => ({
      label: `L0_km = ${l0}`,
      role: "curve" as const,
      points: groups.get(l0)!.map((r) => ({ x: r.F, y: r.P_g })).sort(byX),
    }));
}

export interface Fig4Data {
  curves: Series[];
  reference: Series;
}

/** Distribution-time curves per (rate, swap probability), plus the signalling floor. */
export function fig4Series(table: Table): Fig4Data {
  requireColumns(table, ["L_km", "f_hz", "P_c", "T_tot_s", "classical_s"]);
  const groups = groupBy(table.rows, (r) => `f_hz = ${r.f_hz}, P_c = ${r.P_c}`);
  const curves = [...groups.entries()].map(([label, rows]) => ({
    label,
    role: "curve" as const,
    points: rows.map((r) => ({ x: r.L_km, y: r.T_tot_s })).sort(byX),
  }));

  const floor = new Map<number, number>();
  for (const r of table.rows) {
    floor.set(r.L_km, r.classical_s);
  }
  const reference: Series = {
    label: "classical_s",
    role: "reference",
    points: [...floor.entries()].map(([x, y]) => ({ x, y })).sort(byX),
  };
  return { curves, reference };
}

/**
 * Pivot the schedule CSV into the published layout: one labeled row per
 * quantity, one column per source rate.
 */
export function tableGrid(table: Table): string[][] {
  requireColumns(table, ["f_hz", "T_tot_s", "M_E"]);
  const rows = [...table.rows].sort((a, b) => a.f_hz - b.f_hz);
  return [
    ["f (Hz)", ...rows.map((r) => siFormat(r.f_hz))],
    ["T_tot (s)", ...rows.map((r) => compact(r.T_tot_s))],
    ["M_E", ...rows.map((r) => compact(r.M_E))],
  ];
}

/** 1330 -> "1.33 k"; unit scaling only, no arithmetic on the quantities. */
export function siFormat(value: number): string {
  const prefixes: [number, string][] = [
    [1e9, "G"],
    [1e6, "M"],
    [1e3, "k"],
  ];
  for (const [scale, letter] of prefixes) {
    if (Math.abs(value) >= scale) {
      return `${compact(value / scale)} ${letter}`;
    }
  }
  return compact(value);
}

export function compact(value: number): string {
  if (value === 0) {
    return "0";
  }
  const magnitude = Math.abs(value);
  if (magnitude >= 1e5 || magnitude < 1e-3) {
    return trimZeros(value.toExponential(3));
  }
  return trimZeros(value.toPrecision(4));
}

function trimZeros(text: string): string {
  return text
    .replace(/(\.\d*?)0+(?=e|$)/, "$1")
    .replace(/\.(?=e|$)/, "");
}
