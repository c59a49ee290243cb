import { parseCsv } from "./csv.js";
import { fig3Series, fig4Series, tableGrid } from "./data.js";
import { renderChart, renderGrid } from "./svg.js";

export const KINDS = ["fig3", "fig4", "table"] as const;

export type Kind = (typeof KINDS)[number];

export interface FigureSpec {
  kind: Kind;
  input: string;
  output: string;
  logY: boolean;
}

export function defaultSpec(kind: Kind, input: string, output: string): FigureSpec {
  return { kind, input, output, logY: kind !== "table" };
}

/**
 * CSV text to finished document text. All the physics lives in the CSV;
 * this function only regroups rows and scales units for display.
 */
export function renderText(spec: Pick<FigureSpec, "kind" | "logY">, csvText: string): string {
  const table = parseCsv(csvText);
  switch (spec.kind) {
    case "fig3":
      return renderChart(fig3Series(table), {
        xLabel: "F",
        yLabel: "P_g",
        logY: spec.logY,
      });
    case "fig4": {
      const { curves, reference } = fig4Series(table);
      return renderChart([...curves, reference], {
        xLabel: "L_km",
        yLabel: "T_tot_s",
        logY: spec.logY,
      });
    }
    case "table":
      return renderGrid(tableGrid(table));
  }
}
