import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { CsvError, MissingColumnError, parseCsv, requireColumns } from "../src/csv.js";

const fig3Text = readFileSync(new URL("./fixtures/fig3.csv", import.meta.url), "utf-8");

describe("parseCsv", () => {
  it("parses the generated sweep into numeric rows", () => {
    const table = parseCsv(fig3Text);
    expect(table.columns).toEqual(["L0_km", "F", "P_g"]);
    expect(table.rows).toHaveLength(45);
    expect(table.rows[0].L0_km).toBe(15);
    expect(table.rows[0].F).toBeCloseTo(0.999, 12);
    expect(typeof table.rows[0].P_g).toBe("number");
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("")).toThrow(CsvError);
  });

  it("rejects a header with no data rows", () => {
    expect(() => parseCsv("L0_km,F,P_g\n")).toThrow(/no data rows/);
  });

  it("rejects non-numeric cells and names the column", () => {
    expect(() => parseCsv("a,b\n1,oops\n")).toThrow(/column "b"/);
  });
});

describe("requireColumns", () => {
  it("passes when every column is present", () => {
    const table = parseCsv("a,b\n1,2\n");
    expect(() => requireColumns(table, ["a", "b"])).not.toThrow();
  });

  it("throws a MissingColumnError carrying the first absent name", () => {
    const table = parseCsv("a,b\n1,2\n");
    try {
      requireColumns(table, ["a", "P_g", "b"]);
      expect.unreachable("requireColumns should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(MissingColumnError);
      expect((err as MissingColumnError).column).toBe("P_g");
      expect((err as Error).message).toContain("P_g");
    }
  });
});
