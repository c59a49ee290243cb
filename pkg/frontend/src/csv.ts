import Papa from "papaparse";

export class CsvError extends Error {}

export class MissingColumnError extends CsvError {
  constructor(public readonly column: string) {
    super(`missing column "${column}"`);
  }
}

export interface Table {
  columns: string[];
  rows: Record<string, number>[];
}

/** Parse a headered, all-numeric CSV. Empty input or an empty body is an error. */
export function parseCsv(text: string): Table {
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  const fatal = parsed.errors.find((e) => e.type !== "FieldMismatch");
  if (fatal) {
    throw new CsvError(`CSV parse failed: ${fatal.message}`);
  }
  const columns = (parsed.meta.fields ?? []).filter((c) => c !== "");
  if (columns.length === 0 || parsed.data.length === 0) {
    throw new CsvError("CSV contains no data rows");
  }
  const rows = parsed.data.map((raw, i) => {
    const row: Record<string, number> = {};
    for (const col of columns) {
      const cell = raw[col];
      const value = cell === undefined || cell === "" ? NaN : Number(cell);
      if (!Number.isFinite(value)) {
        throw new CsvError(`row ${i + 2}: column "${col}" is not numeric (${JSON.stringify(cell)})`);
      }
      row[col] = value;
    }
    return row;
  });
  return { columns, rows };
}

export function requireColumns(table: Table, needed: readonly string[]): void {
  for (const col of needed) {
    if (!table.columns.includes(col)) {
      throw new MissingColumnError(col);
    }
  }
}
