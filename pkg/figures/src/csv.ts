/** Sweep CSV loading. The schema is plain comma-separated ASCII with a
 * header row and no quoting, as written by the sweep command. */

export class SchemaError extends Error {}

export interface SweepRow {
  code_type: string;
  M: number;
  N: number;
  p: number;
  q: number;
  eta_mean: number;
}

const REQUIRED = ["code_type", "M", "N", "p", "q", "eta_mean"] as const;

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("CSV is empty: expected at least a header row");
  }
  const header = lines[0].split(",");
  const index = new Map(header.map((name, i) => [name, i]));
  for (const column of REQUIRED) {
    if (!index.has(column)) {
      throw new SchemaError(`CSV is missing required column '${column}'`);
    }
  }
  const rows: SweepRow[] = [];
  for (const line of lines.slice(1)) {
    const fields = line.split(",");
    if (fields.length !== header.length) {
      throw new SchemaError(`row has ${fields.length} fields, header has ${header.length}`);
    }
    const cell = (name: string) => fields[index.get(name)!];
    const num = (name: string) => {
      const value = Number(cell(name));
      if (Number.isNaN(value) && cell(name) !== "nan") {
        throw new SchemaError(`column '${name}' holds non-numeric value '${cell(name)}'`);
      }
      return value;
    };
    rows.push({
      code_type: cell("code_type"),
      M: num("M"),
      N: num("N"),
      p: num("p"),
      q: num("q"),
      eta_mean: num("eta_mean"),
    });
  }
  return rows.filter((row) => Number.isFinite(row.eta_mean));
}
