import Papa from "papaparse";

/**
 * Distance-resolved correlation data on a full (time x distance) grid.
 * `values[i][j]` is the staggered connected correlation at `times[i]`,
 * `distances[j]`; `std` is present only when the source CSV carried a
 * spread column (ensemble outputs).
 */
export interface CorrelationSet {
  times: number[];
  distances: number[];
  values: number[][];
  std: number[][] | null;
}

export interface FrontCurve {
  times: number[];
  radii: number[];
}

/** Header variants written by the simulator CLI, mapped to column roles. */
const CORRELATION_HEADERS: ReadonlyArray<{ fields: string[]; value: string; std: string | null }> = [
  { fields: ["t_us", "d", "stagC"], value: "stagC", std: null },
  { fields: ["t_us", "d", "stagC", "std"], value: "stagC", std: "std" },
  {
    fields: ["t_us", "d", "mean_stagC", "std_stagC", "n_realizations"],
    value: "mean_stagC",
    std: "std_stagC",
  },
  { fields: ["t_us", "d", "mean_stagC", "n_realizations"], value: "mean_stagC", std: null },
];

export class CsvFormatError extends Error {}

function parseRows(source: string, label: string): { fields: string[]; rows: Record<string, string>[] } {
  const parsed = Papa.parse<Record<string, string>>(source.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new CsvFormatError(`${label}: ${first.message} (row ${first.row ?? "?"})`);
  }
  const fields = parsed.meta.fields ?? [];
  return { fields, rows: parsed.data };
}

function toNumber(raw: string | undefined, column: string, row: number, label: string): number {
  const v = Number(raw);
  if (raw === undefined || raw.trim() === "" || Number.isNaN(v)) {
    throw new CsvFormatError(`${label}: non-numeric ${column} ${JSON.stringify(raw ?? "")} at data row ${row + 1}`);
  }
  return v;
}

/**
 * Parse any of the simulator's correlation CSV layouts into a dense grid.
 * Every (time, distance) pair must appear exactly once; the grid is what
 * the heatmap renderer draws, so holes are an input error, not a warning.
 */
export function parseCorrelations(source: string, label = "correlations"): CorrelationSet {
  const { fields, rows } = parseRows(source, label);
  const layout = CORRELATION_HEADERS.find(
    (h) => h.fields.length === fields.length && h.fields.every((f, i) => fields[i] === f),
  );
  if (!layout) {
    throw new CsvFormatError(`${label}: unrecognized header ${JSON.stringify(fields.join(","))}`);
  }
  if (rows.length === 0) throw new CsvFormatError(`${label}: no data rows`);

  const cells = new Map<string, { value: number; std: number | null }>();
  const timeSet = new Set<number>();
  const distSet = new Set<number>();
  rows.forEach((row, i) => {
    const t = toNumber(row["t_us"], "t_us", i, label);
    const d = toNumber(row["d"], "d", i, label);
    if (!Number.isInteger(d) || d < 1) {
      throw new CsvFormatError(`${label}: distance must be a positive integer, got ${d} at data row ${i + 1}`);
    }
    const value = toNumber(row[layout.value], layout.value, i, label);
    const std = layout.std === null ? null : toNumber(row[layout.std], layout.std, i, label);
    const key = `${t}|${d}`;
    if (cells.has(key)) throw new CsvFormatError(`${label}: duplicate cell t_us=${t}, d=${d}`);
    cells.set(key, { value, std });
    timeSet.add(t);
    distSet.add(d);
  });

  const times = [...timeSet].sort((a, b) => a - b);
  const distances = [...distSet].sort((a, b) => a - b);
  const values: number[][] = [];
  const std: number[][] | null = layout.std === null ? null : [];
  for (const t of times) {
    const vRow: number[] = [];
    const sRow: number[] = [];
    for (const d of distances) {
      const cell = cells.get(`${t}|${d}`);
      if (!cell) throw new CsvFormatError(`${label}: missing cell t_us=${t}, d=${d} (grid is incomplete)`);
      vRow.push(cell.value);
      if (cell.std !== null) sRow.push(cell.std);
    }
    values.push(vRow);
    if (std !== null) std.push(sRow);
  }
  return { times, distances, values, std };
}

/** Parse a semiclassical front curve (`t_us,d_sites`; distances may be fractional). */
export function parseFront(source: string, label = "front"): FrontCurve {
  const { fields, rows } = parseRows(source, label);
  if (fields.length !== 2 || fields[0] !== "t_us" || fields[1] !== "d_sites") {
    throw new CsvFormatError(`${label}: expected header "t_us,d_sites", got ${JSON.stringify(fields.join(","))}`);
  }
  if (rows.length === 0) throw new CsvFormatError(`${label}: no data rows`);
  const times: number[] = [];
  const radii: number[] = [];
  rows.forEach((row, i) => {
    times.push(toNumber(row["t_us"], "t_us", i, label));
    radii.push(toNumber(row["d_sites"], "d_sites", i, label));
  });
  for (let i = 1; i < times.length; i++) {
    if (times[i]! <= times[i - 1]!) {
      throw new CsvFormatError(`${label}: t_us must be strictly increasing (row ${i + 1})`);
    }
  }
  return { times, radii };
}

/** Largest |value| over the grid; used for the default symmetric color range. */
export function absMax(set: CorrelationSet): number {
  let m = 0;
  for (const row of set.values) {
    for (const v of row) m = Math.max(m, Math.abs(v));
  }
  return m;
}
