import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";
import { parseArgs } from "node:util";

import { CsvFormatError } from "./csv.js";
import { renderDslice } from "./dslice.js";
import { renderHeatmap } from "./heatmap.js";
import { loadSpec, SpecError } from "./spec.js";

const USAGE = `usage: confine-fig --spec <figure.json> [--d <distance>] [--out <file.svg>]

Renders the correlation heatmap described by the spec, or, when --d is
given, the fixed-distance slice comparison at that chain separation.
--out overrides the output path from the spec.`;

export interface CliIo {
  out: (line: string) => void;
  err: (line: string) => void;
}

/** Run the renderer CLI; returns the process exit code. */
export function runCli(argv: string[], io: CliIo = { out: console.log, err: console.error }): number {
  let values: { spec?: string; d?: string; out?: string; help?: boolean };
  try {
    values = parseArgs({
      args: argv,
      options: {
        spec: { type: "string" },
        d: { type: "string" },
        out: { type: "string" },
        help: { type: "boolean" },
      },
    }).values;
  } catch (err) {
    io.err(`error: ${(err as Error).message}`);
    io.err(USAGE);
    return 2;
  }
  if (values.help) {
    io.out(USAGE);
    return 0;
  }
  if (!values.spec) {
    io.err("error: --spec is required");
    io.err(USAGE);
    return 2;
  }
  let d: number | null = null;
  if (values.d !== undefined) {
    d = Number(values.d);
    if (!Number.isInteger(d) || d < 1) {
      io.err(`error: --d must be a positive integer, got ${JSON.stringify(values.d)}`);
      return 2;
    }
  }

  try {
    const figure = loadSpec(values.spec);
    const svg = d === null ? renderHeatmap(figure) : renderDslice(figure, d);
    const outPath = values.out ?? figure.outPath;
    mkdirSync(dirname(outPath), { recursive: true });
    writeFileSync(outPath, svg, "utf8");
    io.out(`wrote ${outPath}`);
    return 0;
  } catch (err) {
    if (err instanceof SpecError || err instanceof CsvFormatError) {
      io.err(`error: ${err.message}`);
      return 2;
    }
    io.err(`error: ${(err as Error).message}`);
    return 1;
  }
}
