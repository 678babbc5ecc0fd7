import { readFileSync } from "node:fs";
import { dirname, resolve } from "node:path";
import { z } from "zod";

import { absMax, parseCorrelations, parseFront, type CorrelationSet, type FrontCurve } from "./csv.js";

export class SpecError extends Error {}

const figureSpecSchema = z
  .object({
    correlations: z.string().min(1),
    front: z.string().min(1).optional(),
    compare: z.string().min(1).optional(),
    color_range: z.tuple([z.number(), z.number()]).optional(),
    out: z.string().min(1),
    titles: z
      .object({
        panel: z.string().optional(),
        main: z.string().optional(),
        compare: z.string().optional(),
      })
      .strict()
      .optional(),
  })
  .strict();

export type FigureSpec = z.infer<typeof figureSpecSchema>;

/** A spec with every referenced CSV loaded and the color range resolved. */
export interface ResolvedFigure {
  main: CorrelationSet;
  compare: CorrelationSet | null;
  front: FrontCurve | null;
  colorRange: readonly [number, number];
  outPath: string;
  titles: { panel: string | null; main: string; compare: string };
}

function readText(path: string, role: string): string {
  try {
    return readFileSync(path, "utf8");
  } catch (err) {
    throw new SpecError(`${role} file ${path}: ${(err as NodeJS.ErrnoException).code === "ENOENT" ? "does not exist" : String(err)}`);
  }
}

/**
 * Validate a spec object and load everything it references. Relative paths
 * are resolved against `baseDir` (the spec file's directory), so shipped
 * sample specs work from any working directory.
 */
export function resolveSpec(raw: unknown, baseDir: string): ResolvedFigure {
  const parsed = figureSpecSchema.safeParse(raw);
  if (!parsed.success) {
    const issue = parsed.error.issues[0]!;
    const where = issue.path.length ? issue.path.join(".") : "spec";
    throw new SpecError(`invalid figure spec: ${where}: ${issue.message}`);
  }
  const spec = parsed.data;

  const main = parseCorrelations(readText(resolve(baseDir, spec.correlations), "correlations"), "correlations");
  const compare =
    spec.compare === undefined
      ? null
      : parseCorrelations(readText(resolve(baseDir, spec.compare), "compare"), "compare");
  const front = spec.front === undefined ? null : parseFront(readText(resolve(baseDir, spec.front), "front"), "front");

  let colorRange: readonly [number, number];
  if (spec.color_range !== undefined) {
    const [lo, hi] = spec.color_range;
    if (!(lo < hi)) throw new SpecError(`invalid figure spec: color_range must satisfy lo < hi, got [${lo}, ${hi}]`);
    colorRange = [lo, hi];
  } else {
    // default: symmetric about zero, spanning the data
    const m = absMax(main);
    colorRange = m > 0 ? [-m, m] : [-1, 1];
  }

  return {
    main,
    compare,
    front,
    colorRange,
    outPath: resolve(baseDir, spec.out),
    titles: {
      panel: spec.titles?.panel ?? null,
      main: spec.titles?.main ?? "primary",
      compare: spec.titles?.compare ?? "comparison",
    },
  };
}

/** Read and resolve a spec JSON file. */
export function loadSpec(path: string): ResolvedFigure {
  const text = readText(path, "spec");
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new SpecError(`spec file ${path} is not valid JSON: ${(err as Error).message}`);
  }
  return resolveSpec(raw, dirname(resolve(path)));
}
