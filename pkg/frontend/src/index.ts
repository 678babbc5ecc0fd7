export { parseCorrelations, parseFront, absMax, CsvFormatError } from "./csv.js";
export type { CorrelationSet, FrontCurve } from "./csv.js";
export { loadSpec, resolveSpec, SpecError } from "./spec.js";
export type { FigureSpec, ResolvedFigure } from "./spec.js";
export { renderHeatmap, cellEdges } from "./heatmap.js";
export { renderDslice, MissingDistanceError } from "./dslice.js";
export { linearScale, ticks, divergingColor } from "./scale.js";
export { DIVERGING_STOPS } from "./style.js";
export { runCli } from "./cli.js";
