import type { CorrelationSet } from "./csv.js";
import type { ResolvedFigure } from "./spec.js";
import { linearScale, ticks } from "./scale.js";
import { DSLICE, FONT_FAMILY } from "./style.js";
import { document, el, fmt, text } from "./svg.js";

export class MissingDistanceError extends Error {}

interface Series {
  label: string;
  color: string;
  times: number[];
  values: number[];
  std: number[] | null;
}

function extractSlice(set: CorrelationSet, d: number, label: string, color: string): Series {
  const j = set.distances.indexOf(d);
  if (j < 0) {
    throw new MissingDistanceError(
      `d=${d} is not present in the ${label} data (available distances: ${set.distances.join(", ")})`,
    );
  }
  return {
    label,
    color,
    times: set.times,
    values: set.values.map((row) => row[j]!),
    std: set.std === null ? null : set.std.map((row) => row[j]!),
  };
}

/**
 * Render the fixed-distance cut: staggered correlation at chain separation
 * `d` versus time, one labeled curve per input set, with a shaded mean +/-
 * std band wherever the set carries a spread column.
 */
export function renderDslice(figure: ResolvedFigure, d: number): string {
  if (!Number.isInteger(d) || d < 1) throw new Error(`slice distance must be a positive integer, got ${d}`);
  const S = DSLICE;
  const series: Series[] = [extractSlice(figure.main, d, figure.titles.main, S.seriesColors[0]!)];
  if (figure.compare !== null) {
    series.push(extractSlice(figure.compare, d, figure.titles.compare, S.seriesColors[1]!));
  }

  let tLo = Infinity;
  let tHi = -Infinity;
  let vLo = 0; // always include zero, correlations are signed
  let vHi = 0;
  for (const s of series) {
    tLo = Math.min(tLo, s.times[0]!);
    tHi = Math.max(tHi, s.times[s.times.length - 1]!);
    s.values.forEach((v, i) => {
      const w = s.std === null ? 0 : s.std[i]!;
      vLo = Math.min(vLo, v - w);
      vHi = Math.max(vHi, v + w);
    });
  }
  if (vLo === vHi) {
    vLo -= 1;
    vHi += 1;
  }
  const pad = 0.06 * (vHi - vLo);
  vLo -= pad;
  vHi += pad;

  const plotLeft = S.margin.left;
  const plotRight = S.width - S.margin.right;
  const plotTop = S.margin.top;
  const plotBottom = S.height - S.margin.bottom;
  const x = linearScale([tLo, tHi], [plotLeft, plotRight]);
  const y = linearScale([vLo, vHi], [plotBottom, plotTop]);

  const body: string[] = [];
  body.push(el("rect", { x: 0, y: 0, width: S.width, height: S.height, fill: S.background }));

  // horizontal grid and zero line
  const yTickValues = ticks(vLo, vHi, 6);
  const grid: string[] = [];
  for (const v of yTickValues) {
    grid.push(
      el("line", {
        x1: plotLeft,
        y1: y(v),
        x2: plotRight,
        y2: y(v),
        stroke: v === 0 ? S.zeroLineColor : S.gridColor,
        "stroke-width": 1,
      }),
    );
  }
  body.push(el("g", {}, grid));

  // std bands under the curves
  for (const s of series) {
    if (s.std === null) continue;
    const upper = s.times.map((t, i) => `${fmt(x(t))},${fmt(y(s.values[i]! + s.std![i]!))}`);
    const lower = s.times.map((t, i) => `${fmt(x(t))},${fmt(y(s.values[i]! - s.std![i]!))}`).reverse();
    body.push(
      el("polygon", {
        class: "std-band",
        points: [...upper, ...lower].join(" "),
        fill: s.color,
        "fill-opacity": S.bandOpacity,
        stroke: "none",
      }),
    );
  }

  // curves
  for (const s of series) {
    const points = s.times.map((t, i) => `${fmt(x(t))},${fmt(y(s.values[i]!))}`).join(" ");
    body.push(
      el("polyline", {
        class: "series",
        points,
        fill: "none",
        stroke: s.color,
        "stroke-width": S.lineWidth,
      }),
    );
  }

  // frame and ticks
  body.push(
    el("rect", {
      x: plotLeft,
      y: plotTop,
      width: plotRight - plotLeft,
      height: plotBottom - plotTop,
      fill: "none",
      stroke: S.axisColor,
      "stroke-width": 1,
    }),
  );
  const axis: string[] = [];
  for (const t of ticks(tLo, tHi, 7)) {
    const px = x(t);
    axis.push(el("line", { x1: px, y1: plotBottom, x2: px, y2: plotBottom + S.tickLength, stroke: S.axisColor }));
    axis.push(
      text(fmt(t, 3), {
        x: px,
        y: plotBottom + S.tickLength + 13,
        "text-anchor": "middle",
        "font-family": FONT_FAMILY,
        "font-size": S.tickSize,
        fill: S.axisColor,
      }),
    );
  }
  for (const v of yTickValues) {
    const py = y(v);
    axis.push(el("line", { x1: plotLeft - S.tickLength, y1: py, x2: plotLeft, y2: py, stroke: S.axisColor }));
    axis.push(
      text(fmt(v, 4), {
        x: plotLeft - S.tickLength - 4,
        y: py + 4,
        "text-anchor": "end",
        "font-family": FONT_FAMILY,
        "font-size": S.tickSize,
        fill: S.axisColor,
      }),
    );
  }
  body.push(el("g", {}, axis));

  body.push(
    text("t (us)", {
      x: (plotLeft + plotRight) / 2,
      y: S.height - 14,
      "text-anchor": "middle",
      "font-family": FONT_FAMILY,
      "font-size": S.labelSize,
      fill: S.axisColor,
    }),
  );
  body.push(
    text(`staggered C_${d}(t)`, {
      x: 18,
      y: (plotTop + plotBottom) / 2,
      "text-anchor": "middle",
      "font-family": FONT_FAMILY,
      "font-size": S.labelSize,
      fill: S.axisColor,
      transform: `rotate(-90 18 ${fmt((plotTop + plotBottom) / 2)})`,
    }),
  );
  body.push(
    text(figure.titles.panel ?? `correlation slice at d = ${d}`, {
      class: "panel-title",
      x: (plotLeft + plotRight) / 2,
      y: plotTop - 14,
      "text-anchor": "middle",
      "font-family": FONT_FAMILY,
      "font-size": S.titleSize,
      fill: S.axisColor,
    }),
  );

  // legend, top-right corner of the plot
  const legend: string[] = [];
  series.forEach((s, i) => {
    const ly = plotTop + 16 + i * 20;
    const lx = plotRight - 140;
    legend.push(
      el("line", {
        x1: lx,
        y1: ly,
        x2: lx + S.legendSwatch,
        y2: ly,
        stroke: s.color,
        "stroke-width": S.lineWidth,
      }),
    );
    legend.push(
      text(s.label, {
        class: "legend-label",
        x: lx + S.legendSwatch + 6,
        y: ly + 4,
        "text-anchor": "start",
        "font-family": FONT_FAMILY,
        "font-size": S.tickSize,
        fill: S.axisColor,
      }),
    );
  });
  body.push(el("g", {}, legend));

  return document(S.width, S.height, body);
}
