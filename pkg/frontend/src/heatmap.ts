import type { ResolvedFigure } from "./spec.js";
import { divergingColor, linearScale, ticks } from "./scale.js";
import { FONT_FAMILY, HEATMAP } from "./style.js";
import { document, el, fmt, text } from "./svg.js";

/**
 * Cell edges around sample coordinates: midpoints between neighbors, end
 * cells extended by half the adjacent gap. A single coordinate gets a unit
 * cell so degenerate inputs still render.
 */
export function cellEdges(centers: readonly number[]): number[] {
  if (centers.length === 0) throw new Error("no coordinates to grid");
  if (centers.length === 1) return [centers[0]! - 0.5, centers[0]! + 0.5];
  const edges: number[] = [centers[0]! - (centers[1]! - centers[0]!) / 2];
  for (let i = 0; i + 1 < centers.length; i++) {
    edges.push((centers[i]! + centers[i + 1]!) / 2);
  }
  const n = centers.length;
  edges.push(centers[n - 1]! + (centers[n - 1]! - centers[n - 2]!) / 2);
  return edges;
}

/**
 * Render the staggered-correlation heatmap: time on x, distance on y with d
 * increasing upward, diverging colors centered on the resolved range, and
 * the semiclassical front overlaid when the spec provided one.
 */
export function renderHeatmap(figure: ResolvedFigure): string {
  const { main, front, colorRange } = figure;
  const S = HEATMAP;
  const plotLeft = S.margin.left;
  const plotRight = S.width - S.margin.right;
  const plotTop = S.margin.top;
  const plotBottom = S.height - S.margin.bottom;

  const tEdges = cellEdges(main.times);
  const dEdges = cellEdges(main.distances);
  const x = linearScale([tEdges[0]!, tEdges[tEdges.length - 1]!], [plotLeft, plotRight]);
  // inverted range puts larger d higher on the page
  const y = linearScale([dEdges[0]!, dEdges[dEdges.length - 1]!], [plotBottom, plotTop]);

  const body: string[] = [];
  body.push(el("rect", { x: 0, y: 0, width: S.width, height: S.height, fill: S.background }));

  // cells
  const cells: string[] = [];
  for (let i = 0; i < main.times.length; i++) {
    const cx = x(tEdges[i]!);
    const cw = x(tEdges[i + 1]!) - cx;
    const row = main.values[i]!;
    for (let j = 0; j < main.distances.length; j++) {
      const yTop = y(dEdges[j + 1]!);
      const ch = y(dEdges[j]!) - yTop;
      cells.push(
        el("rect", {
          class: "cell",
          x: cx,
          y: yTop,
          width: cw,
          height: ch,
          fill: divergingColor(row[j]!, colorRange[0], colorRange[1]),
        }),
      );
    }
  }
  body.push(el("g", { "shape-rendering": "crispEdges" }, cells));

  // front overlay, clipped to the plot area
  if (front !== null) {
    const points = front.times.map((t, i) => `${fmt(x(t))},${fmt(y(front.radii[i]!))}`).join(" ");
    body.push(
      el("clipPath", { id: "plot-area" }, [
        el("rect", { x: plotLeft, y: plotTop, width: plotRight - plotLeft, height: plotBottom - plotTop }),
      ]),
    );
    body.push(
      el("polyline", {
        class: "front-overlay",
        points,
        fill: "none",
        stroke: S.overlayColor,
        "stroke-width": S.overlayWidth,
        "stroke-dasharray": S.overlayDash,
        "clip-path": "url(#plot-area)",
      }),
    );
  }

  // frame
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

  // x axis: time ticks
  const xTicks: string[] = [];
  for (const t of ticks(tEdges[0]!, tEdges[tEdges.length - 1]!, 7)) {
    const px = x(t);
    xTicks.push(el("line", { x1: px, y1: plotBottom, x2: px, y2: plotBottom + S.tickLength, stroke: S.axisColor }));
    xTicks.push(
      text(fmt(t, 3), {
        class: "x-tick",
        x: px,
        y: plotBottom + S.tickLength + 13,
        "text-anchor": "middle",
        "font-family": FONT_FAMILY,
        "font-size": S.tickSize,
        fill: S.axisColor,
      }),
    );
  }
  body.push(el("g", {}, xTicks));

  // y axis: one tick per distance (thinned when dense)
  const dStep = main.distances.length > 16 ? 2 : 1;
  const yTicks: string[] = [];
  for (let j = 0; j < main.distances.length; j += dStep) {
    const d = main.distances[j]!;
    const py = y(d);
    yTicks.push(el("line", { x1: plotLeft - S.tickLength, y1: py, x2: plotLeft, y2: py, stroke: S.axisColor }));
    yTicks.push(
      text(String(d), {
        class: "y-tick",
        x: plotLeft - S.tickLength - 4,
        y: py + 4,
        "text-anchor": "end",
        "font-family": FONT_FAMILY,
        "font-size": S.tickSize,
        fill: S.axisColor,
      }),
    );
  }
  body.push(el("g", {}, yTicks));

  // axis labels and title
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
    text("d (sites)", {
      x: 16,
      y: (plotTop + plotBottom) / 2,
      "text-anchor": "middle",
      "font-family": FONT_FAMILY,
      "font-size": S.labelSize,
      fill: S.axisColor,
      transform: `rotate(-90 16 ${fmt((plotTop + plotBottom) / 2)})`,
    }),
  );
  if (figure.titles.panel !== null) {
    body.push(
      text(figure.titles.panel, {
        class: "panel-title",
        x: (plotLeft + plotRight) / 2,
        y: plotTop - 14,
        "text-anchor": "middle",
        "font-family": FONT_FAMILY,
        "font-size": S.titleSize,
        fill: S.axisColor,
      }),
    );
  }

  // colorbar
  const barLeft = plotRight + S.colorbarGap;
  const segments: string[] = [];
  const segH = (plotBottom - plotTop) / S.colorbarSegments;
  for (let k = 0; k < S.colorbarSegments; k++) {
    // segment k spans values from bottom (lo) to top (hi)
    const frac = (k + 0.5) / S.colorbarSegments;
    const value = colorRange[0] + frac * (colorRange[1] - colorRange[0]);
    segments.push(
      el("rect", {
        x: barLeft,
        y: plotBottom - (k + 1) * segH,
        width: S.colorbarWidth,
        height: segH + 0.5,
        fill: divergingColor(value, colorRange[0], colorRange[1]),
      }),
    );
  }
  body.push(el("g", { "shape-rendering": "crispEdges" }, segments));
  body.push(
    el("rect", {
      x: barLeft,
      y: plotTop,
      width: S.colorbarWidth,
      height: plotBottom - plotTop,
      fill: "none",
      stroke: S.axisColor,
      "stroke-width": 1,
    }),
  );
  const barScale = linearScale([colorRange[0], colorRange[1]], [plotBottom, plotTop]);
  const barTicks: string[] = [];
  for (const v of ticks(colorRange[0], colorRange[1], 5)) {
    const py = barScale(v);
    barTicks.push(
      el("line", {
        x1: barLeft + S.colorbarWidth,
        y1: py,
        x2: barLeft + S.colorbarWidth + S.tickLength,
        y2: py,
        stroke: S.axisColor,
      }),
    );
    barTicks.push(
      text(fmt(v, 3), {
        x: barLeft + S.colorbarWidth + S.tickLength + 4,
        y: py + 4,
        "text-anchor": "start",
        "font-family": FONT_FAMILY,
        "font-size": S.tickSize,
        fill: S.axisColor,
      }),
    );
  }
  body.push(el("g", {}, barTicks));
  body.push(
    text("staggered C_d(t)", {
      x: barLeft + S.colorbarWidth / 2,
      y: plotTop - 14,
      "text-anchor": "middle",
      "font-family": FONT_FAMILY,
      "font-size": S.tickSize,
      fill: S.axisColor,
    }),
  );

  return document(S.width, S.height, body);
}
