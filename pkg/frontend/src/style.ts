/**
 * Pinned figure style. Every color, size, and font lives here so that the
 * renderers are pure functions of (input data, spec, this file) and repeated
 * runs emit byte-identical SVG.
 */

/**
 * Diverging palette for signed correlations, 11 pinned stops from strong
 * blue (minimum) through neutral (zero) to strong red (maximum). Cell colors
 * are piecewise-linear RGB interpolations between adjacent stops.
 */
export const DIVERGING_STOPS: readonly string[] = [
  "#053061",
  "#2166ac",
  "#4393c3",
  "#92c5de",
  "#d1e5f0",
  "#f7f7f7",
  "#fddbc7",
  "#f4a582",
  "#d6604d",
  "#b2182b",
  "#67001f",
];

export const FONT_FAMILY = "Helvetica, Arial, sans-serif";

export const HEATMAP = {
  width: 860,
  height: 520,
  margin: { top: 44, right: 110, bottom: 56, left: 64 },
  colorbarWidth: 16,
  colorbarGap: 26,
  colorbarSegments: 64,
  titleSize: 16,
  labelSize: 13,
  tickSize: 11,
  tickLength: 5,
  axisColor: "#222222",
  overlayColor: "#111111",
  overlayWidth: 2.5,
  overlayDash: "7,4",
  background: "#ffffff",
} as const;

export const DSLICE = {
  width: 760,
  height: 460,
  margin: { top: 44, right: 28, bottom: 56, left: 72 },
  titleSize: 16,
  labelSize: 13,
  tickSize: 11,
  tickLength: 5,
  axisColor: "#222222",
  gridColor: "#dddddd",
  zeroLineColor: "#999999",
  lineWidth: 2.0,
  bandOpacity: "0.25",
  // curve colors by slot: primary set first, comparison set second
  seriesColors: ["#b2182b", "#2166ac", "#35978f", "#bf812d"],
  legendSwatch: 18,
  background: "#ffffff",
} as const;
