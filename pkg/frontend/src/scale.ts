import { DIVERGING_STOPS } from "./style.js";

/** Affine map from a data interval to a pixel interval. */
export interface LinearScale {
  (x: number): number;
  domain: readonly [number, number];
  range: readonly [number, number];
}

export function linearScale(domain: readonly [number, number], range: readonly [number, number]): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  if (!(Number.isFinite(d0) && Number.isFinite(d1))) {
    throw new Error(`scale domain must be finite, got [${d0}, ${d1}]`);
  }
  const span = d1 - d0;
  const scale = ((x: number) => (span === 0 ? (r0 + r1) / 2 : r0 + ((x - d0) / span) * (r1 - r0))) as LinearScale;
  scale.domain = [d0, d1];
  scale.range = [r0, r1];
  return scale;
}

/**
 * Tick positions inside [lo, hi] at a step of 1, 2, or 5 times a power of
 * ten, choosing the step that yields closest to `count` ticks.
 */
export function ticks(lo: number, hi: number, count = 6): number[] {
  if (hi < lo) [lo, hi] = [hi, lo];
  if (hi === lo) return [lo];
  const rawStep = (hi - lo) / Math.max(1, count);
  const power = Math.floor(Math.log10(rawStep));
  const base = Math.pow(10, power);
  let step = 10 * base;
  for (const mult of [1, 2, 5]) {
    if (rawStep <= mult * base) {
      step = mult * base;
      break;
    }
  }
  const start = Math.ceil(lo / step - 1e-9);
  const stop = Math.floor(hi / step + 1e-9);
  const out: number[] = [];
  for (let i = start; i <= stop; i++) {
    // multiply, don't accumulate, then strip the binary-fraction residue
    // (3 * 0.2 is 0.6000000000000001) so ticks are the round numbers they name
    const v = Number((i * step).toPrecision(12));
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

function hexToRgb(hex: string): [number, number, number] {
  const m = /^#([0-9a-f]{6})$/i.exec(hex);
  if (!m || m[1] === undefined) throw new Error(`bad hex color ${hex}`);
  const v = parseInt(m[1], 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

function rgbToHex(rgb: readonly [number, number, number]): string {
  const clamp = (c: number) => Math.min(255, Math.max(0, Math.round(c)));
  const v = (clamp(rgb[0]) << 16) | (clamp(rgb[1]) << 8) | clamp(rgb[2]);
  return "#" + v.toString(16).padStart(6, "0");
}

const STOP_RGB = DIVERGING_STOPS.map(hexToRgb);

/**
 * Map a signed value onto the pinned diverging palette. `lo` and `hi` bound
 * the color range; values outside are clamped. The palette midpoint lands
 * exactly on the midpoint of the range, which the callers keep at zero.
 */
export function divergingColor(value: number, lo: number, hi: number): string {
  if (!(hi > lo)) throw new Error(`color range must satisfy lo < hi, got [${lo}, ${hi}]`);
  let u = (value - lo) / (hi - lo);
  if (Number.isNaN(u)) throw new Error(`cannot color non-numeric value ${value}`);
  u = Math.min(1, Math.max(0, u));
  const pos = u * (STOP_RGB.length - 1);
  const i = Math.min(STOP_RGB.length - 2, Math.floor(pos));
  const frac = pos - i;
  const a = STOP_RGB[i]!;
  const b = STOP_RGB[i + 1]!;
  return rgbToHex([
    a[0] + frac * (b[0] - a[0]),
    a[1] + frac * (b[1] - a[1]),
    a[2] + frac * (b[2] - a[2]),
  ]);
}
