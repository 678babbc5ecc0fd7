/** Minimal deterministic SVG string builder. */

/**
 * Format a coordinate or numeric attribute with a fixed precision and no
 * trailing zeros, so output bytes do not depend on floating-point noise in
 * the last digits.
 */
export function fmt(x: number, decimals = 2): string {
  if (!Number.isFinite(x)) {
    throw new Error(`cannot format non-finite number ${x}`);
  }
  const s = x.toFixed(decimals);
  if (!s.includes(".")) return s;
  // -0.00 and 0.00 must serialize identically
  const trimmed = s.replace(/\.?0+$/, "");
  return trimmed === "-0" ? "0" : trimmed;
}

export type Attrs = Record<string, string | number>;

function attrString(attrs: Attrs): string {
  const parts: string[] = [];
  for (const key of Object.keys(attrs)) {
    const value = attrs[key];
    parts.push(`${key}="${typeof value === "number" ? fmt(value) : value}"`);
  }
  return parts.length ? " " + parts.join(" ") : "";
}

export function el(tag: string, attrs: Attrs, children?: string[] | string): string {
  const inner = children === undefined ? "" : Array.isArray(children) ? children.join("") : children;
  if (inner === "") return `<${tag}${attrString(attrs)}/>`;
  return `<${tag}${attrString(attrs)}>${inner}</${tag}>`;
}

export function text(content: string, attrs: Attrs): string {
  return el("text", attrs, escapeText(content));
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function document(width: number, height: number, body: string[]): string {
  const head =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">`;
  return head + body.join("") + "</svg>\n";
}
