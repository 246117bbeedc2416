/**
 * Display rounding rules: money to 2 decimals, percentages to 1 decimal.
 * Absent values (undefined metrics) render as a dash.
 */

function normalizeZero(value: number): number {
  return Object.is(value, -0) ? 0 : value;
}

export function formatChf(value: number | null | undefined): string {
  if (value === null || value === undefined) return "–";
  // round first so a tiny negative residue cannot render as "-0.00"
  return normalizeZero(Math.round(value * 100) / 100).toFixed(2);
}

export function formatPct(fraction: number | null | undefined): string {
  if (fraction === null || fraction === undefined) return "–";
  return `${normalizeZero(Math.round(fraction * 1000) / 10).toFixed(1)}%`;
}

export function formatCv(cv: number | null | undefined): string {
  if (cv === null || cv === undefined) return "undefined";
  return cv.toFixed(3);
}

export function formatPrice(price: number): string {
  const text = price.toFixed(4).replace(/0+$/, "");
  return text.endsWith(".") ? `${text}0` : text;
}
