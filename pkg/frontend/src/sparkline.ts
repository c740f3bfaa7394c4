// Departure-time sensitivity sparkline built from /sweep cells: the risk
// curve over the day, a shaded band of the scaled error, and a marker at
// the traveller's chosen departure time.

import { SweepCell } from "./api.js";

export function renderSparkline(
  cells: SweepCell[],
  departMinutes: number,
  width = 220,
  height = 48
): string {
  const ok = cells.filter((c) => c.status === "ok");
  if (ok.length < 2) return `<svg class="sparkline" width="${width}" height="${height}"></svg>`;
  const hours = ok.map((c) => parseFloat(c.key));
  const upper = Math.max(...ok.map((c) => c.mean + c.scaled_error));
  const hi = upper > 0 ? upper : 1;
  const x = (h: number) => (h / 24) * width;
  const y = (v: number) => height - 4 - (v / hi) * (height - 8);

  const line = ok.map((c, i) => `${x(hours[i]).toFixed(1)},${y(c.mean).toFixed(1)}`).join(" ");
  const bandTop = ok.map((c, i) => `${x(hours[i]).toFixed(1)},${y(c.mean + c.scaled_error).toFixed(1)}`);
  const bandBottom = ok
    .slice()
    .reverse()
    .map((c, i) => {
      const h = hours[ok.length - 1 - i];
      return `${x(h).toFixed(1)},${y(Math.max(c.mean - c.scaled_error, 0)).toFixed(1)}`;
    });
  const markX = x(departMinutes / 60);
  return `
    <svg class="sparkline" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">
      <polygon class="sparkline-band" points="${[...bandTop, ...bandBottom].join(" ")}" />
      <polyline class="sparkline-line" points="${line}" fill="none" />
      <line class="sparkline-depart" x1="${markX.toFixed(1)}" y1="0"
            x2="${markX.toFixed(1)}" y2="${height}" data-depart-min="${departMinutes}" />
    </svg>`;
}
