// Display formatting only: values rendered into the DOM keep their raw
// payload form in data attributes so nothing is lost to rounding.

export function formatProbability(p: number): string {
  if (p === 0) return "0%";
  const pct = p * 100;
  if (pct >= 0.01) return `${pct.toFixed(3)}%`;
  return `${pct.toExponential(2)}%`;
}

export function formatDuration(hours: number): string {
  const minutes = Math.round(hours * 60);
  if (minutes < 60) return `${minutes} min`;
  return `${Math.floor(minutes / 60)} h ${minutes % 60} min`;
}

export function formatMoney(amount: number): string {
  return `$${amount.toFixed(2)}`;
}

/** "08:03" -> 483 (minutes since midnight); NaN when malformed. */
export function parseTimeOfDay(text: string): number {
  const match = /^(\d{1,2}):(\d{2})$/.exec(text.trim());
  if (!match) return NaN;
  const h = Number(match[1]);
  const m = Number(match[2]);
  if (h > 23 || m > 59) return NaN;
  return h * 60 + m;
}

/** Departure times align to the sweep cache granularity of 5 minutes. */
export function snapToFiveMinutes(text: string): string {
  const minutes = parseTimeOfDay(text);
  if (Number.isNaN(minutes)) return text;
  const snapped = (Math.round(minutes / 5) * 5) % 1440;
  const h = String(Math.floor(snapped / 60)).padStart(2, "0");
  const m = String(snapped % 60).padStart(2, "0");
  return `${h}:${m}`;
}
