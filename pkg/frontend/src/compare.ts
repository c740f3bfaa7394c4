// Side-by-side comparison of selected path cards, with the departure-time
// sensitivity sparkline for the queried mode.

import { PathRisk, SweepCell } from "./api.js";
import { formatDuration, formatProbability } from "./format.js";
import { renderSparkline } from "./sparkline.js";

export function renderComparePanel(
  picks: { index: number; path: PathRisk }[],
  sweep: SweepCell[] | null,
  departMinutes: number
): HTMLElement {
  const panel = document.createElement("section");
  panel.className = "compare-panel";
  if (picks.length === 0) {
    panel.innerHTML = `<p class="compare-empty">Pick cards above to compare them side by side.</p>`;
    return panel;
  }
  const columns = picks
    .map(
      ({ index, path }) => `
      <div class="compare-col" data-index="${index}" data-risk="${path.mean_probability}">
        <h3>Option ${index + 1}</h3>
        <p class="compare-time">${formatDuration(path.travel_time_h)}</p>
        <p class="compare-risk">${formatProbability(path.mean_probability)}
           <span class="compare-se">&plusmn; ${formatProbability(path.std_error)}</span></p>
        <p class="compare-modes">${path.segments.map((s) => s.mode).join(" &rarr; ") || "door to door"}</p>
      </div>`
    )
    .join("");
  const spark = sweep
    ? `<figure class="compare-sensitivity">
         ${renderSparkline(sweep, departMinutes)}
         <figcaption>risk by departure time; the line marks yours</figcaption>
       </figure>`
    : "";
  panel.innerHTML = `<div class="compare-grid">${columns}</div>${spark}`;
  return panel;
}
