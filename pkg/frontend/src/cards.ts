// Path result cards. Every probability is displayed together with its
// error bar; raw payload values ride along in data attributes.

import { PathRisk } from "./api.js";
import { formatDuration, formatMoney, formatProbability } from "./format.js";

export type SortKey = "time" | "risk";

export function sortPaths(paths: PathRisk[], key: SortKey): PathRisk[] {
  const sorted = [...paths];
  if (key === "time") {
    sorted.sort((a, b) => a.travel_time_h - b.travel_time_h);
  } else {
    sorted.sort((a, b) => a.mean_probability - b.mean_probability);
  }
  return sorted;
}

function errorBar(mean: number, se: number, scaleMax: number): string {
  // bar spans [mean - se, mean + se], clipped at zero, on a shared scale
  const upper = Math.min(mean + se, scaleMax || 1);
  const lower = Math.max(mean - se, 0);
  const left = scaleMax > 0 ? (100 * lower) / scaleMax : 0;
  const width = scaleMax > 0 ? (100 * (upper - lower)) / scaleMax : 0;
  const center = scaleMax > 0 ? (100 * mean) / scaleMax : 0;
  return `
    <div class="error-bar" data-se="${se}">
      <div class="error-bar-fill" style="left:${left}%;width:${width}%"></div>
      <div class="error-bar-mean" style="left:${center}%"></div>
    </div>`;
}

function segmentRows(path: PathRisk): string {
  return path.segments
    .map(
      (s) => `
      <tr class="segment-row" data-mode="${s.mode}"
          data-contact-mean="${s.contact_mean}" data-contact-se="${s.contact_se}"
          data-surface-mean="${s.surface_mean}" data-surface-se="${s.surface_se}">
        <td>${s.mode}</td>
        <td>${formatDuration(s.duration_h)}</td>
        <td>${formatProbability(s.contact_mean)} &plusmn; ${formatProbability(s.contact_se)}</td>
        <td>${formatProbability(s.surface_mean)} &plusmn; ${formatProbability(s.surface_se)}</td>
      </tr>`
    )
    .join("");
}

export function renderPathCard(path: PathRisk, index: number, scaleMax: number): HTMLElement {
  const card = document.createElement("article");
  card.className = "path-card";
  card.dataset.index = String(index);
  card.dataset.risk = String(path.mean_probability);
  card.dataset.stdError = String(path.std_error);
  card.dataset.travelTimeH = String(path.travel_time_h);
  const a = path.attributes;
  card.innerHTML = `
    <header>
      <label class="compare-pick"><input type="checkbox" class="compare-checkbox"> compare</label>
      <span class="path-time">${formatDuration(path.travel_time_h)}</span>
      <span class="path-choice">chosen ${(path.choice_prob * 100).toFixed(0)}% of the time</span>
    </header>
    <div class="path-risk">
      <span class="risk-value">${formatProbability(path.mean_probability)}</span>
      <span class="risk-se">&plusmn; ${formatProbability(path.std_error)}</span>
    </div>
    ${errorBar(path.mean_probability, path.std_error, scaleMax)}
    <dl class="path-attrs">
      <div><dt>walk</dt><dd>${formatDuration(a.walk_time_h)}</dd></div>
      <div><dt>wait</dt><dd>${formatDuration(a.wait_time_h)}</dd></div>
      <div><dt>in vehicle</dt><dd>${formatDuration(a.in_vehicle_time_h)}</dd></div>
      <div><dt>fare</dt><dd>${formatMoney(a.monetary_cost)}</dd></div>
    </dl>
    <table class="segments">
      <thead><tr><th>segment</th><th>time</th><th>contact risk</th><th>surface risk</th></tr></thead>
      <tbody>${segmentRows(path)}</tbody>
    </table>`;
  return card;
}

export function renderNoPath(detail: string): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "no-path";
  panel.innerHTML = `
    <p class="no-path-title">No route found</p>
    <p class="no-path-detail">${detail}</p>
    <p class="no-path-hint">Try a different mode or a closer origin zone.</p>`;
  return panel;
}
