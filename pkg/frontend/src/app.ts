// The explorer: a query form, path cards with error bars, and a compare
// panel. All numbers come from the API; the client only formats them.
//
// Request discipline: one in-flight /risk call per form. Every submit
// bumps a sequence number and aborts the previous call; a reply is
// applied only when its sequence number is still the latest, so
// out-of-order responses can never overwrite newer ones.

import { ApiClient, ApiError, PathRisk, RiskResponse, SweepCell } from "./api.js";
import { renderNoPath, renderPathCard, sortPaths, SortKey } from "./cards.js";
import { renderComparePanel } from "./compare.js";
import { formatProbability, parseTimeOfDay, snapToFiveMinutes } from "./format.js";
import { MODES, QueryFormState, toRiskRequest, validateForm } from "./form.js";

const LAYOUT = `
  <form class="query-form" id="query-form">
    <label>from <select id="origin" required></select></label>
    <label>to <select id="destination" required></select></label>
    <label>depart <input id="depart" value="08:00" size="5"></label>
    <label>mode <select id="mode">${MODES.map((m) => `<option>${m}</option>`).join("")}</select></label>
    <label>paths <input id="k" type="number" value="1" min="1" max="5"></label>
    <button id="submit" type="submit" disabled>estimate risk</button>
    <label>sort by <select id="sort">
      <option value="time">travel time</option>
      <option value="risk">infection risk</option>
    </select></label>
  </form>
  <p id="status" class="status"></p>
  <div id="summary" class="summary"></div>
  <div id="results" class="results"></div>
  <div id="compare"></div>
`;

export class Explorer {
  private seq = 0;
  private inflight: AbortController | null = null;
  private lastResponse: RiskResponse | null = null;
  private lastOrder: PathRisk[] = [];
  private sortKey: SortKey = "time";
  private readonly sweepCache = new Map<string, SweepCell[]>();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient
  ) {}

  async init(): Promise<void> {
    this.root.innerHTML = LAYOUT;
    const form = this.el<HTMLFormElement>("#query-form");
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
    for (const id of ["#origin", "#destination", "#mode", "#k"]) {
      this.el(id).addEventListener("change", () => this.refreshValidity());
    }
    const depart = this.el<HTMLInputElement>("#depart");
    depart.addEventListener("change", () => {
      depart.value = snapToFiveMinutes(depart.value);
      this.refreshValidity();
    });
    depart.addEventListener("input", () => this.refreshValidity());
    this.el<HTMLSelectElement>("#sort").addEventListener("change", (event) => {
      this.sortKey = (event.target as HTMLSelectElement).value as SortKey;
      this.renderResults(); // client-side reorder, no refetch
    });

    const zones = await this.api.zones();
    const options = zones
      .map((z) => `<option value="${z.id}">${z.id}</option>`)
      .join("");
    this.el<HTMLSelectElement>("#origin").innerHTML = `<option value=""></option>${options}`;
    this.el<HTMLSelectElement>("#destination").innerHTML = `<option value=""></option>${options}`;
    this.refreshValidity();
  }

  formState(): QueryFormState {
    return {
      originZone: this.el<HTMLSelectElement>("#origin").value,
      destinationZone: this.el<HTMLSelectElement>("#destination").value,
      depart: this.el<HTMLInputElement>("#depart").value,
      mode: this.el<HTMLSelectElement>("#mode").value,
      k: Number(this.el<HTMLInputElement>("#k").value),
    };
  }

  refreshValidity(): void {
    const problems = validateForm(this.formState());
    const button = this.el<HTMLButtonElement>("#submit");
    button.disabled = problems.length > 0;
    button.title = problems.join("; ");
  }

  async submit(): Promise<void> {
    const state = this.formState();
    if (validateForm(state).length > 0) return;
    const token = ++this.seq;
    this.inflight?.abort();
    this.inflight = new AbortController();
    this.setStatus("estimating…");
    try {
      const response = await this.api.risk(toRiskRequest(state), this.inflight.signal);
      if (token !== this.seq) return; // a newer request superseded this reply
      this.lastResponse = response;
      this.setStatus("");
      this.renderSummary(response);
      this.renderResults();
      void this.refreshCompare();
    } catch (err) {
      if (token !== this.seq) return;
      if (err instanceof DOMException && err.name === "AbortError") return;
      if (err instanceof ApiError && err.code === "NO_PATH") {
        this.lastResponse = null;
        this.renderSummaryEmpty();
        this.replaceResults(renderNoPath(err.message));
        this.setStatus("");
        return;
      }
      this.setStatus(err instanceof Error ? `error: ${err.message}` : "error");
    }
  }

  private renderSummary(response: RiskResponse): void {
    const summary = this.el("#summary");
    summary.innerHTML = `
      <span class="summary-label">trip risk</span>
      <strong class="summary-risk" data-risk="${response.mean_probability}">
        ${formatProbability(response.mean_probability)}</strong>
      <span class="summary-se">&plusmn; ${formatProbability(response.std_error)}</span>
      ${response.warnings.map((w) => `<span class="warning">${w}</span>`).join("")}`;
  }

  private renderSummaryEmpty(): void {
    this.el("#summary").innerHTML = "";
  }

  renderResults(): void {
    if (!this.lastResponse) return;
    this.lastOrder = sortPaths(this.lastResponse.paths, this.sortKey);
    const scaleMax = Math.max(
      ...this.lastResponse.paths.map((p) => p.mean_probability + p.std_error),
      0
    );
    const container = document.createElement("div");
    container.className = "results";
    container.id = "results";
    this.lastOrder.forEach((path, position) => {
      const card = renderPathCard(path, this.lastResponse!.paths.indexOf(path), scaleMax);
      card.dataset.position = String(position);
      card
        .querySelector(".compare-checkbox")!
        .addEventListener("change", () => void this.refreshCompare());
      container.appendChild(card);
    });
    this.el("#results").replaceWith(container);
  }

  private replaceResults(node: HTMLElement): void {
    const container = document.createElement("div");
    container.className = "results";
    container.id = "results";
    container.appendChild(node);
    this.el("#results").replaceWith(container);
  }

  async refreshCompare(): Promise<void> {
    if (!this.lastResponse) {
      this.el("#compare").innerHTML = "";
      return;
    }
    const picks: { index: number; path: PathRisk }[] = [];
    this.root.querySelectorAll<HTMLInputElement>(".compare-checkbox").forEach((box) => {
      if (!box.checked) return;
      const card = box.closest<HTMLElement>(".path-card")!;
      const index = Number(card.dataset.index);
      picks.push({ index, path: this.lastResponse!.paths[index] });
    });
    const state = this.formState();
    let sweep: SweepCell[] | null = null;
    if (picks.length > 0) {
      const cacheKey = `${state.mode}|zone:${state.destinationZone}`;
      try {
        if (!this.sweepCache.has(cacheKey)) {
          this.sweepCache.set(
            cacheKey,
            await this.api.sweep(state.mode, `zone:${state.destinationZone}`)
          );
        }
        sweep = this.sweepCache.get(cacheKey)!;
      } catch {
        sweep = null; // the compare table is still useful without the curve
      }
    }
    const panel = renderComparePanel(picks, sweep, parseTimeOfDay(state.depart));
    const slot = this.el("#compare");
    slot.innerHTML = "";
    slot.appendChild(panel);
  }

  private setStatus(text: string): void {
    this.el("#status").textContent = text;
  }

  private el<T extends HTMLElement = HTMLElement>(selector: string): T {
    const node = this.root.querySelector<T>(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node;
  }
}

export function mount(root: HTMLElement, baseUrl = ""): Explorer {
  const explorer = new Explorer(root, new ApiClient(baseUrl));
  void explorer.init();
  return explorer;
}
