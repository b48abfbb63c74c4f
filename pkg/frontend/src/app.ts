/**
 * Explorer application: wires the API client, spectrogram, drill-down table,
 * and exports together. All analysis data is fetched; the only client-side
 * state is the ViewState (selection, ranges, overlay list).
 *
 * Version conflicts (another tab changed the session) surface as a banner
 * with an explicit "Refresh & retry" action; nothing retries silently.
 */

import { AnalysisClient, ApiError, StaleVersionError } from "./api.js";
import type { ImportConfig, SessionHandle, SpectrumPoint, YearRefs } from "./api.js";
import { overlayDeltas, renderSpectrogram } from "./chart.js";
import { buildSeminalRows, seminalCsv } from "./seminal.js";
import { createViewState, selectYear, setYearRange, toggleVariant } from "./state.js";
import type { ViewState } from "./state.js";
import { renderYearTable } from "./table.js";

export class ExplorerApp {
  state: ViewState = createViewState();
  session: SessionHandle | null = null;
  spectrum: SpectrumPoint[] = [];
  currentYear: YearRefs | null = null;

  private readonly root: HTMLElement;
  private readonly client: AnalysisClient;

  constructor(root: HTMLElement, client: AnalysisClient = new AnalysisClient("")) {
    this.root = root;
    this.client = client;
    this.root.innerHTML = `
      <div class="banner" hidden></div>
      <section class="loader">
        <h2>Load a corpus</h2>
        <label>Export file <input type="file" class="export-file"></label>
        <label>or workspace file <input type="file" class="workspace-file"></label>
        <label>RPY <input class="rpy-lo" type="number" value="1900"> –
          <input class="rpy-hi" type="number" value="1995"></label>
        <label>PY <input class="py-lo" type="number" value="1962"> –
          <input class="py-hi" type="number" value="2018"></label>
      </section>
      <section class="session" hidden>
        <div class="session-info"></div>
        <div class="toolbar">
          <button class="cluster-button">Cluster + merge (0.75, volume+page)</button>
          <button class="remove-once-button">Drop once-cited</button>
          <label>Overlay session id <input class="overlay-id" type="text" size="18"></label>
          <button class="overlay-button">Overlay</button>
          <button class="save-workspace-button">Save workspace</button>
          <button class="seminal-button" disabled title="annotate variants first">
            Export seminal list</button>
        </div>
        <div class="chart-area"></div>
        <div class="overlay-deltas" hidden></div>
        <div class="peaks-list"></div>
        <div class="drilldown"></div>
      </section>
    `;
    this.bindLoader();
    this.bindToolbar();
  }

  private q<T extends HTMLElement>(selector: string): T {
    const node = this.root.querySelector(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node as T;
  }

  private showBanner(text: string, retry?: () => void) {
    const banner = this.q<HTMLElement>(".banner");
    banner.hidden = false;
    banner.textContent = text;
    if (retry) {
      const button = document.createElement("button");
      button.className = "retry-button";
      button.textContent = "Refresh & retry";
      button.addEventListener("click", () => {
        banner.hidden = true;
        retry();
      });
      banner.appendChild(button);
    }
  }

  private clearBanner() {
    const banner = this.q<HTMLElement>(".banner");
    banner.hidden = true;
    banner.textContent = "";
  }

  /** Wrap a mutation: stale versions prompt, API errors report, nothing retries itself. */
  private async mutate(action: () => Promise<SessionHandle>, retry: () => void): Promise<boolean> {
    try {
      this.session = await action();
      this.clearBanner();
      return true;
    } catch (err) {
      if (err instanceof StaleVersionError) {
        this.showBanner(
          `This session changed elsewhere (now version ${err.currentVersion}).`,
          retry,
        );
      } else if (err instanceof ApiError) {
        this.showBanner(`Request failed: ${err.message}`);
      } else {
        this.showBanner("Service unreachable; your view is unchanged.", retry);
      }
      return false;
    }
  }

  private importConfig(): ImportConfig {
    const num = (sel: string) => Number(this.q<HTMLInputElement>(sel).value);
    return {
      rpy: { lo: num(".rpy-lo"), hi: num(".rpy-hi"), keep_missing: false },
      py: { lo: num(".py-lo"), hi: num(".py-hi"), keep_missing: false },
      max_cr: 0,
    };
  }

  private bindLoader() {
    this.q<HTMLInputElement>(".export-file").addEventListener("change", async (event) => {
      const file = (event.target as HTMLInputElement).files?.[0];
      if (!file) return;
      await this.openExport(await file.text());
    });
    this.q<HTMLInputElement>(".workspace-file").addEventListener("change", async (event) => {
      const file = (event.target as HTMLInputElement).files?.[0];
      if (!file) return;
      try {
        this.session = await this.client.createSessionFromWorkspace(JSON.parse(await file.text()));
        await this.afterSessionLoad();
      } catch (err) {
        this.showBanner(`Could not load workspace: ${err instanceof Error ? err.message : err}`);
      }
    });
  }

  async openExport(exportText: string): Promise<void> {
    const config = this.importConfig();
    try {
      this.session = await this.client.createSessionFromExport(exportText, config);
    } catch (err) {
      this.showBanner(`Import failed: ${err instanceof Error ? err.message : err}`);
      return;
    }
    this.state = setYearRange(this.state, config.rpy.lo, config.rpy.hi);
    await this.afterSessionLoad();
  }

  private async afterSessionLoad() {
    if (!this.session) return;
    this.state = { ...this.state, sessionId: this.session.session_id };
    this.q<HTMLElement>(".session").hidden = false;
    await this.refresh();
  }

  private bindToolbar() {
    this.q<HTMLButtonElement>(".cluster-button").addEventListener("click", async () => {
      if (!this.session) return;
      const run = async () => {
        const ok = await this.mutate(
          () =>
            this.client.clusterMerge(
              this.session!.session_id,
              { threshold: 0.75, use_volume: true, use_page: true, use_doi: false },
              this.session!.version,
            ),
          () => void this.refresh().then(run),
        );
        if (ok) await this.refresh();
      };
      await run();
    });
    this.q<HTMLButtonElement>(".remove-once-button").addEventListener("click", async () => {
      if (!this.session) return;
      const run = async () => {
        const ok = await this.mutate(
          () => this.client.removeNcr(this.session!.session_id, 0, 1, this.session!.version),
          () => void this.refresh().then(run),
        );
        if (ok) await this.refresh();
      };
      await run();
    });
    this.q<HTMLButtonElement>(".overlay-button").addEventListener("click", async () => {
      const overlayId = this.q<HTMLInputElement>(".overlay-id").value.trim();
      if (!overlayId) return;
      this.state = { ...this.state, overlaySessions: [overlayId] };
      await this.refresh();
    });
    this.q<HTMLButtonElement>(".save-workspace-button").addEventListener("click", async () => {
      if (!this.session) return;
      const doc = await this.client.exportWorkspace(this.session.session_id);
      downloadText(JSON.stringify(doc, null, 1), "session.rpys.json", "application/json");
    });
    this.q<HTMLButtonElement>(".seminal-button").addEventListener("click", async () => {
      if (!this.session) return;
      const rows = await buildSeminalRows(this.client, this.session.session_id);
      if (rows.length === 0) return;
      downloadText(seminalCsv(rows), "seminal_list.csv", "text/csv");
    });
  }

  /** Re-fetch everything the current view shows (info, spectrum, peaks, drill-down). */
  async refresh(): Promise<void> {
    if (!this.session) return;
    const id = this.session.session_id;
    try {
      this.session = await this.client.getSession(id);
      const [lo, hi] = this.state.yearRange;
      this.spectrum = await this.client.getSpectrum(id, lo, hi);
      const peaks = await this.client.getPeaks(id);
      const doc = await this.client.exportWorkspace(id);

      const info = this.session.info;
      this.q<HTMLElement>(".session-info").textContent =
        `session ${id} · v${this.session.version} · ${info.records} records · ` +
        `${info.cr_mentions} mentions · ${info.distinct_variants} variants`;

      let overlay = null;
      if (this.state.overlaySessions.length) {
        const overlayId = this.state.overlaySessions[0];
        try {
          overlay = { name: overlayId, points: await this.client.getSpectrum(overlayId, lo, hi) };
        } catch {
          this.showBanner(`Overlay session ${overlayId} is not reachable.`);
        }
      }
      renderSpectrogram(this.q(".chart-area"), this.spectrum, {
        peaks: peaks.map((p) => p.rpy),
        overlay,
        onYearClick: (rpy) => void this.openYear(rpy),
      });
      this.renderOverlayDeltas(overlay);
      this.renderPeaks(peaks.map((p) => p.rpy));

      const seminalButton = this.q<HTMLButtonElement>(".seminal-button");
      const annotated = Object.keys(doc.annotations ?? {}).length;
      seminalButton.disabled = annotated === 0;
      seminalButton.title = annotated === 0 ? "annotate variants first" : `${annotated} annotated`;

      if (this.state.selectedRpy !== null) {
        await this.openYear(this.state.selectedRpy, true);
      }
    } catch (err) {
      this.showBanner("Service unreachable; your view is unchanged.", () => void this.refresh());
    }
  }

  private renderOverlayDeltas(overlay: { name: string; points: SpectrumPoint[] } | null) {
    const box = this.q<HTMLElement>(".overlay-deltas");
    if (!overlay) {
      box.hidden = true;
      box.textContent = "";
      return;
    }
    const deltas = overlayDeltas(this.spectrum, overlay.points);
    const changed = deltas.filter((d) => d.delta !== 0);
    box.hidden = false;
    box.textContent = changed.length
      ? "Δncr vs overlay: " + changed.map((d) => `${d.rpy}:${d.delta > 0 ? "+" : ""}${d.delta}`).join(" ")
      : "Overlay is identical over the visible years (all deltas 0).";
  }

  private renderPeaks(years: number[]) {
    const list = this.q<HTMLElement>(".peaks-list");
    list.textContent = "peaks: ";
    for (const year of years) {
      const chip = document.createElement("button");
      chip.className = "peak-chip";
      chip.textContent = String(year);
      chip.addEventListener("click", () => void this.openYear(year));
      list.appendChild(chip);
    }
  }

  async openYear(rpy: number, keepSelection = false): Promise<void> {
    if (!this.session) return;
    this.state = keepSelection
      ? { ...this.state, selectedRpy: rpy }
      : selectYear(this.state, rpy);
    this.currentYear = await this.client.getYearRefs(this.session.session_id, rpy);
    this.renderDrilldown();
  }

  private renderDrilldown() {
    if (!this.currentYear) return;
    renderYearTable(this.q(".drilldown"), this.currentYear, this.state.selectedVariants, {
      onToggle: (variantId) => {
        this.state = toggleVariant(this.state, variantId);
        this.renderDrilldown();
      },
      onMerge: (ids) => void this.mergeSelected(ids),
      onSplit: (variantId) => void this.splitVariant(variantId),
      onAnnotate: (variantId, text) => void this.annotateVariant(variantId, text),
    });
  }

  async mergeSelected(ids: string[]): Promise<void> {
    if (!this.session || ids.length < 2) return;
    const run = async () => {
      const ok = await this.mutate(
        () => this.client.mergeVariants(this.session!.session_id, ids, this.session!.version),
        () => void this.refresh().then(run),
      );
      if (ok) {
        this.state = { ...this.state, selectedVariants: new Set() };
        await this.refresh();
      }
    };
    await run();
  }

  async splitVariant(variantId: string): Promise<void> {
    if (!this.session) return;
    const ok = await this.mutate(
      () => this.client.splitVariant(this.session!.session_id, variantId, this.session!.version),
      () => void this.refresh(),
    );
    if (ok) await this.refresh();
  }

  async annotateVariant(variantId: string, text: string): Promise<void> {
    if (!this.session) return;
    const ok = await this.mutate(
      () => this.client.annotate(this.session!.session_id, variantId, text, this.session!.version),
      () => void this.refresh(),
    );
    if (ok) await this.refresh();
  }
}

function downloadText(content: string, filename: string, mime: string) {
  const blob = new Blob([content], { type: mime });
  const url = URL.createObjectURL(blob);
  const link = document.createElement("a");
  link.href = url;
  link.download = filename;
  link.click();
  URL.revokeObjectURL(url);
}

export function mount(root: HTMLElement, baseUrl = ""): ExplorerApp {
  return new ExplorerApp(root, new AnalysisClient(baseUrl));
}
