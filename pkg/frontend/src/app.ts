/** Explorer single-page app: upload -> diagnostics -> grouping -> preview.
 *
 * All numbers on screen come from service payloads; the client only
 * assembles requests and draws.  Grouping edits run through DraftHistory so
 * undo restores the exact prior draft, and every grouping change triggers a
 * sequenced preview request (stale responses are dropped, so the panel
 * always reflects the latest draft).
 */

import { ApiClient, ApiError } from "./api.js";
import {
  DraftHistory,
  GroupingDraft,
  addGroup,
  emptyDraft,
  labelGroup,
  mergeGroups,
  removeGroup,
  toGroupString,
  unassigned,
} from "./grouping.js";
import { reconstructionToCsv } from "./csv.js";
import {
  componentOverlay,
  lagNormPanel,
  pairedPlot,
  psiCurvePanel,
  screePlot,
  seriesColor,
  wcorHeatmap,
  SCREE_BAR_LIMIT,
} from "./plots.js";
import type { ReconstructionPayload, SummaryPayload } from "./types.js";

const api = new ApiClient("");

interface AppState {
  seriesId: string | null;
  decompositionId: string | null;
  r: number;
  summary: SummaryPayload | null;
  history: DraftHistory | null;
  selection: Set<number>;
  preview: ReconstructionPayload | null;
}

const state: AppState = {
  seriesId: null,
  decompositionId: null,
  r: 0,
  summary: null,
  history: null,
  selection: new Set(),
  preview: null,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(message: string, isError = false): void {
  const node = el<HTMLElement>("status");
  node.textContent = message;
  node.className = isError ? "status error" : "status";
}

async function withStatus<T>(label: string, work: () => Promise<T>): Promise<T | null> {
  setStatus(`${label}…`);
  try {
    const result = await work();
    setStatus("ready");
    return result;
  } catch (err) {
    if (err instanceof ApiError) setStatus(`${label} failed: ${err.message}`, true);
    else setStatus(`${label} failed: ${String(err)}`, true);
    return null;
  }
}

// --- upload & decompose -----------------------------------------------------

async function onDecompose(): Promise<void> {
  const csv = el<HTMLTextAreaElement>("csv-input").value;
  const L = Number(el<HTMLInputElement>("window-input").value);
  const dofRaw = el<HTMLInputElement>("dof-input").value.trim();
  await withStatus("decomposing", async () => {
    const series = await api.uploadSeries(csv);
    state.seriesId = series.series_id;
    const params = dofRaw.includes(",")
      ? { L, gcv: dofRaw.split(",").map((x) => Number(x.trim())) }
      : { L, d: Number(dofRaw) };
    const dec = await api.decompose(series.series_id, params);
    state.decompositionId = dec.decomposition_id;
    state.r = dec.r;
    state.summary = await api.summary(dec.decomposition_id);
    state.history = new DraftHistory(emptyDraft(dec.r));
    state.selection = new Set();
    state.preview = null;
    el<HTMLElement>("series-info").textContent =
      `series ${series.series_id}: N=${series.N}, n=${series.n}; ` +
      `decomposition ${dec.decomposition_id}: r=${dec.r}, d=${dec.d}, K=${dec.K}`;
    renderDiagnostics();
    renderGrouping();
    await renderPreview();
  });
}

// --- diagnostics -------------------------------------------------------------

function renderDiagnostics(): void {
  const summary = state.summary;
  if (!summary || !state.decompositionId) return;
  el<HTMLElement>("scree").innerHTML = screePlot(summary);
  const panel = el<HTMLElement>("per-component");
  const component = Math.min(
    Number(el<HTMLInputElement>("component-input").value) || 1,
    state.r,
  );
  const freq = summary.dominant_freqs[component - 1];
  panel.innerHTML =
    `<h4>component ${component} — dominant frequency ${String(freq)}</h4>` +
    `<div class="row"><figure><figcaption>within window (curve per lag)</figcaption>` +
    `${psiCurvePanel(summary, component - 1)}</figure>` +
    `<figure><figcaption>across window (norm per lag)</figcaption>` +
    `${lagNormPanel(summary, component - 1)}</figure>` +
    (component < state.r
      ? `<figure><figcaption>paired plot v${component} vs v${component + 1}</figcaption>` +
        `${pairedPlot(summary, component - 1, component)}</figure>`
      : "") +
    `</div>`;
  void renderSingletonWcor();
}

async function renderSingletonWcor(): Promise<void> {
  if (!state.decompositionId) return;
  const count = Math.min(state.r, SCREE_BAR_LIMIT);
  const groups = Array.from({ length: count }, (_, i) => [i + 1]);
  const payload = await api.wcor(state.decompositionId, groups);
  if (payload) el<HTMLElement>("wcor").innerHTML = wcorHeatmap(payload);
}

// --- grouping editor ----------------------------------------------------------

function currentDraft(): GroupingDraft | null {
  return state.history ? state.history.draft : null;
}

function applyEdit(edit: (draft: GroupingDraft) => GroupingDraft): void {
  if (!state.history) return;
  try {
    state.history.apply(edit);
  } catch (err) {
    setStatus(String(err instanceof Error ? err.message : err), true);
    return;
  }
  renderGrouping();
  void renderPreview();
}

function renderGrouping(): void {
  const draft = currentDraft();
  if (!draft) return;
  const pool = el<HTMLElement>("pool");
  pool.innerHTML = "";
  for (const i of unassigned(draft)) {
    const chip = document.createElement("button");
    chip.className = state.selection.has(i) ? "chip selected" : "chip";
    chip.textContent = String(i);
    chip.onclick = () => {
      if (state.selection.has(i)) state.selection.delete(i);
      else state.selection.add(i);
      renderGrouping();
    };
    pool.appendChild(chip);
  }
  const list = el<HTMLElement>("groups");
  list.innerHTML = "";
  draft.groups.forEach((group, at) => {
    const item = document.createElement("li");
    const name = document.createElement("input");
    name.value = group.name;
    name.onchange = () => applyEdit((d) => labelGroup(d, at, name.value));
    item.appendChild(name);
    const indices = document.createElement("span");
    indices.textContent = ` {${group.indices.join(", ")}} `;
    indices.style.color = seriesColor(at);
    item.appendChild(indices);
    if (at > 0) {
      const merge = document.createElement("button");
      merge.textContent = "merge ↑";
      merge.onclick = () => applyEdit((d) => mergeGroups(d, at - 1, at));
      item.appendChild(merge);
    }
    const drop = document.createElement("button");
    drop.textContent = "remove";
    drop.onclick = () => applyEdit((d) => removeGroup(d, at));
    item.appendChild(drop);
    list.appendChild(item);
  });
  el<HTMLButtonElement>("undo-btn").disabled = !state.history?.canUndo;
  el<HTMLButtonElement>("add-group-btn").disabled = state.selection.size === 0;
  try {
    el<HTMLElement>("group-string").textContent =
      draft.groups.length > 0 ? toGroupString(draft) : "(no groups yet)";
  } catch {
    el<HTMLElement>("group-string").textContent = "(no groups yet)";
  }
}

function onAddGroup(): void {
  const indices = [...state.selection].sort((a, b) => a - b);
  state.selection = new Set();
  applyEdit((d) => addGroup(d, indices));
}

function onUndo(): void {
  if (!state.history || !state.history.canUndo) return;
  state.history.undo();
  renderGrouping();
  void renderPreview();
}

// --- preview -------------------------------------------------------------------

/** Request bodies include the complement of the draft as a residual group so
 * the service computes it; the client never does arithmetic on curves. */
function previewGroups(draft: GroupingDraft): { groups: number[][]; labels: string[] } {
  const groups = draft.groups.map((g) => [...g.indices]);
  const labels = draft.groups.map((g) => g.name);
  const rest = unassigned(draft);
  if (rest.length > 0) {
    groups.push(rest);
    labels.push("residual");
  }
  return { groups, labels };
}

async function renderPreview(): Promise<void> {
  const draft = currentDraft();
  const target = el<HTMLElement>("preview");
  if (!draft || !state.decompositionId || draft.groups.length === 0) {
    target.innerHTML = "<p class=\"hint\">assemble at least one group to preview</p>";
    el<HTMLButtonElement>("csv-btn").disabled = true;
    state.preview = null;
    return;
  }
  const { groups, labels } = previewGroups(draft);
  const payload = await api.reconstruct(state.decompositionId, groups);
  if (payload === null) return; // a newer draft's preview already rendered
  state.preview = payload;
  target.innerHTML = payload.groups
    .map(
      (group, gi) =>
        `<figure><figcaption>${labels[gi]} — components {${group.indices.join(", ")}}</figcaption>` +
        componentOverlay(payload.s, group.curves, seriesColor(gi)) +
        `</figure>`,
    )
    .join("");
  el<HTMLButtonElement>("csv-btn").disabled = false;
}

function onDownloadCsv(): void {
  if (!state.preview) return;
  state.preview.groups.forEach((group, gi) => {
    const blob = new Blob([reconstructionToCsv(state.preview!, gi)], { type: "text/csv" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `component_${group.label}.csv`;
    link.click();
    URL.revokeObjectURL(link.href);
  });
}

// --- bootstrap -------------------------------------------------------------------

export function bootstrap(): void {
  el<HTMLButtonElement>("decompose-btn").onclick = () => void onDecompose();
  el<HTMLButtonElement>("add-group-btn").onclick = onAddGroup;
  el<HTMLButtonElement>("undo-btn").onclick = onUndo;
  el<HTMLButtonElement>("csv-btn").onclick = onDownloadCsv;
  el<HTMLInputElement>("component-input").onchange = renderDiagnostics;
  void api.health().then(
    (h) => setStatus(`connected to service v${h.version}`),
    () => setStatus("service unreachable — start it with: fssa serve", true),
  );
}

if (typeof document !== "undefined" && document.getElementById("decompose-btn")) {
  bootstrap();
}
