import { ApiClient, ApiError } from "./api.js";
import {
  bandPolygon,
  bandsValueRange,
  eraCatalog,
  streamBands,
  wordCloudSizes,
  EraTab,
} from "./analytics.js";
import { pollJob } from "./polling.js";
import { ReviewStore } from "./store.js";
import type { ClusterCard, DocumentInfo, EvolutionSeries, ThemeCount } from "./types.js";
import { MAX_THEMES, autocomplete, canAddTheme } from "./validation.js";

const api = new ApiClient();

type UiState = {
  documents: DocumentInfo[];
  store: ReviewStore | null;
  cardIndex: number;
  pendingThemes: string[];
  coherent: boolean;
  catalog: ThemeCount[];
  jobRunning: boolean;
  eraTab: EraTab;
  streamK: number;
  streamDirection: "top" | "bottom";
};

const state: UiState = {
  documents: [],
  store: null,
  cardIndex: 0,
  pendingThemes: [],
  coherent: true,
  catalog: [],
  jobRunning: false,
  eraTab: "all",
  streamK: 10,
  streamDirection: "top",
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function toast(message: string, kind: "info" | "error" = "info"): void {
  const box = el<HTMLDivElement>("toast");
  box.textContent = message;
  box.className = `toast ${kind}`;
  box.style.display = "block";
  window.setTimeout(() => (box.style.display = "none"), 4000);
}

function annotator(): string {
  return (el<HTMLInputElement>("annotator").value || "anonymous").trim();
}

// ---------------------------------------------------------------- documents

async function loadDocuments(): Promise<void> {
  state.documents = await api.getDocuments();
  const list = el<HTMLUListElement>("documents");
  list.innerHTML = "";
  for (const doc of state.documents) {
    const item = document.createElement("li");
    const era = doc.era === "pre_ai_act" ? "pre" : "post";
    item.innerHTML = `<button class="doc"><span class="badge ${era}">${era}</span> ${doc.doc_id} · ${doc.title} (${doc.year})</button>`;
    item.querySelector("button")!.addEventListener("click", () => openDocument(doc.doc_id));
    list.appendChild(item);
  }
  if (state.documents.length === 0) {
    list.innerHTML = '<li class="empty">No documents in this project yet.</li>';
  }
}

async function openDocument(docId: string): Promise<void> {
  state.store = new ReviewStore(api, docId, annotator());
  state.cardIndex = 0;
  try {
    await state.store.load();
  } catch (err) {
    state.store = null;
    if (err instanceof ApiError && err.status === 409) {
      toast(`Document ${docId} is not modelled yet - run the model stage first.`, "error");
    } else {
      toast(String(err), "error");
    }
    renderCard();
    return;
  }
  renderCard();
}

// -------------------------------------------------------------------- cards

function currentCard(): ClusterCard | null {
  if (!state.store || state.store.cards.length === 0) return null;
  return state.store.cards[state.cardIndex] ?? null;
}

function renderCard(): void {
  const host = el<HTMLDivElement>("card");
  const card = currentCard();
  if (!state.store || !card) {
    host.innerHTML = '<p class="empty">Pick a document to review its clusters.</p>';
    el<HTMLDivElement>("rerun-panel").style.display = "none";
    return;
  }
  el<HTMLDivElement>("rerun-panel").style.display = "block";
  state.pendingThemes = card.assignment ? [...card.assignment.themes] : [];
  state.coherent = card.assignment ? card.assignment.coherent : true;

  const doc = state.documents.find((d) => d.doc_id === card.doc_id);
  const stale = card.stale_assignment
    ? '<div class="banner">A previous assignment for this cluster is stale after a re-run; re-confirm or re-assign.</div>'
    : "";
  const terms = card.top_terms
    .map((t) => `<span class="term" title="${t.weight.toFixed(3)}">${escapeHtml(t.term)}</span>`)
    .join(" ");
  const reps = card.representatives
    .map((r) => `<li>${escapeHtml(r.text)} <span class="sim">${r.similarity.toFixed(2)}</span></li>`)
    .join("");
  host.innerHTML = `
    ${stale}
    <div class="card-head">
      <h2>${escapeHtml(doc ? doc.title : card.doc_id)} · topic ${card.topic_id}</h2>
      <span>${card.size} sentences · cluster ${state.cardIndex + 1}/${state.store.cards.length}</span>
    </div>
    <div class="terms">${terms}</div>
    <ul class="reps">${reps}</ul>
    <label class="coherent"><input type="checkbox" id="coherent" ${state.coherent ? "checked" : ""}/> cluster is coherent</label>
    <div id="chips" class="chips"></div>
    <div class="theme-entry">
      <input id="theme-input" placeholder="add theme (max ${MAX_THEMES})" autocomplete="off"/>
      <div id="suggestions" class="suggestions"></div>
      <span id="theme-hint" class="hint"></span>
    </div>
    <div class="actions">
      <button id="prev">&larr; previous</button>
      <button id="save" class="primary">Save assignment</button>
      <button id="next">next &rarr;</button>
    </div>
    <span id="save-error" class="error"></span>
  `;
  el<HTMLButtonElement>("prev").addEventListener("click", () => step(-1));
  el<HTMLButtonElement>("next").addEventListener("click", () => step(1));
  el<HTMLButtonElement>("save").addEventListener("click", saveCurrent);
  el<HTMLInputElement>("coherent").addEventListener("change", (event) => {
    state.coherent = (event.target as HTMLInputElement).checked;
    if (!state.coherent) state.pendingThemes = []; // incoherent clears chips
    renderChips();
  });
  const input = el<HTMLInputElement>("theme-input");
  input.addEventListener("input", renderSuggestions);
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") {
      addTheme(input.value);
      input.value = "";
      renderSuggestions();
    }
  });
  renderChips();
}

function step(delta: number): void {
  if (!state.store) return;
  const count = state.store.cards.length;
  state.cardIndex = Math.min(count - 1, Math.max(0, state.cardIndex + delta));
  renderCard();
}

function renderChips(): void {
  const host = el<HTMLDivElement>("chips");
  host.innerHTML = "";
  for (const theme of state.pendingThemes) {
    const chip = document.createElement("span");
    chip.className = "chip";
    chip.textContent = theme;
    const remove = document.createElement("button");
    remove.textContent = "x";
    remove.addEventListener("click", () => {
      state.pendingThemes = state.pendingThemes.filter((t) => t !== theme);
      renderChips();
    });
    chip.appendChild(remove);
    host.appendChild(chip);
  }
  const input = el<HTMLInputElement>("theme-input");
  const hint = el<HTMLSpanElement>("theme-hint");
  const full = state.pendingThemes.length >= MAX_THEMES;
  input.disabled = full || !state.coherent;
  if (!state.coherent) hint.textContent = "incoherent clusters carry no themes";
  else if (full) hint.textContent = `maximum of ${MAX_THEMES} themes reached`;
  else hint.textContent = "";
}

function addTheme(raw: string): void {
  if (!state.coherent) return;
  const checked = canAddTheme(state.pendingThemes, raw);
  if (!checked.ok) {
    toast(checked.reason, "error");
    return;
  }
  state.pendingThemes = checked.themes;
  renderChips();
}

function renderSuggestions(): void {
  const input = el<HTMLInputElement>("theme-input");
  const host = el<HTMLDivElement>("suggestions");
  const names = state.catalog.map((c) => c.theme);
  const matches = autocomplete(names, input.value);
  host.innerHTML = "";
  for (const match of matches) {
    const option = document.createElement("button");
    option.textContent = match;
    option.addEventListener("click", () => {
      addTheme(match);
      input.value = "";
      host.innerHTML = "";
    });
    host.appendChild(option);
  }
}

async function saveCurrent(): Promise<void> {
  const card = currentCard();
  if (!state.store || !card) return;
  state.store.annotator = annotator();
  const result = await state.store.save(card.topic_id, state.pendingThemes, state.coherent);
  const errorBox = el<HTMLSpanElement>("save-error");
  if (result.ok) {
    errorBox.textContent = "";
    toast(`Saved ${card.doc_id}/topic ${card.topic_id}`);
    await refreshAnalytics();
    renderCard();
  } else {
    errorBox.textContent = result.reason;
    renderCard();
  }
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

// -------------------------------------------------------------------- rerun

async function triggerRerun(): Promise<void> {
  if (!state.store || state.jobRunning) return;
  const minClusterSize = Number(el<HTMLInputElement>("mcs-slider").value);
  const button = el<HTMLButtonElement>("rerun");
  const spinner = el<HTMLSpanElement>("spinner");
  state.jobRunning = true;
  button.disabled = true;
  el<HTMLInputElement>("mcs-slider").disabled = true;
  spinner.style.display = "inline-block";
  try {
    const job = await api.rerun(state.store.docId, { min_cluster_size: minClusterSize });
    const finished = await pollJob(api, job.job_id, { intervalMs: 1000 });
    if (finished.status === "failed") {
      toast(`Re-run failed: ${finished.error ?? "unknown error"}`, "error");
    } else {
      toast(
        `Re-run done: ${finished.result?.topics} topics at min_cluster_size ${finished.result?.min_cluster_size}`,
      );
      await state.store.load();
      state.cardIndex = 0;
      renderCard();
      await refreshAnalytics();
    }
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      toast("A job is already running for this document.", "error");
    } else {
      toast(String(err), "error");
    }
  } finally {
    state.jobRunning = false;
    button.disabled = false;
    el<HTMLInputElement>("mcs-slider").disabled = false;
    spinner.style.display = "none";
  }
}

// ---------------------------------------------------------------- analytics

async function refreshAnalytics(): Promise<void> {
  state.catalog = await api.getThemes();
  renderWordCloud();
  await renderStream();
}

async function renderWordCloud(): Promise<void> {
  const host = el<HTMLDivElement>("wordcloud");
  let entries: ThemeCount[];
  if (state.eraTab === "all") {
    entries = state.catalog;
  } else {
    const series = await api.getEvolution(1000, "top");
    entries = eraCatalog(series, state.eraTab);
  }
  if (entries.length === 0) {
    host.innerHTML = '<p class="empty">No theme assignments yet.</p>';
    return;
  }
  host.innerHTML = wordCloudSizes(entries)
    .map(
      (s) =>
        `<span class="cloud-word" style="font-size:${s.fontPx.toFixed(1)}px" title="${s.count}">${escapeHtml(s.theme)}</span>`,
    )
    .join(" ");
}

async function renderStream(): Promise<void> {
  const host = el<HTMLDivElement>("stream");
  const series: EvolutionSeries[] = await api.getEvolution(state.streamK, state.streamDirection);
  if (series.length === 0) {
    host.innerHTML = '<p class="empty">No evolution data yet.</p>';
    return;
  }
  const bands = streamBands(series);
  const years = [...new Set(series.flatMap((s) => s.points.map((p) => p.year)))].sort(
    (a, b) => a - b,
  );
  const range = bandsValueRange(bands);
  const width = 640;
  const height = 240;
  const palette = ["#4c78a8", "#f58518", "#e45756", "#72b7b2", "#54a24b", "#eeca3b", "#b279a2", "#ff9da6", "#9d755d", "#bab0ac"];
  const polys = bands
    .map(
      (band, i) =>
        `<polygon points="${bandPolygon(band, years, range, width, height)}" fill="${palette[i % palette.length]}" fill-opacity="0.85"><title>${escapeHtml(band.theme)}</title></polygon>`,
    )
    .join("");
  const legend = bands
    .map(
      (band, i) =>
        `<span class="legend"><span class="swatch" style="background:${palette[i % palette.length]}"></span>${escapeHtml(band.theme)}</span>`,
    )
    .join(" ");
  host.innerHTML = `<svg viewBox="0 0 ${width} ${height}" width="100%">${polys}</svg><div>${legend}</div>`;
}

// -------------------------------------------------------------------- wiring

export async function start(): Promise<void> {
  el<HTMLButtonElement>("rerun").addEventListener("click", triggerRerun);
  el<HTMLInputElement>("mcs-slider").addEventListener("input", () => {
    el<HTMLSpanElement>("mcs-value").textContent = el<HTMLInputElement>("mcs-slider").value;
  });
  el<HTMLButtonElement>("refresh").addEventListener("click", async () => {
    await loadDocuments();
    if (state.store) await state.store.load();
    renderCard();
    await refreshAnalytics();
    toast("Refreshed from server (last write wins).");
  });
  for (const tab of ["all", "pre", "post"] as EraTab[]) {
    el<HTMLButtonElement>(`tab-${tab}`).addEventListener("click", async () => {
      state.eraTab = tab;
      document.querySelectorAll(".tab").forEach((n) => n.classList.remove("active"));
      el(`tab-${tab}`).classList.add("active");
      await renderWordCloud();
    });
  }
  el<HTMLSelectElement>("stream-k").addEventListener("change", async (event) => {
    state.streamK = Number((event.target as HTMLSelectElement).value);
    await renderStream();
  });
  el<HTMLSelectElement>("stream-direction").addEventListener("change", async (event) => {
    state.streamDirection = (event.target as HTMLSelectElement).value as "top" | "bottom";
    await renderStream();
  });
  await loadDocuments();
  await refreshAnalytics();
  renderCard();
}

if (typeof document !== "undefined" && document.getElementById("documents")) {
  start().catch((err) => console.error(err));
}
