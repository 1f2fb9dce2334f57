/** Wires the map, report panel, curve plot, and chat panel together. */

import { ApiClient, ApiError } from "./api.js";
import { sendChat } from "./chat.js";
import { toRequestVertices } from "./geometry.js";
import { MapView } from "./map.js";
import { drawCurve } from "./plot.js";
import { UiState } from "./state.js";
import { reportView, type ReportView } from "./viewmodel.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function startApp(): void {
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("api") ?? "");
  const state = new UiState();

  const mapCanvas = el<HTMLCanvasElement>("map");
  const map = new MapView(mapCanvas, {
    tileUrlTemplate: params.get("tiles"),
    onChange: (vertices) => {
      state.vertices = vertices;
      updateControls();
    },
  });

  const banner = el<HTMLDivElement>("banner");
  const analyzeBtn = el<HTMLButtonElement>("analyze");
  const clearBtn = el<HTMLButtonElement>("clear");
  const undoBtn = el<HTMLButtonElement>("undo");
  const fromInput = el<HTMLInputElement>("from");
  const toInput = el<HTMLInputElement>("to");
  const degreeInput = el<HTMLInputElement>("degree");
  const chatInput = el<HTMLInputElement>("chat-input");
  const chatSend = el<HTMLButtonElement>("chat-send");

  function showBanner(text: string, tone: "error" | "warn" | "ok" | "none"): void {
    banner.textContent = text;
    banner.className = tone === "none" ? "banner hidden" : `banner banner-${tone}`;
  }

  function updateControls(): void {
    const problem = state.polygonProblem();
    analyzeBtn.disabled = problem !== null;
    analyzeBtn.title = problem ?? "run the analysis";
    if (problem && state.vertices.length > 0) {
      showBanner(problem, "warn");
    } else if (!problem) {
      showBanner("", "none");
    }
    const chatReady = state.chatEnabled();
    chatInput.disabled = !chatReady;
    chatSend.disabled = !chatReady;
    chatInput.placeholder = chatReady
      ? "ask about this area…"
      : "run an analysis first to enable chat";
  }

  function renderReport(view: ReportView): void {
    const badge = el<HTMLSpanElement>("class-badge");
    badge.textContent = view.badge.label;
    badge.className = `badge ${view.badge.tone}`;
    el<HTMLSpanElement>("presence").textContent = view.presence ?? "—";

    const table = el<HTMLTableElement>("features");
    table.innerHTML = "";
    for (const [label, value] of view.features) {
      const row = table.insertRow();
      row.insertCell().textContent = label;
      row.insertCell().textContent = value;
    }

    const warnings = el<HTMLUListElement>("warnings");
    warnings.innerHTML = "";
    for (const w of view.warnings) {
      const li = document.createElement("li");
      li.textContent = w;
      warnings.appendChild(li);
    }

    const fires = el<HTMLUListElement>("fires");
    fires.innerHTML = "";
    if (view.fires.length === 0) {
      const li = document.createElement("li");
      li.textContent = "no fire events in range";
      li.className = "muted";
      fires.appendChild(li);
    }
    for (const f of view.fires) {
      const li = document.createElement("li");
      li.textContent = f;
      fires.appendChild(li);
    }

    const llm = el<HTMLTableElement>("llm");
    llm.innerHTML = "";
    for (const [label, value] of view.llmRows) {
      const row = llm.insertRow();
      row.insertCell().textContent = label.replace(/_/g, " ");
      row.insertCell().textContent = value;
    }

    drawCurve(el<HTMLCanvasElement>("plot"), view.curve);
  }

  function renderTranscript(): void {
    const log = el<HTMLDivElement>("chat-log");
    log.innerHTML = "";
    for (const entry of state.transcript) {
      const div = document.createElement("div");
      div.className = `chat-entry chat-${entry.role}`;
      div.textContent = entry.text;
      log.appendChild(div);
    }
    log.scrollTop = log.scrollHeight;
  }

  async function runAnalysis(): Promise<void> {
    const problem = state.polygonProblem();
    if (problem) {
      showBanner(problem, "warn");
      return;
    }
    const controller = state.beginAnalyze();
    analyzeBtn.textContent = "analyzing…";
    try {
      const result = await api.analyze(
        {
          polygon: { vertices: toRequestVertices(state.vertices) },
          from: fromInput.value || undefined,
          to: toInput.value || undefined,
          fit_degree: Number(degreeInput.value) || 3,
          include_llm: true,
        },
        controller.signal,
      );
      state.finishAnalyze(controller, result.report);
      renderReport(reportView(result.report, result.insufficient));
      if (result.insufficient) {
        showBanner("insufficient data in this window — partial report shown", "warn");
      } else if (result.llmFailed) {
        showBanner("LLM narrative unavailable; rule-based report shown", "warn");
      } else {
        showBanner("", "none");
      }
    } catch (err) {
      state.finishAnalyze(controller, null);
      if (err instanceof DOMException && err.name === "AbortError") {
        return; // superseded by a newer submission
      }
      const text = err instanceof ApiError
        ? `analysis failed: ${err.detail}`
        : `service unreachable: ${err}`;
      showBanner(text, "error");
    } finally {
      analyzeBtn.textContent = "Analyze";
      updateControls();
    }
  }

  analyzeBtn.addEventListener("click", () => void runAnalysis());
  clearBtn.addEventListener("click", () => {
    state.clearPolygon();
    map.setVertices([]);
    updateControls();
  });
  undoBtn.addEventListener("click", () => {
    state.removeLastVertex();
    map.setVertices(state.vertices);
    updateControls();
  });

  async function submitChat(): Promise<void> {
    const message = chatInput.value.trim();
    if (!message) return;
    chatInput.value = "";
    await sendChat(state, api, message);
    renderTranscript();
  }

  chatSend.addEventListener("click", () => void submitChat());
  chatInput.addEventListener("keydown", (e) => {
    if (e.key === "Enter") void submitChat();
  });

  api
    .manifest()
    .then((manifest) => {
      const counted = Object.keys(manifest.counts);
      if (counted.length > 0) {
        const region = manifest.regions.find(
          (r) => String(r.region_id) === counted[0],
        );
        if (region) {
          map.focus(
            {
              lat: (region.lat_min + region.lat_max) / 2,
              lon: (region.lon_min + region.lon_max) / 2,
            },
            Math.min(region.lat_max - region.lat_min, 1.0),
          );
        }
      }
      showBanner("", "none");
    })
    .catch(() => showBanner("service unreachable — check the API URL", "error"));

  map.render();
  updateControls();
}

startApp();
