// Console wiring: DOM, event stream, controls.

import { ApiClient, BusyError } from "./api.js";
import { openStream, StreamHandle } from "./events.js";
import { layoutScene, SnapshotError } from "./layout.js";
import { drawScene } from "./render.js";
import { initialState, reduce, RunMode, ViewState } from "./state.js";

const FAMILIES = [
  "math_reasoning", "word_correction", "color_sort", "intent_recognition",
  "pick_color", "pick_place_box", "pick_toy_box", "rotate",
  "simple_manipulation", "rearrange", "visual_reasoning_square",
  "stack_order", "stack_texture",
];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

let state: ViewState = initialState();
let api: ApiClient | null = null;
let stream: StreamHandle | null = null;

function setBanner(text: string | null): void {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = text ?? "";
  banner.style.display = text ? "block" : "none";
}

function render(): void {
  el<HTMLSpanElement>("session-id").textContent = state.sessionId ?? "—";
  el<HTMLSpanElement>("cursor").textContent = String(state.cursor);
  el<HTMLDivElement>("caption").textContent = state.caption;
  el<HTMLSpanElement>("hint").textContent = state.instructionHint ?? "";

  const badge = el<HTMLSpanElement>("badge");
  badge.textContent = state.episode?.label ?? "—";
  badge.className = `badge ${state.episode?.label === "FAST" ? "fast" : state.episode?.label === "SLOW" ? "slow" : ""}`;

  const neighbors = el<HTMLUListElement>("neighbors");
  neighbors.innerHTML = "";
  for (const n of state.episode?.neighbors ?? []) {
    const li = document.createElement("li");
    li.textContent = `${n.score.toFixed(4)}  ${n.text ?? `#${n.entry_id}`}`;
    neighbors.appendChild(li);
  }

  const plan = el<HTMLOListElement>("plan");
  plan.innerHTML = "";
  for (const step of state.episode?.steps ?? []) {
    const li = document.createElement("li");
    const mark = step.state === "done" ? "✓" : step.state === "failed" ? "✗" : "·";
    li.textContent = `${mark} ${step.text}`;
    li.className = step.state;
    plan.appendChild(li);
  }

  const verdict = el<HTMLDivElement>("verdict");
  if (state.episode?.done) {
    verdict.textContent = state.episode.success
      ? "episode succeeded"
      : `episode failed (${state.episode.failure?.stage ?? "?"}: ${state.episode.failure?.detail ?? ""})`;
    verdict.className = state.episode.success ? "ok" : "bad";
  } else {
    verdict.textContent = state.episode ? "running…" : "";
    verdict.className = "";
  }

  if (state.scene) {
    try {
      drawScene(el<HTMLCanvasElement>("board"), layoutScene(state.scene));
    } catch (err) {
      if (err instanceof SnapshotError) {
        setBanner(`scene snapshot rejected: ${err.message}`);
      } else {
        throw err;
      }
    }
  }
  el<HTMLButtonElement>("step-btn").disabled = state.runMode !== "step";
}

async function connect(): Promise<void> {
  const baseUrl = el<HTMLInputElement>("base-url").value.replace(/\/$/, "");
  const runMode = (el<HTMLSelectElement>("run-mode").value as RunMode) ?? "auto";
  api = new ApiClient(baseUrl);
  setBanner(null);
  try {
    const sessionId = await api.createSession(runMode);
    state = initialState(sessionId, runMode);
    stream?.close();
    stream = openStream(baseUrl, sessionId, {
      onEvent(event) {
        state = reduce(state, event);
        render();
      },
      onMalformed(detail) {
        setBanner(detail);
      },
      onStatus(status) {
        el<HTMLSpanElement>("stream-status").textContent = status;
      },
    });
    render();
  } catch (err) {
    setBanner(`connect failed: ${(err as Error).message}`);
  }
}

async function resetScene(): Promise<void> {
  if (!api || !state.sessionId) return;
  const family = el<HTMLSelectElement>("family").value;
  const seed = Number(el<HTMLInputElement>("seed").value) || 0;
  try {
    const info = await api.reset(state.sessionId, seed, family);
    el<HTMLInputElement>("instruction").value = info.instruction_hint;
    setBanner(null);
  } catch (err) {
    setBanner(`reset failed: ${(err as Error).message}`);
  }
}

async function submit(): Promise<void> {
  if (!api || !state.sessionId) return;
  const text = el<HTMLInputElement>("instruction").value;
  const button = el<HTMLButtonElement>("submit-btn");
  button.disabled = true;
  try {
    await api.submitInstruction(state.sessionId, text);
    setBanner(null);
  } catch (err) {
    if (err instanceof BusyError) {
      setBanner("session busy: an episode is already running");
    } else {
      setBanner(`submit failed: ${(err as Error).message} — retry when ready`);
    }
  } finally {
    button.disabled = false;
  }
}

function boot(): void {
  const familySelect = el<HTMLSelectElement>("family");
  for (const family of FAMILIES) {
    const option = document.createElement("option");
    option.value = family;
    option.textContent = family;
    familySelect.appendChild(option);
  }
  el<HTMLButtonElement>("connect-btn").addEventListener("click", () => void connect());
  el<HTMLButtonElement>("reset-btn").addEventListener("click", () => void resetScene());
  el<HTMLButtonElement>("submit-btn").addEventListener("click", () => void submit());
  el<HTMLButtonElement>("step-btn").addEventListener("click", () => {
    if (api && state.sessionId) void api.releaseStep(state.sessionId);
  });
  el<HTMLInputElement>("instruction").addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") void submit();
  });
  render();
}

boot();
