// Live-server integration: the nine core family example instructions get
// the right FAST/SLOW badge through the real event stream, and every slow
// family populates the plan panel.

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { openStream, StreamHandle } from "../src/events.js";
import { initialState, reduce, ViewState } from "../src/state.js";

const PORT = 8931 + Math.floor(Math.random() * 500);
const BASE = `http://127.0.0.1:${PORT}`;

// The nine-family instruction set: three fast, six slow.
const CASES: { family: string; label: "FAST" | "SLOW" }[] = [
  { family: "pick_color", label: "FAST" },
  { family: "pick_place_box", label: "FAST" },
  { family: "pick_toy_box", label: "FAST" },
  { family: "math_reasoning", label: "SLOW" },
  { family: "word_correction", label: "SLOW" },
  { family: "color_sort", label: "SLOW" },
  { family: "intent_recognition", label: "SLOW" },
  { family: "rearrange", label: "SLOW" },
  { family: "stack_order", label: "SLOW" },
];

let server: ChildProcess | null = null;

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/v1/bank/classify?text=ping+the+server`);
      if (resp.status < 500) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("server did not come up");
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "twolane-console-"));
  const config = join(dir, "config.yaml");
  writeFileSync(config, `server:\n  listen_addr: 127.0.0.1:${PORT}\n`);
  server = spawn("python3", ["-m", "twolane.cli", "serve", "--config", config], {
    stdio: "ignore",
  });
  await waitForServer();
}, 40_000);

afterAll(() => {
  server?.kill();
});

async function runEpisode(family: string): Promise<ViewState> {
  const api = new ApiClient(BASE);
  const sessionId = await api.createSession("auto");
  let state = initialState(sessionId);
  let done: () => void = () => {};
  const finished = new Promise<void>((resolve) => (done = resolve));
  const stream: StreamHandle = openStream(BASE, sessionId, {
    onEvent(event) {
      state = reduce(state, event);
      if (event.kind === "episode_done") done();
    },
  });
  try {
    const info = await api.reset(sessionId, 5, family);
    expect(info.instruction_hint.length).toBeGreaterThan(0);
    await api.submitInstruction(sessionId, info.instruction_hint);
    await Promise.race([
      finished,
      new Promise((_, reject) => setTimeout(() => reject(new Error("episode timeout")), 15_000)),
    ]);
  } finally {
    stream.close();
  }
  return state;
}

describe("nine-family console run against a live server", () => {
  for (const { family, label } of CASES) {
    it(
      `${family}: badge ${label}${label === "SLOW" ? " with a populated plan panel" : ""}`,
      async () => {
        const state = await runEpisode(family);
        expect(state.episode?.label).toBe(label);
        expect(state.episode?.done).toBe(true);
        expect(state.episode?.success).toBe(true);
        if (label === "SLOW") {
          expect(state.episode!.steps.length).toBeGreaterThan(0);
          expect(state.episode!.steps.every((s) => s.state === "done")).toBe(true);
        }
        expect(state.scene).not.toBeNull();
      },
      30_000,
    );
  }
});
