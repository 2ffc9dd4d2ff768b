// Reducer semantics: pure projection of the event stream.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { SseParser, parseFrame } from "../src/events.js";
import { coerceEvent, initialState, reduce, replay } from "../src/state.js";
import type { ConsoleEvent } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

function fixtureEvents(): ConsoleEvent[] {
  const raw = readFileSync(join(here, "fixtures", "episode_stream.txt"), "utf-8");
  const parser = new SseParser();
  const events: ConsoleEvent[] = [];
  for (const frame of parser.push(raw)) {
    const event = parseFrame(frame);
    expect(event).not.toBeNull();
    events.push(event!);
  }
  return events;
}

describe("event replay", () => {
  it("reproduces the stored final view state from the recorded log", () => {
    const events = fixtureEvents();
    expect(events.length).toBeGreaterThan(4);
    const state = replay(events, "fixture");
    // Snapshot freezes the full final view state; semantic changes to the
    // reducer or the wire format must be deliberate.
    expect(state).toMatchSnapshot();
    // Structural claims of the recorded word-correction episode:
    expect(state.episode?.label).toBe("SLOW");
    expect(state.episode?.success).toBe(true);
    expect(state.episode?.steps.length).toBeGreaterThan(0);
    expect(state.episode?.steps.every((s) => s.state === "done")).toBe(true);
    expect(state.scene).not.toBeNull();
    expect(state.cursor).toBe(events[events.length - 1].seq);
  });

  it("is idempotent: replaying the log twice changes nothing", () => {
    const events = fixtureEvents();
    const once = replay(events);
    let twice = once;
    for (const event of events) {
      twice = reduce(twice, event); // duplicate seqs are no-ops
    }
    expect(twice).toEqual(once);
  });

  it("keeps the cursor monotone under out-of-order events", () => {
    const events = fixtureEvents();
    const shuffled = [...events].reverse();
    const state = replay(shuffled);
    // Only the first (highest-seq) event lands; earlier ones are stale.
    expect(state.cursor).toBe(events[events.length - 1].seq);
  });
});

describe("reducer steps", () => {
  const classified: ConsoleEvent = {
    kind: "classified",
    seq: 1,
    data: { episode_id: 0, label: "SLOW", neighbors: [{ entry_id: 3, score: 0.9 }] },
  };
  const planReady: ConsoleEvent = {
    kind: "plan_ready",
    seq: 2,
    data: { episode_id: 0, source: "oracle", steps: [{ index: 0, text: "pick up the red cube" }] },
  };

  it("tracks badge, plan, and per-step marks", () => {
    let state = reduce(initialState(), classified);
    expect(state.episode?.label).toBe("SLOW");
    state = reduce(state, planReady);
    expect(state.episode?.steps[0].state).toBe("pending");
    state = reduce(state, {
      kind: "step_status",
      seq: 3,
      data: { episode_id: 0, step_index: 0, status: "done" },
    });
    expect(state.episode?.steps[0].state).toBe("done");
    state = reduce(state, {
      kind: "episode_done",
      seq: 4,
      data: { episode_id: 0, success: true, failure: null },
    });
    expect(state.episode?.done).toBe(true);
    expect(state.episode?.success).toBe(true);
  });

  it("a failed step renders a cross and the failure detail", () => {
    let state = reduce(initialState(), classified);
    state = reduce(state, planReady);
    state = reduce(state, {
      kind: "step_status",
      seq: 3,
      data: { episode_id: 0, step_index: 0, status: "failed" },
    });
    state = reduce(state, {
      kind: "episode_done",
      seq: 4,
      data: {
        episode_id: 0,
        success: false,
        failure: { stage: "execute", detail: "step predicate unmet", step_index: 0 },
      },
    });
    expect(state.episode?.steps[0].state).toBe("failed");
    expect(state.episode?.failure?.stage).toBe("execute");
  });

  it("a scene reset clears the episode panel", () => {
    let state = reduce(initialState(), classified);
    state = reduce(state, {
      kind: "scene_update",
      seq: 9,
      data: { episode_id: null, caption: "table 8x8; ", family: "pick_color", seed: 1 },
    });
    expect(state.episode).toBeNull();
    expect(state.family).toBe("pick_color");
  });
});

describe("malformed payloads", () => {
  it("rejects events with missing fields instead of crashing", () => {
    expect(coerceEvent("classified", 1, { label: "MAYBE", neighbors: [] })).toBeNull();
    expect(coerceEvent("step_status", 1, { step_index: "x", status: "done" })).toBeNull();
    expect(coerceEvent("episode_done", 1, {})).toBeNull();
    expect(coerceEvent("unknown_kind", 1, {})).toBeNull();
    expect(coerceEvent("scene_update", Number.NaN, { caption: "x" })).toBeNull();
  });
});
