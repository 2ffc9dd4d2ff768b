// View state and its reducer.
//
// The console is a pure projection of the server's event stream: the
// reducer consumes one typed event at a time, never simulates anything
// client-side, and ignores events whose sequence number does not advance
// the cursor, so replaying a recorded log always reproduces the same
// final state.

import type {
  ClassifiedData,
  ConsoleEvent,
  EpisodeDoneData,
  NeighborInfo,
  PlanReadyData,
  SceneSnapshot,
  StepState,
} from "./types.js";

export type RunMode = "auto" | "step";

export interface EpisodeView {
  episodeId: number;
  label: "FAST" | "SLOW" | null;
  neighbors: NeighborInfo[];
  planSource: string | null;
  steps: { index: number; text: string; state: StepState }[];
  done: boolean;
  success: boolean | null;
  failure: EpisodeDoneData["failure"];
}

export interface ViewState {
  sessionId: string | null;
  runMode: RunMode;
  cursor: number; // last applied event sequence number (monotone)
  scene: SceneSnapshot | null;
  caption: string;
  family: string | null;
  instructionHint: string | null;
  episode: EpisodeView | null;
  banner: string | null; // error banner; never a blank page
}

export function initialState(sessionId: string | null = null, runMode: RunMode = "auto"): ViewState {
  return {
    sessionId,
    runMode,
    cursor: 0,
    scene: null,
    caption: "",
    family: null,
    instructionHint: null,
    episode: null,
    banner: null,
  };
}

function freshEpisode(episodeId: number): EpisodeView {
  return {
    episodeId,
    label: null,
    neighbors: [],
    planSource: null,
    steps: [],
    done: false,
    success: null,
    failure: null,
  };
}

function ensureEpisode(state: ViewState, episodeId: number): EpisodeView {
  if (state.episode === null || state.episode.episodeId !== episodeId) {
    return freshEpisode(episodeId);
  }
  return state.episode;
}

export function reduce(state: ViewState, event: ConsoleEvent): ViewState {
  if (typeof event.seq !== "number" || event.seq <= state.cursor) {
    return state; // cursor is monotone; stale or duplicate events are no-ops
  }
  const next: ViewState = { ...state, cursor: event.seq };
  switch (event.kind) {
    case "scene_update": {
      next.caption = event.data.caption;
      if (event.data.scene) {
        next.scene = event.data.scene;
      }
      if (event.data.family) {
        next.family = event.data.family;
        next.instructionHint = event.data.instruction_hint ?? null;
        next.episode = null; // a reset opens a fresh board
      }
      return next;
    }
    case "classified": {
      const episode = freshEpisode(event.data.episode_id);
      episode.label = event.data.label;
      episode.neighbors = event.data.neighbors;
      next.episode = episode;
      return next;
    }
    case "plan_ready": {
      const episode = { ...ensureEpisode(state, event.data.episode_id) };
      episode.planSource = event.data.source;
      episode.steps = event.data.steps.map((s) => ({
        index: s.index,
        text: s.text,
        state: "pending" as StepState,
      }));
      next.episode = episode;
      return next;
    }
    case "step_status": {
      const episode = { ...ensureEpisode(state, event.data.episode_id) };
      episode.steps = episode.steps.map((s) =>
        s.index === event.data.step_index ? { ...s, state: event.data.status } : s,
      );
      next.episode = episode;
      return next;
    }
    case "episode_done": {
      const episode = { ...ensureEpisode(state, event.data.episode_id) };
      episode.done = true;
      episode.success = event.data.success;
      episode.failure = event.data.failure;
      next.episode = episode;
      return next;
    }
    default: {
      const exhaustive: never = event;
      return exhaustive;
    }
  }
}

/** Replay a recorded event log from scratch; the acceptance check for
 * "the UI is a pure projection of the event stream". */
export function replay(events: ConsoleEvent[], sessionId: string | null = null): ViewState {
  let state = initialState(sessionId);
  for (const event of events) {
    state = reduce(state, event);
  }
  return state;
}

/** Parse an unknown payload into a typed event, or null when malformed
 * (the caller surfaces a banner instead of crashing). */
export function coerceEvent(kind: string, seq: number, data: unknown): ConsoleEvent | null {
  if (!Number.isFinite(seq) || typeof data !== "object" || data === null) {
    return null;
  }
  switch (kind) {
    case "scene_update": {
      const d = data as Record<string, unknown>;
      if (typeof d.caption !== "string") return null;
      return { kind, seq, data: data as ConsoleEvent["data"] } as ConsoleEvent;
    }
    case "classified": {
      const d = data as Partial<ClassifiedData>;
      if (d.label !== "FAST" && d.label !== "SLOW") return null;
      if (!Array.isArray(d.neighbors)) return null;
      return { kind, seq, data: data as ClassifiedData };
    }
    case "plan_ready": {
      const d = data as Partial<PlanReadyData>;
      if (!Array.isArray(d.steps)) return null;
      return { kind, seq, data: data as PlanReadyData };
    }
    case "step_status": {
      const d = data as Record<string, unknown>;
      if (typeof d.step_index !== "number") return null;
      if (d.status !== "done" && d.status !== "failed") return null;
      return { kind, seq, data: data as ConsoleEvent["data"] } as ConsoleEvent;
    }
    case "episode_done": {
      const d = data as Record<string, unknown>;
      if (typeof d.success !== "boolean") return null;
      return { kind, seq, data: data as EpisodeDoneData };
    }
    default:
      return null;
  }
}
