// Wire types mirroring the server's documented payloads.

export interface SceneObjectSnapshot {
  id: number;
  kind: string;
  color: string;
  texture: string;
  label: string;
  x: number;
  y: number;
  z: number;
  orientation_deg: number;
  attributes: string[];
}

export interface SceneSnapshot {
  width: number;
  height: number;
  held: number | null;
  zones: Record<string, [number, number, number, number]>;
  objects: SceneObjectSnapshot[];
}

export interface NeighborInfo {
  entry_id: number;
  score: number;
  text?: string;
}

export interface PlanStepInfo {
  index: number;
  text: string;
}

export type StepState = "pending" | "done" | "failed";

// Server-sent events, discriminated on `kind`.
export type ConsoleEvent =
  | { kind: "scene_update"; seq: number; data: SceneUpdateData }
  | { kind: "classified"; seq: number; data: ClassifiedData }
  | { kind: "plan_ready"; seq: number; data: PlanReadyData }
  | { kind: "step_status"; seq: number; data: StepStatusData }
  | { kind: "episode_done"; seq: number; data: EpisodeDoneData };

export interface SceneUpdateData {
  episode_id: number | null;
  caption: string;
  scene?: SceneSnapshot;
  family?: string;
  seed?: number;
  instruction_hint?: string;
  step_index?: number | null;
}

export interface ClassifiedData {
  episode_id: number;
  label: "FAST" | "SLOW";
  neighbors: NeighborInfo[];
}

export interface PlanReadyData {
  episode_id: number;
  source: string;
  steps: PlanStepInfo[];
}

export interface StepStatusData {
  episode_id: number;
  step_index: number;
  status: "done" | "failed";
}

export interface EpisodeDoneData {
  episode_id: number;
  success: boolean;
  failure: { stage: string; detail: string; step_index: number | null } | null;
}

export const EVENT_KINDS = [
  "scene_update",
  "classified",
  "plan_ready",
  "step_status",
  "episode_done",
] as const;
