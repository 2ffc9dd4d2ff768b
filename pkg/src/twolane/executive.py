"""The episode executive: classify, route fast or slow, execute, judge.

This is the in-process core the HTTP service and the benchmark harness
both drive. Any instruction string yields an EpisodeResult — stage errors
are captured into `failure`, never raised past the episode boundary.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import bank as bank_mod
from . import fastpath, planner, sim
from .align import MonitorStatus, monitor
from .embedding import EmbedderSpec
from .errors import TwolaneError
from .model import (
    Instruction,
    Plan,
    PlanSource,
    PrimitiveAction,
    Scene,
    SubGoal,
    SystemLabel,
    caption,
)


class Stage(str, enum.Enum):
    CLASSIFY = "classify"
    PARSE = "parse"
    GROUND = "ground"
    PLAN = "plan"
    EXECUTE = "execute"


@dataclass(frozen=True)
class Failure:
    stage: Stage
    detail: str
    step_index: Optional[int] = None


@dataclass
class StepStatus:
    step_index: int
    status: str  # "done" | "failed"
    actions: list[PrimitiveAction] = field(default_factory=list)


@dataclass
class EpisodeResult:
    episode_id: int
    instruction: str
    label: Optional[SystemLabel] = None
    neighbors: list[tuple[int, float]] = field(default_factory=list)
    plan: Optional[Plan] = None
    step_statuses: list[StepStatus] = field(default_factory=list)
    actions: list[PrimitiveAction] = field(default_factory=list)
    success: bool = False
    failure: Optional[Failure] = None
    scene_before: Optional[Scene] = None
    scene_after: Optional[Scene] = None


class EpisodeAborted(TwolaneError):
    """Raised through the gate hook when a reset interrupts an episode."""


@dataclass
class ExecutiveConfig:
    bank: bank_mod.ThinkBank
    planner_spec: planner.PlannerSpec = planner.PlannerSpec()
    embedder: EmbedderSpec = EmbedderSpec()
    k: int = 1
    providers_timeout_s: float = 10.0
    plan_mutator: Optional[Callable[[Plan], Plan]] = None  # fault-injection hook
    planner_transport: object = None


def default_config() -> ExecutiveConfig:
    return ExecutiveConfig(bank=bank_mod.starter_bank())


def run_episode(
    cfg: ExecutiveConfig,
    scene: Scene,
    instruction_text: str,
    task: Optional[sim.TaskSpec] = None,
    episode_id: int = 0,
    on_event: Optional[Callable[[str, dict], None]] = None,
    gate: Optional[Callable[[], None]] = None,
    on_scene: Optional[Callable[[Scene], None]] = None,
) -> tuple[EpisodeResult, Scene]:
    """Handle one instruction end to end; returns the result and final scene."""
    result = EpisodeResult(episode_id=episode_id, instruction=instruction_text, scene_before=scene)
    emit_event = on_event or (lambda kind, data: None)

    def fail(stage: Stage, exc_or_detail, step_index: Optional[int] = None) -> tuple[EpisodeResult, Scene]:
        detail = str(exc_or_detail)
        result.failure = Failure(stage, detail, step_index)
        result.success = False
        result.scene_after = current
        emit_event(
            "episode_done",
            {"episode_id": episode_id, "success": False, "failure": {
                "stage": stage.value, "detail": detail, "step_index": step_index}},
        )
        return result, current

    current = scene

    # classify
    try:
        label, neighbors = bank_mod.classify(cfg.bank, instruction_text, k=cfg.k)
    except TwolaneError as exc:
        return fail(Stage.CLASSIFY, exc)
    result.label = label
    result.neighbors = neighbors
    emit_event(
        "classified",
        {
            "episode_id": episode_id,
            "label": label.value,
            "neighbors": [
                {"entry_id": eid, "score": round(score, 9), "text": cfg.bank.entry(eid).text}
                for eid, score in neighbors
            ],
        },
    )

    def apply_actions(actions: list[PrimitiveAction], step_index: Optional[int] = None):
        nonlocal current
        for action in actions:
            if gate is not None:
                gate()
            current = sim.apply(current, action)
            result.actions.append(action)
            if on_scene is not None:
                on_scene(current)
            emit_event(
                "scene_update",
                {"episode_id": episode_id, "caption": caption(current), "step_index": step_index},
            )

    if label is SystemLabel.FAST:
        try:
            cmd = fastpath.parse(instruction_text)
        except TwolaneError as exc:
            return fail(Stage.PARSE, exc)
        try:
            actions = fastpath.emit(cmd, current)
        except TwolaneError as exc:
            return fail(Stage.GROUND, exc)
        try:
            apply_actions(actions)
        except EpisodeAborted as exc:
            return fail(Stage.EXECUTE, exc)
        except (sim.SimulationError, ValueError) as exc:
            return fail(Stage.EXECUTE, exc)
    else:
        try:
            plan = planner.plan(
                cfg.planner_spec,
                Instruction(f"ep{episode_id}", instruction_text),
                current,
                timeout_s=cfg.providers_timeout_s,
                transport=cfg.planner_transport,
            )
        except TwolaneError as exc:
            return fail(Stage.PLAN, exc)
        if cfg.plan_mutator is not None:
            plan = cfg.plan_mutator(plan)
        result.plan = plan
        emit_event(
            "plan_ready",
            {
                "episode_id": episode_id,
                "source": plan.source.value,
                "steps": [{"index": s.index, "text": s.text} for s in plan.steps],
            },
        )
        for step in plan.steps:
            try:
                cmd = fastpath.parse_step(step.text)
                actions = fastpath.emit(cmd, current)
            except TwolaneError as exc:
                result.step_statuses.append(StepStatus(step.index, "failed"))
                emit_event("step_status", {"episode_id": episode_id, "step_index": step.index, "status": "failed"})
                return fail(Stage.GROUND, exc, step_index=step.index)
            try:
                apply_actions(actions, step_index=step.index)
            except EpisodeAborted as exc:
                result.step_statuses.append(StepStatus(step.index, "failed", actions))
                return fail(Stage.EXECUTE, exc, step_index=step.index)
            except (sim.SimulationError, ValueError) as exc:
                result.step_statuses.append(StepStatus(step.index, "failed", actions))
                emit_event("step_status", {"episode_id": episode_id, "step_index": step.index, "status": "failed"})
                return fail(Stage.EXECUTE, exc, step_index=step.index)
            status = monitor(plan, current, step.index)
            if status is MonitorStatus.STEP_PENDING:
                result.step_statuses.append(StepStatus(step.index, "failed", actions))
                emit_event("step_status", {"episode_id": episode_id, "step_index": step.index, "status": "failed"})
                return fail(Stage.EXECUTE, "step predicate unmet after execution", step_index=step.index)
            result.step_statuses.append(StepStatus(step.index, "done", actions))
            emit_event("step_status", {"episode_id": episode_id, "step_index": step.index, "status": "done"})

    result.success = sim.check_success(task, current) if task is not None else True
    result.scene_after = current
    emit_event("episode_done", {"episode_id": episode_id, "success": result.success, "failure": None})
    return result, current


def synthetic_fast_plan(instruction_text: str) -> Plan:
    """One-step plan wrapping a fast instruction (dataset/alignment use)."""
    return Plan(steps=(SubGoal(0, instruction_text, None),), source=PlanSource.ORACLE)
