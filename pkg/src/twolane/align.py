"""Sub-goal / observation pairing and online step monitoring.

Offline, plan steps are paired with trajectory frames whose caption
clears a similarity threshold, scanning strictly forward in time: step i
takes the first unconsumed qualifying frame after step i-1's frame, and
a frame never serves two steps. Steps with no qualifying frame land in
`gaps`; the pairing never guesses.

Online monitoring is predicate-based: similarity scores are advisory,
the symbolic step predicate decides.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .embedding import EmbedderSpec, embed_texts
from .errors import SchemaViolation
from .model import Plan, Scene, Trajectory

DEFAULT_ALPHA = 0.75


@dataclass(frozen=True)
class AlignmentConfig:
    alpha: float = DEFAULT_ALPHA
    embedder: EmbedderSpec = EmbedderSpec()

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")


@dataclass(frozen=True)
class AlignmentReport:
    pairs: tuple[tuple[int, int, float], ...]  # (step index, frame index, score)
    gaps: tuple[int, ...]  # step indices with no qualifying frame


def pair_steps(plan: Plan, trajectory: Trajectory, cfg: AlignmentConfig) -> AlignmentReport:
    """Pair each plan step with the first qualifying later frame."""
    framed = [(i, f.caption) for i, f in enumerate(trajectory.frames) if f.caption.strip()]
    frame_vecs: list[Optional[np.ndarray]] = [None] * len(trajectory.frames)
    for (i, _), vec in zip(framed, embed_texts(cfg.embedder, [c for _, c in framed])):
        frame_vecs[i] = vec
    step_vecs = embed_texts(cfg.embedder, [s.text for s in plan.steps])
    pairs = []
    gaps = []
    cursor = 0  # next frame index eligible for pairing
    for step in plan.steps:
        step_vec = step_vecs[step.index]
        found = None
        for idx in range(cursor, len(frame_vecs)):
            vec = frame_vecs[idx]
            if vec is None:
                continue
            score = float(np.dot(step_vec, vec))
            if score >= cfg.alpha:
                found = (step.index, idx, score)
                break
        if found is None:
            gaps.append(step.index)
        else:
            pairs.append(found)
            cursor = found[1] + 1
    return AlignmentReport(pairs=tuple(pairs), gaps=tuple(gaps))


class MonitorStatus(str, enum.Enum):
    STEP_DONE = "StepDone"
    STEP_PENDING = "StepPending"
    PLAN_DONE = "PlanDone"


def monitor(plan: Plan, scene: Scene, cursor: int) -> MonitorStatus:
    """Evaluate the predicate of the step at `cursor` against the scene."""
    if not 0 <= cursor < len(plan.steps):
        raise IndexError(f"cursor {cursor} outside plan of {len(plan.steps)} steps")
    step = plan.steps[cursor]
    done = step.predicate is not None and step.predicate.evaluate(scene)
    if not done:
        return MonitorStatus.STEP_PENDING
    return MonitorStatus.PLAN_DONE if cursor == len(plan.steps) - 1 else MonitorStatus.STEP_DONE


@dataclass(frozen=True)
class AnnotatedPair:
    trajectory_id: str
    step_index: int
    frame_index: int
    step_text: str
    caption: str
    score: float


@dataclass(frozen=True)
class AnnotationSummary:
    records: tuple[AnnotatedPair, ...]
    n_trajectories: int
    n_steps: int
    n_pairs: int
    n_gaps: int


def annotate_dataset(
    batch: Iterable[tuple[str, Plan, Trajectory]], cfg: AlignmentConfig
) -> AnnotationSummary:
    """Pair every (plan, trajectory) in the batch; emit paired records only."""
    records = []
    n_steps = 0
    n_gaps = 0
    n_traj = 0
    for traj_id, plan, trajectory in batch:
        if len(plan.steps) == 0 or len(trajectory.frames) == 0:
            raise SchemaViolation(traj_id, "empty plan or trajectory in annotation batch")
        n_traj += 1
        n_steps += len(plan.steps)
        report = pair_steps(plan, trajectory, cfg)
        n_gaps += len(report.gaps)
        for step_index, frame_index, score in report.pairs:
            records.append(
                AnnotatedPair(
                    trajectory_id=traj_id,
                    step_index=step_index,
                    frame_index=frame_index,
                    step_text=plan.steps[step_index].text,
                    caption=trajectory.frames[frame_index].caption,
                    score=score,
                )
            )
    return AnnotationSummary(
        records=tuple(records),
        n_trajectories=n_traj,
        n_steps=n_steps,
        n_pairs=len(records),
        n_gaps=n_gaps,
    )


def write_annotations(summary: AnnotationSummary, path) -> None:
    """Write annotation records as line-delimited JSON, one pair per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in summary.records:
            fh.write(
                json.dumps(
                    {
                        "trajectory_id": rec.trajectory_id,
                        "step_index": rec.step_index,
                        "frame_index": rec.frame_index,
                        "step_text": rec.step_text,
                        "caption": rec.caption,
                        "score": round(rec.score, 9),
                    },
                    sort_keys=True,
                )
                + "\n"
            )
