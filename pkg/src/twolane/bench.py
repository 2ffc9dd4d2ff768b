"""Benchmark harness and synthetic trajectory dataset generator.

Benchmarks run seeded episodes through the in-process executive and
report per-family success rates in a fixed-shape table (CSV or
markdown). Per-episode seeds decorrelate across families by folding a
stable hash of (family, index) into the base seed, so tables reproduce
byte-identically for a given spec.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from . import executive, fastpath, kernels, planner, serde, sim
from .errors import UnsupportedFamily
from .model import Frame, Instruction, Plan, Scene, Trajectory, caption, step_echo

FOOTER_NOTE = (
    "rates reflect the deterministic oracle pipeline on seeded scenes; "
    "they are not comparable to published trained-baseline numbers"
)


def episode_seed(base_seed: int, family: str, index: int) -> int:
    """Reproducible yet family-decorrelated per-episode seed."""
    return base_seed ^ kernels.fnv1a64(f"{family}:{index}".encode("utf-8"))


@dataclass(frozen=True)
class BenchmarkSpec:
    families: tuple[str, ...] = sim.FAMILIES
    episodes_per_family: int = 20
    base_seed: int = 0
    planner_kind: str = "oracle"
    output_format: str = "csv"  # "csv" | "markdown"

    def __post_init__(self):
        if self.episodes_per_family < 1:
            raise ValueError("episodes_per_family must be >= 1")
        for family in self.families:
            if family not in sim.FAMILIES:
                raise UnsupportedFamily(family)


@dataclass
class BenchRow:
    family: str
    episodes: int
    successes: int

    @property
    def rate_percent(self) -> float:
        return 100.0 * self.successes / self.episodes


@dataclass
class BenchmarkResult:
    rows: list[BenchRow]
    failures: list[dict] = field(default_factory=list)  # family, seed, stage, step_index, detail


def run_benchmark(
    spec: BenchmarkSpec,
    exec_config: Optional[executive.ExecutiveConfig] = None,
    plan_mutator: Optional[Callable[[Plan], Plan]] = None,
) -> BenchmarkResult:
    """Run N seeded episodes per family through the executive, in process."""
    cfg = exec_config or executive.default_config()
    if plan_mutator is not None:
        cfg.plan_mutator = plan_mutator
    rows = []
    failures = []
    for family in sorted(set(spec.families)):
        successes = 0
        for index in range(spec.episodes_per_family):
            seed = episode_seed(spec.base_seed, family, index)
            scene, task = sim.gen_scene(seed, family)
            result, _ = executive.run_episode(cfg, scene, task.instruction_text, task=task)
            if result.success:
                successes += 1
            elif result.failure is not None:
                failures.append(
                    {
                        "family": family,
                        "seed": seed,
                        "stage": result.failure.stage.value,
                        "step_index": result.failure.step_index,
                        "detail": result.failure.detail,
                    }
                )
        rows.append(BenchRow(family, spec.episodes_per_family, successes))
    return BenchmarkResult(rows=rows, failures=failures)


def render_csv(result: BenchmarkResult) -> str:
    lines = ["family,episodes,successes,rate_percent"]
    for row in result.rows:
        lines.append(f"{row.family},{row.episodes},{row.successes},{row.rate_percent:.1f}")
    lines.append(f"# {FOOTER_NOTE}")
    return "\n".join(lines) + "\n"


def render_markdown(result: BenchmarkResult) -> str:
    lines = [
        "| task family | episodes | successes | success rate |",
        "|---|---:|---:|---:|",
    ]
    for row in result.rows:
        lines.append(f"| {row.family} | {row.episodes} | {row.successes} | {row.rate_percent:.1f}% |")
    lines.append("")
    lines.append(f"_{FOOTER_NOTE}_")
    return "\n".join(lines) + "\n"


# -- dataset generation -----------------------------------------------------------


@dataclass(frozen=True)
class DatasetSpec:
    n_trajectories: int = 200
    family_weights: tuple[tuple[str, float], ...] = tuple((f, 1.0) for f in sim.FAMILIES)
    base_seed: int = 1
    out_dir: str = "dataset"

    def __post_init__(self):
        if self.n_trajectories < 1:
            raise ValueError("n_trajectories must be >= 1")
        for family, weight in self.family_weights:
            if family not in sim.FAMILIES:
                raise UnsupportedFamily(family)
            if weight <= 0:
                raise ValueError(f"weight for {family} must be positive")


def record_trajectory(scene: Scene, task: sim.TaskSpec) -> tuple[Plan, Trajectory, Scene]:
    """Plan the task, execute it, and record (caption, action) frames.

    The frame closing each plan step carries the captioner's step-echo
    form; intermediate frames carry plain scene captions. A final
    actionless frame closes the trajectory.
    """
    if task.family in sim.FAST_FAMILIES:
        plan = executive.synthetic_fast_plan(task.instruction_text)
        step_cmds = [fastpath.parse(task.instruction_text)]
    else:
        plan = planner.oracle_plan(
            planner.PlannerSpec(), Instruction("data", task.instruction_text), scene
        )
        step_cmds = None  # parsed per step against the evolving scene
    frames = []
    current = scene
    for step in plan.steps:
        cmd = step_cmds[step.index] if step_cmds is not None else fastpath.parse_step(step.text)
        actions = fastpath.emit(cmd, current)
        for j, action in enumerate(actions):
            current = sim.apply(current, action)
            text = step_echo(step.text) if j == len(actions) - 1 else caption(current)
            frames.append(Frame(text, action))
    frames.append(Frame(caption(current), None))
    trajectory = Trajectory(frames=tuple(frames), family=task.family, seed=0)
    return plan, trajectory, current


def gen_dataset(spec: DatasetSpec) -> dict:
    """Generate the trajectory corpus; returns the manifest.

    Writes trajectories.jsonl, plans.jsonl, and manifest.json under
    spec.out_dir; regeneration under the same spec is byte-identical.
    """
    import random

    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    families = [f for f, _ in spec.family_weights]
    weights = [w for _, w in spec.family_weights]
    chooser = random.Random(spec.base_seed)
    per_family: dict[str, int] = {}
    lengths = []
    traj_blocks = []
    plan_blocks = []
    for index in range(spec.n_trajectories):
        family = chooser.choices(families, weights=weights, k=1)[0]
        seed = episode_seed(spec.base_seed, family, index)
        scene, task = sim.gen_scene(seed, family)
        plan, trajectory, final = record_trajectory(scene, task)
        if not sim.check_success(task, final):
            raise RuntimeError(f"oracle trajectory failed its own task: {family} seed {seed}")
        trajectory = Trajectory(frames=trajectory.frames, family=family, seed=seed)
        traj_blocks.append(serde.encode_trajectory(trajectory))
        plan_blocks.append(serde.encode_plan(plan))
        per_family[family] = per_family.get(family, 0) + 1
        lengths.append(len(trajectory.frames))
    (out / "trajectories.jsonl").write_text("".join(traj_blocks), encoding="utf-8")
    (out / "plans.jsonl").write_text("".join(plan_blocks), encoding="utf-8")
    manifest = {
        "version": serde.FORMAT_VERSION,
        "count": spec.n_trajectories,
        "base_seed": spec.base_seed,
        "per_family": dict(sorted(per_family.items())),
        "mean_length": round(sum(lengths) / len(lengths), 6),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return manifest


def load_dataset(out_dir: str | Path) -> tuple[list[Plan], list[Trajectory], dict]:
    out = Path(out_dir)
    trajectories = serde.decode_trajectories((out / "trajectories.jsonl").read_text(encoding="utf-8"))
    plan_text = (out / "plans.jsonl").read_text(encoding="utf-8")
    blocks: list[list[str]] = []
    for line in plan_text.splitlines():
        if not line.strip():
            continue
        if json.loads(line).get("record") == "plan":
            blocks.append([line])
        else:
            blocks[-1].append(line)
    plans = [serde.decode_plan("\n".join(b)) for b in blocks]
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    return plans, trajectories, manifest
