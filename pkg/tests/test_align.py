"""Alignment: threshold pairing, monotonicity, monitoring, annotation."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twolane import align, bench, fastpath, planner, sim
from twolane.align import AlignmentConfig, MonitorStatus, annotate_dataset, monitor, pair_steps
from twolane.errors import SchemaViolation
from twolane.model import (
    Frame,
    Instruction,
    ObjectAtCell,
    Plan,
    PlanSource,
    SubGoal,
    Trajectory,
)


def plan_of(*texts):
    return Plan(steps=tuple(SubGoal(i, t, None) for i, t in enumerate(texts)))


def traj_of(*captions):
    return Trajectory(frames=tuple(Frame(c, None) for c in captions), family="t", seed=0)


def test_identical_text_pairs_at_score_one():
    report = pair_steps(
        plan_of("pick up the red cube"),
        traj_of("pick up the red cube"),
        AlignmentConfig(),
    )
    assert report.gaps == ()
    assert report.pairs[0][2] == pytest.approx(1.0, abs=1e-9)


def test_alpha_one_with_nonidentical_texts_all_gaps():
    report = pair_steps(
        plan_of("pick up the red cube", "pick up the blue cube"),
        traj_of("picked up the red cube", "picked up the blue cube"),
        AlignmentConfig(alpha=1.0),
    )
    assert report.pairs == ()
    assert report.gaps == (0, 1)


def test_word_plan_pairs_with_own_trajectory():
    scene, task = sim.gen_scene(1, "word_correction")
    plan, trajectory, final = bench.record_trajectory(scene, task)
    assert len(plan.steps) >= 1
    report = pair_steps(plan, trajectory, AlignmentConfig(alpha=0.75))
    assert report.gaps == ()
    frames = [f for _, f, _ in report.pairs]
    assert frames == sorted(frames) and len(set(frames)) == len(frames)


def test_frame_never_reused():
    # Two identical steps compete for one perfect frame; the second must gap.
    report = pair_steps(
        plan_of("pick up the red cube", "pick up the red cube"),
        traj_of("pick up the red cube", "table 8x8; "),
        AlignmentConfig(alpha=0.75),
    )
    assert len(report.pairs) == 1
    assert report.gaps == (1,)


def test_threshold_monotonicity_on_real_corpus():
    scene, task = sim.gen_scene(3, "color_sort")
    plan, trajectory, _ = bench.record_trajectory(scene, task)
    counts = []
    for alpha in (0.5, 0.75, 0.9):
        counts.append(len(pair_steps(plan, trajectory, AlignmentConfig(alpha=alpha)).pairs))
    assert counts[0] >= counts[1] >= counts[2]


@given(
    st.lists(st.sampled_from(["pick up the cube", "place it down", "rotate the bowl", "solve it"]),
             min_size=1, max_size=4),
    st.lists(st.sampled_from(["picked up the cube", "placed it down", "rotated the bowl", "table 8x8; "]),
             min_size=1, max_size=6),
    st.sampled_from([(0.3, 0.6), (0.5, 0.75), (0.75, 0.9), (0.9, 0.999)]),
)
@settings(max_examples=150, deadline=None)
def test_threshold_monotonicity_property(steps, captions, alphas):
    low, high = alphas
    plan = plan_of(*steps)
    traj = traj_of(*captions)
    pairs_low = pair_steps(plan, traj, AlignmentConfig(alpha=low)).pairs
    pairs_high = pair_steps(plan, traj, AlignmentConfig(alpha=high)).pairs
    assert len(pairs_low) >= len(pairs_high)
    for report in (pairs_low, pairs_high):
        frames = [f for _, f, _ in report]
        assert frames == sorted(frames) and len(set(frames)) == len(frames)


def test_pairing_deterministic():
    scene, task = sim.gen_scene(9, "math_reasoning")
    plan, trajectory, _ = bench.record_trajectory(scene, task)
    cfg = AlignmentConfig()
    assert pair_steps(plan, trajectory, cfg) == pair_steps(plan, trajectory, cfg)


def test_alpha_bounds():
    with pytest.raises(ValueError):
        AlignmentConfig(alpha=0.0)
    with pytest.raises(ValueError):
        AlignmentConfig(alpha=1.5)


def test_pairing_through_remote_embedder():
    import json as json_mod

    import httpx

    from twolane.embedding import EmbedderKind, EmbedderSpec, embed

    dim = 32
    requests = []

    def handler(request):
        body = json_mod.loads(request.content)
        requests.append(len(body["input"]))
        data = [
            {"index": i, "embedding": embed(t, dim).tolist()} for i, t in enumerate(body["input"])
        ]
        return httpx.Response(200, json={"data": data})

    spec = EmbedderSpec(
        kind=EmbedderKind.REMOTE, dimension=dim, endpoint="http://stub/v1/embeddings", model_name="m"
    )
    # Route the module-level client through the mock transport.
    import twolane.align as align_mod
    import twolane.embedding as embedding_mod

    original = embedding_mod.embed_texts

    def patched(s, texts, timeout_s=10.0, transport=None):
        return original(s, texts, timeout_s=timeout_s, transport=httpx.MockTransport(handler))

    align_mod.embed_texts = patched
    try:
        report = pair_steps(
            plan_of("pick up the red cube"),
            traj_of("picked up the red cube"),
            AlignmentConfig(alpha=0.75, embedder=spec),
        )
    finally:
        align_mod.embed_texts = original
    assert report.gaps == ()
    assert requests == [1, 1]  # one batch for frames, one for steps


# -- monitor -----------------------------------------------------------------------


def test_monitor_step_done_pending_plan_done():
    scene, task = sim.gen_scene(1, "word_correction")
    plan = planner.plan(planner.PlannerSpec(), Instruction("i", task.instruction_text), scene)
    current = scene
    assert monitor(plan, current, 0) is MonitorStatus.STEP_PENDING
    for step in plan.steps:
        cmd = fastpath.parse_step(step.text)
        for action in fastpath.emit(cmd, current):
            current = sim.apply(current, action)
        expected = (
            MonitorStatus.PLAN_DONE if step.index == len(plan.steps) - 1 else MonitorStatus.STEP_DONE
        )
        assert monitor(plan, current, step.index) is expected


def test_monitor_pre_satisfied_step_is_done():
    scene, _ = sim.gen_scene(1, "word_correction")
    tile = scene.objects[0]
    plan = Plan(steps=(
        SubGoal(0, "noop", ObjectAtCell(tile.id, tile.cell, tile.z)),
        SubGoal(1, "later", ObjectAtCell(tile.id, (0, 0), 0)),
    ))
    assert monitor(plan, scene, 0) is MonitorStatus.STEP_DONE


# -- annotation ---------------------------------------------------------------------


def oracle_batch(n, seed0=0, family="word_correction"):
    batch = []
    for i in range(n):
        scene, task = sim.gen_scene(seed0 + i, family)
        plan, trajectory, _ = bench.record_trajectory(scene, task)
        batch.append((f"{family}-{i}", plan, trajectory))
    return batch


def test_annotate_oracle_batch_no_gaps():
    summary = annotate_dataset(oracle_batch(10), AlignmentConfig(alpha=0.75))
    assert summary.n_trajectories == 10
    assert summary.n_gaps == 0
    assert summary.n_pairs == summary.n_steps


def test_annotate_shuffled_frames_forces_gap():
    # Two mutually dissimilar steps with their completion frames swapped:
    # step 0 can only pair late, which starves step 1 (monotonicity).
    plan = plan_of(
        "pick up the red cube and place it at (1, 1)",
        "rotate the bowl by 45 degrees clockwise",
    )
    shuffled = traj_of(
        "rotated the bowl by 45 degrees clockwise",
        "picked up the red cube and placed it at (1, 1)",
    )
    ordered = traj_of(
        "picked up the red cube and placed it at (1, 1)",
        "rotated the bowl by 45 degrees clockwise",
    )
    cfg = AlignmentConfig(alpha=0.75)
    assert annotate_dataset([("ok", plan, ordered)], cfg).n_gaps == 0
    summary = annotate_dataset([("shuffled", plan, shuffled)], cfg)
    assert summary.n_gaps >= 1


def test_annotate_empty_batch():
    summary = annotate_dataset([], AlignmentConfig())
    assert summary.records == () and summary.n_trajectories == 0


def test_annotate_rejects_empty_plan():
    _, _, trajectory = oracle_batch(1)[0]
    with pytest.raises(SchemaViolation):
        annotate_dataset([("x", Plan(steps=()), trajectory)], AlignmentConfig())


def test_write_annotations(tmp_path):
    summary = annotate_dataset(oracle_batch(2), AlignmentConfig())
    out = tmp_path / "annotations.jsonl"
    align.write_annotations(summary, out)
    lines = out.read_text().splitlines()
    assert len(lines) == summary.n_pairs
