"""Acceptance suite: one test per primary criterion, pinned tolerances.

Each test prints a single [PASS]/[FAIL] line (visible with -s or -rA) and
asserts its stated budget. Run with:  pytest tests/test_acceptance.py -s
"""

import hashlib
import itertools
import random
import time
from collections import deque

import pytest

from twolane import align, bank as bank_mod, bench, executive, fastpath, planner, sim
from twolane.align import AlignmentConfig
from twolane.model import Instruction, Plan, SubGoal
from twolane.sim import SimulationError


def report(name, ok, elapsed, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" — {detail}" if detail else ""
    print(f"[{status}] {name} ({elapsed:.2f}s){suffix}")
    assert ok, f"{name}: {detail}"


# -- 1. discriminator perfection ----------------------------------------------------


def test_acceptance_discriminator_perfection(starter_bank):
    t0 = time.perf_counter()
    assert len(starter_bank) >= 100
    held = bank_mod.heldout_instructions()
    assert len(held) >= 180
    per_family = {}
    for _, _, family in held:
        per_family[family] = per_family.get(family, 0) + 1
    assert len(per_family) == 9 and all(n >= 20 for n in per_family.values())
    bank_texts = {e.text for e in starter_bank.entries}
    assert not bank_texts & {t for t, _, _ in held}, "held-out set must be disjoint"

    correct = sum(
        1 for text, label, _ in held if bank_mod.classify(starter_bank, text)[0] is label
    )
    accuracy = correct / len(held)

    # Latency: single query against a 1,000-entry bank.
    big_entries = bank_mod.augment(
        starter_bank.entries, iterations=3, provider=bank_mod.TemplateParaphraser(), cap=1000
    )
    big = bank_mod.ThinkBank(big_entries, starter_bank.embedder)
    assert len(big) == 1000
    bank_mod.classify(big, "warm up the caches")  # warm-up
    samples = []
    for text, _, _ in held[:20]:
        q0 = time.perf_counter()
        bank_mod.classify(big, text)
        samples.append(time.perf_counter() - q0)
    single_query_s = sorted(samples)[len(samples) // 2]

    elapsed = time.perf_counter() - t0
    report(
        "discriminator: 100% on held-out, <50ms vs 1k bank, <10s total",
        accuracy == 1.0 and single_query_s < 0.050 and elapsed < 10.0,
        elapsed,
        f"accuracy={accuracy:.4f} query={single_query_s * 1000:.2f}ms",
    )


# -- 2. word-correction optimality -----------------------------------------------------


def _bfs_distances(target):
    """Backward BFS from the solved configuration over all slot states."""
    length = len(target)
    goal = tuple(target) + (None,)
    dist = {goal: 0}
    queue = deque([goal])
    while queue:
        state = queue.popleft()
        blank = state.index(None)
        for i, ch in enumerate(state):
            if ch is None:
                continue
            nxt = list(state)
            nxt[blank], nxt[i] = ch, None
            key = tuple(nxt)
            if key not in dist:
                dist[key] = dist[state] + 1
                queue.append(key)
    return dist


def _goal_distance(dist, state, target):
    # States already spelling the target across the word row count as solved.
    if state[: len(target)] == tuple(target):
        return 0
    return dist[state]


def test_acceptance_word_optimality():
    t0 = time.perf_counter()
    rng = random.Random(20260810)
    words = set()
    while len(words) < 20:
        length = rng.randint(2, 5)
        words.add("".join(rng.choice("ABCDEFGH") for _ in range(length)))
    checked = 0
    for target in sorted(words):
        dist = _bfs_distances(target)
        tiles = list(target) + [None]
        for arrangement in set(itertools.permutations(tiles)):
            moves = planner.word_moves(list(arrangement), target)
            want = _goal_distance(dist, arrangement, target)
            assert len(moves) == want, (target, arrangement, len(moves), want)
            checked += 1
    icra = len(planner.word_moves(["I", "C", "A", "R", None], "ICRA"))
    elapsed = time.perf_counter() - t0
    report(
        "word-correction: plans match BFS optimum; ICAR->ICRA = 3 moves; <60s",
        icra == 3 and elapsed < 60.0,
        elapsed,
        f"{checked} instances over 20 words, ICAR->ICRA={icra}",
    )


# -- 3. math suite ----------------------------------------------------------------------


def _math_suite():
    ops_a = [2, 7, 19, 83, 256, 999, 40, 111, 5, 300]
    ops_b = [3, 9, 12, 77, 640, 999, 5, 208, 60, 401]
    equations = ["1 + x = 6", "11 × 13 ="]  # the two canonical instances
    equations += [f"{a} + {b} =" for a in ops_a for b in ops_b]
    equations += [f"{max(a, b)} - {min(a, b)} =" for a in ops_a for b in ops_b]
    equations += [f"{a} × {b} =" for a in ops_a for b in ops_b]
    for b in [2, 3, 7, 12, 25, 99]:
        for q in [1, 2, 5, 9, 13, 31, 40]:
            if b * q <= 999:
                equations.append(f"{b * q} ÷ {b} =")
    for a in [1, 44, 999, 130, 7, 86, 202, 550]:
        for x in [0, 2, 3, 7, 9]:
            equations.append(f"{a} + x = {a + x}")
            equations.append(f"x + {a} = {a + x}")
            equations.append(f"{a} × x = {a * x}")
    for a in range(1, 9):
        for c in range(0, 10 - a):
            equations.append(f"x - {a} = {c}")
    return equations


def test_acceptance_math_suite():
    t0 = time.perf_counter()
    equations = _math_suite()
    assert len(equations) >= 500
    solved = 0
    for text in equations:
        scene, task = sim.build_equation_scene(text)
        plan = planner.plan_math(text, scene)
        for step in plan.steps:
            cmd = fastpath.parse_step(step.text)
            for action in fastpath.emit(cmd, scene):
                scene = sim.apply(scene, action)
        assert sim.check_success(task, scene), text
        solved += 1
    elapsed = time.perf_counter() - t0
    report(
        "math: 100% over enumerated suite incl. '1 + x = 6' and '11 × 13 ='; <10s",
        solved == len(equations) and elapsed < 10.0,
        elapsed,
        f"{solved}/{len(equations)} equations",
    )


# -- 4. oracle end-to-end benchmark -------------------------------------------------------


def test_acceptance_oracle_benchmark(starter_bank):
    t0 = time.perf_counter()
    exec_config = executive.ExecutiveConfig(bank=starter_bank)
    spec = bench.BenchmarkSpec(families=sim.FAMILIES, episodes_per_family=20, base_seed=0)
    first = bench.render_csv(bench.run_benchmark(spec, exec_config=exec_config))
    second = bench.render_csv(bench.run_benchmark(spec, exec_config=exec_config))
    rows = first.splitlines()
    all_hundred = all(line.endswith(",100.0") for line in rows[1:-1])
    shape_ok = (
        rows[0] == "family,episodes,successes,rate_percent"
        and len(rows) == 2 + len(sim.FAMILIES)
        and rows[-1].startswith("# ")
    )
    elapsed = time.perf_counter() - t0
    report(
        "oracle benchmark: 13 families x 20 episodes, 100% each, byte-identical; <60s",
        all_hundred and shape_ok and first == second and elapsed < 60.0,
        elapsed,
        f"{len(sim.FAMILIES)} families x 20",
    )


# -- 5. alignment at alpha = 0.75 -----------------------------------------------------------


def test_acceptance_alignment():
    t0 = time.perf_counter()
    batch = []
    families = sorted(sim.SLOW_FAMILIES)
    index = 0
    while len(batch) < 50:
        family = families[index % len(families)]
        scene, task = sim.gen_scene(1000 + index, family)
        plan, trajectory, _ = bench.record_trajectory(scene, task)
        index += 1
        if len(plan.steps) == 0:
            continue
        batch.append((f"{family}-{index}", plan, trajectory))
    base = align.annotate_dataset(batch, AlignmentConfig(alpha=0.75))
    monotone = True
    for traj_id, plan, trajectory in batch:
        pairs = align.pair_steps(plan, trajectory, AlignmentConfig(alpha=0.75)).pairs
        frames = [f for _, f, _ in pairs]
        if frames != sorted(frames) or len(set(frames)) != len(frames):
            monotone = False
    strict = align.annotate_dataset(batch, AlignmentConfig(alpha=0.999))
    counts = [
        align.annotate_dataset(batch, AlignmentConfig(alpha=a)).n_pairs for a in (0.5, 0.75, 0.9)
    ]
    elapsed = time.perf_counter() - t0
    report(
        "alignment: 0 gaps at 0.75, monotone; gaps at 0.999; threshold monotonicity",
        base.n_gaps == 0 and monotone and strict.n_gaps >= 1 and counts[0] >= counts[1] >= counts[2],
        elapsed,
        f"pairs@0.5/0.75/0.9={counts} gaps@0.999={strict.n_gaps}",
    )


# -- 6. simulator fuzz -------------------------------------------------------------------------


def test_acceptance_simulator_fuzz():
    from twolane.model import Pick, Place, Rotate

    t0 = time.perf_counter()
    rng = random.Random(0xACCE97)
    scene, _ = sim.gen_scene(1, "math_reasoning")
    ids = sorted(o.id for o in scene.objects)
    id_set = set(ids)
    rejected = 0
    for _ in range(10_000):
        roll = rng.random()
        if roll < 0.45:
            action = Pick(rng.choice(ids + [404]))
        elif roll < 0.9:
            cell = (rng.randrange(-1, scene.width + 1), rng.randrange(-1, scene.height + 1))
            action = Place(cell, rng.choice([None, None, 0, 2, 9]))
        else:
            action = Rotate(rng.choice(ids + [404]), rng.choice([-45, 30, 90, 540]))
        try:
            scene = sim.apply(scene, action)
        except SimulationError:
            rejected += 1
        assert {o.id for o in scene.objects} == id_set  # object conservation
        scene.validate()  # occupancy + support invariants
    elapsed = time.perf_counter() - t0
    report(
        "simulator fuzz: 10k seeded actions, invariants hold, typed rejections; <5s",
        rejected > 0 and elapsed < 5.0,
        elapsed,
        f"{rejected} illegal actions rejected",
    )


# -- 7. fault injection ------------------------------------------------------------------------


def test_acceptance_fault_injection(starter_bank):
    t0 = time.perf_counter()

    def reverse_plan(plan: Plan) -> Plan:
        steps = tuple(SubGoal(i, s.text, s.predicate) for i, s in enumerate(reversed(plan.steps)))
        return Plan(steps=steps, source=plan.source)

    exec_config = executive.ExecutiveConfig(bank=starter_bank)
    spec = bench.BenchmarkSpec(families=("word_correction",), episodes_per_family=20, base_seed=0)
    result = bench.run_benchmark(spec, exec_config=exec_config, plan_mutator=reverse_plan)
    row = result.rows[0]
    carries_all = bool(result.failures) and all(
        f["stage"] in ("classify", "parse", "ground", "plan", "execute")
        and f["step_index"] is not None
        for f in result.failures
    )
    elapsed = time.perf_counter() - t0
    report(
        "fault injection: reversed word plans <100%, failures carry stage+step",
        row.successes < row.episodes and carries_all,
        elapsed,
        f"{row.successes}/{row.episodes} with {len(result.failures)} failure records",
    )


# -- 8. dataset generator ------------------------------------------------------------------------


def test_acceptance_dataset_generator(tmp_path):
    t0 = time.perf_counter()
    spec = bench.DatasetSpec(n_trajectories=200, base_seed=1, out_dir=str(tmp_path))

    def digest():
        h = hashlib.sha256()
        for name in ("trajectories.jsonl", "plans.jsonl", "manifest.json"):
            h.update((tmp_path / name).read_bytes())
        return h.hexdigest()

    manifest = bench.gen_dataset(spec)
    first = digest()
    bench.gen_dataset(spec)
    identical = digest() == first

    _, trajectories, _ = bench.load_dataset(tmp_path)
    replay_ok = True
    for trajectory in trajectories:
        scene, task = sim.gen_scene(trajectory.seed, trajectory.family)
        for frame in trajectory.frames:
            if frame.action is not None:
                scene = sim.apply(scene, frame.action)
        if not sim.check_success(task, scene):
            replay_ok = False
            break
    elapsed = time.perf_counter() - t0
    report(
        "dataset: 200 trajectories regenerate byte-identically and replay to success",
        manifest["count"] == 200 and identical and replay_ok,
        elapsed,
        f"mean_length={manifest['mean_length']}",
    )
