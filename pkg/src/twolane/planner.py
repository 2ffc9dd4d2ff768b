"""Slow-lane planning: deterministic oracle planners plus a remote client.

The oracle planners are provably correct stand-ins for a learned planner:
executing a plan's steps greedily solves the task on the scene it was
planned for. Every sub-goal carries a symbolic predicate so execution can
be monitored without trusting step text. Ordering ties break by ascending
object id everywhere; determinism beats cleverness here.
"""

from __future__ import annotations

import enum
import itertools
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from . import equations, fastpath, providers
from .errors import (
    GoalInfeasible,
    LetterMultisetMismatch,
    MissingDigitTile,
    NoBufferCell,
    NoMatch,
    PlanParseError,
    UngrammaticalEquation,
    UnrecognizedIntent,
    UnrecognizedTask,
    ZoneFull,
)
from .model import (
    Cell,
    GroupedByColor,
    Instruction,
    LabelSequenceAtRow,
    ObjectAtCell,
    ObjectAtZone,
    ObjectHeld,
    ObjectKind,
    Plan,
    PlanSource,
    Predicate,
    Scene,
    SceneObject,
    StackedOrder,
    SubGoal,
    caption,
)


class PlannerKind(str, enum.Enum):
    ORACLE = "oracle"
    REMOTE = "remote"


@dataclass(frozen=True)
class PlannerSpec:
    kind: PlannerKind = PlannerKind.ORACLE
    endpoint: str = ""
    model_name: str = ""
    prompt_template_id: str = "planner_default"
    intent_lexicon_path: str = ""

    def __post_init__(self):
        if self.kind is PlannerKind.REMOTE and not self.endpoint:
            raise ValueError("remote planner spec requires an endpoint")


class IntentDirective(str, enum.Enum):
    MOVE_TO_FAR_ZONE = "move_to_far_zone"
    MOVE_TO_NEAR_ZONE = "move_to_near_zone"
    REMOVE_FROM_TABLE = "remove_from_table"


_DIRECTIVE_ZONES = {
    IntentDirective.MOVE_TO_FAR_ZONE: "far_zone",
    IntentDirective.MOVE_TO_NEAR_ZONE: "near_zone",
    IntentDirective.REMOVE_FROM_TABLE: "discard_zone",
}


@dataclass(frozen=True)
class IntentRule:
    trigger: str  # case-insensitive substring match
    attribute: str
    directive: IntentDirective

    def __post_init__(self):
        if not self.trigger:
            raise ValueError("intent rule trigger must be non-empty")


def load_lexicon(path: str | Path) -> list[IntentRule]:
    rules = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        rules.append(IntentRule(rec["trigger"], rec["attribute"], IntentDirective(rec["directive"])))
    return rules


def default_lexicon() -> list[IntentRule]:
    ref = resources.files("twolane.data").joinpath("intent_lexicon.jsonl")
    with resources.as_file(ref) as path:
        return load_lexicon(path)


def _make_plan(parts: Sequence[tuple[str, Optional[Predicate]]], source: PlanSource = PlanSource.ORACLE) -> Plan:
    steps = tuple(SubGoal(i, text, pred) for i, (text, pred) in enumerate(parts))
    return Plan(steps=steps, source=source)


def _move_text(obj: SceneObject, current: Cell, dest_text: str) -> str:
    phrase = fastpath.ObjectPhrase(
        color=None if obj.color.value == "none" else obj.color.value,
        kind=obj.kind,
        label=obj.label or None,
        locator=current,
    )
    return f"pick up the {phrase.render()} and place it {dest_text}"


# -- word correction ----------------------------------------------------------


def _word_assignments(row: Sequence[Optional[str]], target: str):
    """All bijections current-slot -> target-slot respecting letters."""
    slots_by_letter: dict[str, list[int]] = {}
    for i, ch in enumerate(target):
        slots_by_letter.setdefault(ch, []).append(i)
    current_by_letter: dict[str, list[int]] = {}
    for s, ch in enumerate(row):
        if ch is not None:
            current_by_letter.setdefault(ch, []).append(s)
    if {k: len(v) for k, v in slots_by_letter.items()} != {
        k: len(v) for k, v in current_by_letter.items()
    }:
        raise LetterMultisetMismatch(
            f"letters {sorted(ch for ch in row if ch)} vs target {target!r}"
        )
    letters = sorted(slots_by_letter)
    for combo in itertools.product(
        *(itertools.permutations(slots_by_letter[ch]) for ch in letters)
    ):
        perm: dict[int, int] = {}
        for ch, targets in zip(letters, combo):
            for src, dst in zip(current_by_letter[ch], targets):
                perm[src] = dst
        yield perm


def _cycle_cost(perm: dict[int, int], blank_slot: int) -> int:
    """Minimal moves to realize `perm` (tile slot -> target slot) with one blank.

    A cycle of misplaced tiles costs its length when the blank participates
    (its home slot lies in the cycle) and length + 1 otherwise, because one
    tile must detour through the blank to open the cycle.
    """
    full = dict(perm)
    # The blank's home is the one slot no tile targets.
    full[blank_slot] = next(iter(set(range(len(perm) + 1)) - set(perm.values())))
    seen: set[int] = set()
    cost = 0
    for start in full:
        if start in seen or full[start] == start:
            seen.add(start)
            continue
        cycle = []
        s = start
        while s not in seen:
            seen.add(s)
            cycle.append(s)
            s = full[s]
        tiles = len([c for c in cycle if c != blank_slot])
        cost += tiles if blank_slot in cycle else tiles + 1
    return cost


def word_moves(row: Sequence[Optional[str]], target: str) -> list[tuple[int, int]]:
    """Minimal (from_slot, to_slot) move list spelling `target` over the row.

    `row` covers the word slots plus the single blank (None). The solved
    configuration holds the target letters in the first len(target) slots.
    """
    if len(row) != len(target) + 1:
        raise LetterMultisetMismatch("row must have exactly one blank slot")
    blank = row.index(None)
    best_perm = None
    best_cost = None
    for perm in _word_assignments(row, target):
        cost = _cycle_cost(perm, blank)
        if best_cost is None or cost < best_cost:
            best_perm, best_cost = perm, cost
    assert best_perm is not None
    # Greedy realization: always prefer the tile that belongs in the blank.
    target_of = dict(best_perm)
    moves = []
    blank_now = blank
    while True:
        misplaced = sorted(s for s, t in target_of.items() if s != t)
        if not misplaced:
            break
        into_blank = [s for s in misplaced if target_of[s] == blank_now]
        src = into_blank[0] if into_blank else misplaced[0]
        moves.append((src, blank_now))
        target_of[blank_now] = target_of.pop(src)
        blank_now = src
    assert len(moves) == best_cost
    return moves


def plan_word(scene: Scene, target: str) -> Plan:
    """Oracle word-correction plan over the scene's word row and blank slot."""
    word_row = scene.zones.get("word_row")
    blank_slot = scene.zones.get("blank_slot")
    if word_row is None or blank_slot is None:
        raise UnrecognizedTask("scene has no word row")
    # Slots 0..L-1 are the word row in x order; the spare slot comes last,
    # so the solved configuration reads the target across the word row.
    cells = sorted(word_row.cells()) + sorted(blank_slot.cells())
    row: list[Optional[str]] = []
    tiles: list[Optional[SceneObject]] = []
    for cell in cells:
        obj = scene.object_at(cell, 0)
        row.append(obj.label if obj else None)
        tiles.append(obj)
    if row.count(None) != 1:
        raise LetterMultisetMismatch("word row must contain exactly one empty cell")
    moves = word_moves(row, target)
    parts: list[tuple[str, Optional[Predicate]]] = []
    for from_slot, to_slot in moves:
        tile = tiles[from_slot]
        dest = cells[to_slot]
        text = _move_text(tile, cells[from_slot], f"at ({dest[0]}, {dest[1]})")
        parts.append((text, ObjectAtCell(tile.id, dest, 0)))
        tiles[to_slot], tiles[from_slot] = tile, None
    if parts:
        y = cells[0][1]
        final = LabelSequenceAtRow(y, cells[0][0], cells[0][0] + len(target), target)
        parts[-1] = (parts[-1][0], final)
    return _make_plan(parts)


# -- math ----------------------------------------------------------------------


def read_equation(scene: Scene) -> tuple[str, int, list[SceneObject]]:
    """Equation text, row y, and row tiles read off the scene."""
    eq_rows = sorted(
        {o.cell[1] for o in scene.objects if o.kind is ObjectKind.SYMBOL_TILE and o.label == "="}
    )
    if len(eq_rows) != 1:
        raise UngrammaticalEquation("scene does not show exactly one '=' tile")
    y = eq_rows[0]
    row = sorted(
        (o for o in scene.objects if o.cell[1] == y and o.z == 0 and o.id != scene.held),
        key=lambda o: o.cell[0],
    )
    return "".join(o.label for o in row), y, row


def plan_math(equation_text: str, scene: Scene) -> Plan:
    """Plan completing the equation with digit tiles from the pool."""
    eq = equations.parse_equation(equation_text)
    answer = equations.solve(eq)
    digits = equations.answer_digits(eq, answer)
    _, y, row = read_equation(scene)
    if [o.label for o in row if o.label] != eq.tiles():
        raise UngrammaticalEquation("scene tiles do not spell the given equation")

    pool_zone = scene.zones.get("tile_pool")
    if pool_zone is None:
        raise MissingDigitTile("scene has no tile pool")
    pool = sorted(
        (o for o in scene.objects if o.kind is ObjectKind.DIGIT_TILE and pool_zone.contains(o.cell)),
        key=lambda o: o.id,
    )
    used: set[int] = set()

    def take(digit: str) -> SceneObject:
        for tile in pool:
            if tile.id not in used and tile.label == digit:
                used.add(tile.id)
                return tile
        raise MissingDigitTile(f"no '{digit}' tile available in the pool")

    parts: list[tuple[str, Optional[Predicate]]] = []
    if eq.form == "direct":
        x_start = row[-1].cell[0] + 1
        for i, digit in enumerate(digits):
            tile = take(digit)
            dest = (x_start + i, y)
            parts.append(
                (_move_text(tile, tile.cell, f"at ({dest[0]}, {dest[1]})"), ObjectAtCell(tile.id, dest, 0))
            )
    else:
        x_tile = next((o for o in row if o.label == "x"), None)
        if x_tile is None:
            raise UngrammaticalEquation("variable tile missing from the row")
        phrase = fastpath.phrase_for(x_tile)
        parts.append((f"pick up the {phrase.render()}", ObjectHeld(x_tile.id)))
        parts.append(("place it in the tile pool", ObjectAtZone(x_tile.id, "tile_pool")))
        tile = take(digits)
        parts.append(
            (
                _move_text(tile, tile.cell, f"at ({x_tile.cell[0]}, {x_tile.cell[1]})"),
                ObjectAtCell(tile.id, x_tile.cell, 0),
            )
        )
    if parts:
        solved = equations.solved_row(eq, answer)
        parts[-1] = (parts[-1][0], LabelSequenceAtRow(y, 0, scene.width, solved))
    return _make_plan(parts)


# -- color sort -------------------------------------------------------------------


def plan_color_sort(scene: Scene) -> Plan:
    """Move every cube not in its color's zone to that zone's leftmost free cell."""
    cubes = sorted((o for o in scene.objects if o.kind is ObjectKind.CUBE), key=lambda o: o.id)
    colors = sorted({c.color.value for c in cubes})
    reserved: set[Cell] = set()
    parts: list[tuple[str, Optional[Predicate]]] = []
    for cube in cubes:
        zone_name = f"{cube.color.value}_zone"
        zone = scene.zones.get(zone_name)
        if zone is None:
            raise NoMatch(zone_name)
        if zone.contains(cube.cell):
            continue
        dest = fastpath.first_free_zone_cell(scene, zone_name, frozenset(reserved))
        reserved.add(dest)
        text = _move_text(cube, cube.cell, f"in the {zone_name.replace('_', ' ')}")
        parts.append((text, ObjectAtZone(cube.id, zone_name)))
    if parts:
        grouped = GroupedByColor(tuple((c, f"{c}_zone") for c in colors))
        parts[-1] = (parts[-1][0], grouped)
    return _make_plan(parts)


# -- intent -----------------------------------------------------------------------


def plan_intent(instruction: Instruction, scene: Scene, lexicon: Sequence[IntentRule]) -> Plan:
    """First matching lexicon rule selects tagged objects to relocate."""
    text = instruction.text.lower()
    rule = next((r for r in lexicon if r.trigger.lower() in text), None)
    if rule is None:
        raise UnrecognizedIntent(instruction.text)
    zone_name = _DIRECTIVE_ZONES[rule.directive]
    zone = scene.zones.get(zone_name)
    reserved: set[Cell] = set()
    parts: list[tuple[str, Optional[Predicate]]] = []
    for obj in sorted(scene.objects, key=lambda o: o.id):
        if rule.attribute not in obj.attributes:
            continue
        if zone is not None and zone.contains(obj.cell):
            continue
        dest = fastpath.first_free_zone_cell(scene, zone_name, frozenset(reserved))
        reserved.add(dest)
        text_step = _move_text(obj, obj.cell, f"in the {zone_name.replace('_', ' ')}")
        parts.append((text_step, ObjectAtZone(obj.id, zone_name)))
    return _make_plan(parts)


# -- rearrange / stacking -----------------------------------------------------------


@dataclass(frozen=True)
class _Move:
    object_id: int
    src: tuple[Cell, int]
    dest: tuple[Cell, int]


def achieve_placements(scene: Scene, targets: dict[int, tuple[Cell, int]]) -> list[_Move]:
    """Move sequence reaching `targets` (id -> (cell, z)), buffering blockers.

    Placement conflicts resolve by parking the lowest-id blocking object on
    a free buffer cell first; objects already settled are never touched.
    """
    if scene.held is not None:
        raise GoalInfeasible("cannot plan placements while holding an object")
    pos: dict[int, tuple[Cell, int]] = {o.id: (o.cell, o.z) for o in scene.objects}
    target_cells = {cell for cell, _ in targets.values()}
    owner = {dest: oid for oid, dest in targets.items()}

    def occupant(cell: Cell, z: int) -> Optional[int]:
        for oid, p in pos.items():
            if p == (cell, z):
                return oid
        return None

    def height(cell: Cell) -> int:
        return sum(1 for p in pos.values() if p[0] == cell)

    def on_top(oid: int) -> bool:
        cell, z = pos[oid]
        return z == height(cell) - 1

    def settled(oid: int) -> bool:
        if pos[oid] != targets[oid]:
            return False
        cell, z = targets[oid]
        for z2 in range(z):
            below = occupant(cell, z2)
            if below is None:
                return False
            if below in targets and not settled(below):
                return False
            if (cell, z2) in owner and owner[(cell, z2)] != below:
                return False
        return True

    moves: list[_Move] = []

    def do_move(oid: int, cell: Cell):
        z = height(cell)
        moves.append(_Move(oid, pos[oid], (cell, z)))
        pos[oid] = (cell, z)

    limit = 4 * len(targets) + len(pos) + 10
    while True:
        if len(moves) > limit:
            raise GoalInfeasible("placement search did not converge")
        unsettled = [oid for oid in sorted(targets) if not settled(oid)]
        if not unsettled:
            return moves
        progress = False
        for oid in unsettled:
            tcell, tz = targets[oid]
            if pos[oid] == (tcell, tz) or not on_top(oid) or height(tcell) != tz:
                continue
            ok = True
            for z2 in range(tz):
                below = occupant(tcell, z2)
                expected = owner.get((tcell, z2))
                if expected is not None and below != expected:
                    ok = False
                    break
                if below in targets and targets[below] != (tcell, z2):
                    ok = False
                    break
            if not ok:
                continue
            do_move(oid, tcell)
            progress = True
            break
        if progress:
            continue
        # Deadlock: some object occupies a pending target position. Park the
        # lowest-id such object on a buffer cell.
        blockers = []
        for oid in sorted(pos):
            if not on_top(oid):
                continue
            if oid in targets and settled(oid):
                continue
            cell, z = pos[oid]
            for tid in unsettled:
                tcell, tz = targets[tid]
                if tid != oid and cell == tcell and z >= tz:
                    blockers.append(oid)
                    break
        if not blockers:
            raise GoalInfeasible("no direct move and nothing to buffer")
        blocker = blockers[0]
        buffer_cell = None
        for y in range(scene.height):
            for x in range(scene.width):
                cell = (x, y)
                if cell in target_cells or height(cell) > 0:
                    continue
                buffer_cell = cell
                break
            if buffer_cell:
                break
        if buffer_cell is None:
            raise NoBufferCell("no free cell outside the goal placements")
        do_move(blocker, buffer_cell)


def _moves_to_plan(scene: Scene, moves: list[_Move], final: Optional[Predicate] = None) -> Plan:
    parts: list[tuple[str, Optional[Predicate]]] = []
    for mv in moves:
        obj = scene.object(mv.object_id)
        cell, z = mv.dest
        text = _move_text(obj, mv.src[0], f"at ({cell[0]}, {cell[1]})")
        parts.append((text, ObjectAtCell(obj.id, cell, z)))
    if parts and final is not None:
        parts[-1] = (parts[-1][0], final)
    return _make_plan(parts)


def plan_rearrange(scene: Scene, placements: dict[int, tuple[Cell, int]]) -> Plan:
    for oid in placements:
        if scene.object(oid) is None:
            raise GoalInfeasible(f"object {oid} not in scene")
    moves = achieve_placements(scene, placements)
    return _moves_to_plan(scene, moves)


def plan_stack_order(scene: Scene, ids_bottom_up: Sequence[int]) -> Plan:
    objs = [scene.object(oid) for oid in ids_bottom_up]
    if any(o is None for o in objs):
        raise GoalInfeasible("stack goal references unknown objects")
    base = objs[0]
    base_cell = base.cell if base.z == 0 else _first_free_cell(scene, set())
    targets = {obj.id: (base_cell, i) for i, obj in enumerate(objs)}
    moves = achieve_placements(scene, targets)
    return _moves_to_plan(scene, moves, final=StackedOrder(tuple(ids_bottom_up)))


def plan_stack_texture(scene: Scene) -> Plan:
    groups: dict[str, list[SceneObject]] = {}
    for obj in sorted(scene.objects, key=lambda o: o.id):
        groups.setdefault(obj.texture.value, []).append(obj)
    targets: dict[int, tuple[Cell, int]] = {}
    used_bases: set[Cell] = set()
    for texture in sorted(groups):
        members = groups[texture]
        if len(members) < 2:
            continue
        base = members[0]
        base_cell = base.cell if base.z == 0 and base.cell not in used_bases else _first_free_cell(
            scene, used_bases
        )
        used_bases.add(base_cell)
        for i, member in enumerate(members):
            targets[member.id] = (base_cell, i)
    moves = achieve_placements(scene, targets)
    return _moves_to_plan(scene, moves)


def plan_square(scene: Scene, side: int) -> Plan:
    cubes = sorted((o for o in scene.objects if o.kind is ObjectKind.CUBE), key=lambda o: o.id)[:4]
    if len(cubes) < 4:
        raise GoalInfeasible("square goal needs four cubes")
    cube_ids = {c.id for c in cubes}
    for ay in range(scene.height - side):
        for ax in range(scene.width - side):
            corners = [(ax, ay), (ax + side, ay), (ax, ay + side), (ax + side, ay + side)]
            ok = True
            for corner in corners:
                h = scene.stack_height(corner)
                if h == 0:
                    continue
                occ = scene.object_at(corner, 0)
                if h != 1 or occ is None or occ.id not in cube_ids:
                    ok = False
                    break
            if not ok:
                continue
            # Keep cubes already on a corner; assign the rest by ascending id.
            assigned: dict[int, Cell] = {}
            free_corners = []
            for corner in corners:
                occ = scene.object_at(corner, 0)
                if occ is not None and occ.id in cube_ids:
                    assigned[occ.id] = corner
                else:
                    free_corners.append(corner)
            rest = [c for c in cubes if c.id not in assigned]
            for cube, corner in zip(rest, free_corners):
                assigned[cube.id] = corner
            targets = {oid: (cell, 0) for oid, cell in assigned.items()}
            moves = achieve_placements(scene, targets)
            return _moves_to_plan(scene, moves)
    raise GoalInfeasible(f"no free square of side {side} fits the table")


def _first_free_cell(scene: Scene, excluded: set[Cell]) -> Cell:
    for y in range(scene.height):
        for x in range(scene.width):
            cell = (x, y)
            if cell not in excluded and scene.stack_height(cell) == 0:
                return cell
    raise NoBufferCell("table is full")


# -- oracle dispatch -----------------------------------------------------------------


_SPELL_RE = re.compile(r"\bspell\s+([A-Za-z]+)", re.IGNORECASE)
_SQUARE_RE = re.compile(r"square of side (\d+)", re.IGNORECASE)
_REARRANGE_CLAUSE_RE = re.compile(r"move the ([a-z' ]+?) to \((\d+),\s*(\d+)\)", re.IGNORECASE)


def plan(spec: PlannerSpec, instruction: Instruction, scene: Scene, timeout_s: float = 10.0, transport=None) -> Plan:
    """Produce a monitored sub-goal plan for a slow instruction."""
    if spec.kind is PlannerKind.REMOTE:
        return remote_plan(spec, instruction, scene, timeout_s=timeout_s, transport=transport)
    return oracle_plan(spec, instruction, scene)


def oracle_plan(spec: PlannerSpec, instruction: Instruction, scene: Scene) -> Plan:
    text = instruction.text
    lowered = text.lower()

    if "solve the equation" in lowered or "complete the equation" in lowered:
        equation_text, _, _ = read_equation(scene)
        return plan_math(equation_text, scene)

    spell = _SPELL_RE.search(text)
    if spell is not None:
        return plan_word(scene, spell.group(1).upper())

    if "sort the cubes by color" in lowered or (
        "cube" in lowered and "same color" in lowered
    ):
        return plan_color_sort(scene)

    if lowered.startswith("rearrange the scene"):
        placements: dict[int, tuple[Cell, int]] = {}
        for phrase_text, x, y in _REARRANGE_CLAUSE_RE.findall(text):
            phrase = fastpath.parse_phrase(phrase_text.strip())
            obj = fastpath.ground_phrase(phrase, scene)
            placements[obj.id] = ((int(x), int(y)), 0)
        if not placements:
            raise UnrecognizedTask("rearrange instruction lists no placements")
        return plan_rearrange(scene, placements)

    square = _SQUARE_RE.search(lowered)
    if square is not None:
        return plan_square(scene, int(square.group(1)))

    if "stack in order from bottom to top" in lowered:
        _, _, listing = text.partition(":")
        ids = []
        for chunk in listing.split(","):
            words = chunk.strip()
            if words.startswith("the "):
                words = words[4:]
            phrase = fastpath.parse_phrase(words)
            ids.append(fastpath.ground_phrase(phrase, scene).id)
        return plan_stack_order(scene, ids)

    if "same texture" in lowered or "matching texture" in lowered:
        return plan_stack_texture(scene)

    lexicon = (
        load_lexicon(spec.intent_lexicon_path) if spec.intent_lexicon_path else default_lexicon()
    )
    try:
        return plan_intent(instruction, scene, lexicon)
    except UnrecognizedIntent:
        raise UnrecognizedTask(f"no oracle family matches {instruction.text!r}")


# -- remote planner ------------------------------------------------------------------


_EXEMPLARS = """\
Example A
scene: table 8x8; none letter_tile 'C' at (1,2,0); none letter_tile 'A' at (2,2,0); none letter_tile 'T' at (3,2,0)
instruction: fix the word to spell ACT
steps:
1. pick up the letter tile 'A' at (2, 2) and place it at (4, 2)
2. pick up the letter tile 'C' at (1, 2) and place it at (2, 2)
3. pick up the letter tile 'A' at (4, 2) and place it at (1, 2)

Example B
scene: table 8x8; red cube at (3,3,0); green cube at (5,4,0)
instruction: sort the cubes by color into the matching zones
steps:
1. pick up the red cube at (3, 3) and place it in the red zone
2. pick up the green cube at (5, 4) and place it in the green zone
"""


def load_prompt_template(template_id: str) -> str:
    ref = resources.files("twolane.data.prompts").joinpath(f"{template_id}.txt")
    return ref.read_text(encoding="utf-8")


_STEP_LINE_RE = re.compile(r"^\s*(\d+)[.)]\s*(.*\S)\s*$")


def parse_plan(text: str, scene: Scene) -> Plan:
    """Parse numbered-step text into a Plan, deriving predicates per step.

    Step numbering must be 1..n in order. Predicates come from our step
    grammar, never from the provider; a step whose text does not ground
    carries no predicate and will fail the episode at the grounding stage.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    parts: list[tuple[str, Optional[Predicate]]] = []
    held_hint: Optional[int] = None
    for i, line in enumerate(lines):
        match = _STEP_LINE_RE.match(line)
        if match is None:
            raise PlanParseError(i + 1, f"expected a numbered step, got {line.strip()!r}")
        number = int(match.group(1))
        if number != len(parts) + 1:
            raise PlanParseError(i + 1, f"step number {number} out of sequence")
        step_text = match.group(2)
        predicate: Optional[Predicate] = None
        try:
            cmd = fastpath.parse_step(step_text)
        except Exception:
            cmd = None
        if cmd is not None:
            predicate = fastpath.derive_predicate(cmd, scene, held_hint=held_hint)
            if isinstance(cmd, fastpath.PickStep):
                try:
                    held_hint = fastpath.ground_phrase(cmd.obj, scene).id
                except NoMatch:
                    held_hint = None
            elif isinstance(cmd, (fastpath.MoveStep, fastpath.PlaceStep)):
                held_hint = None
        parts.append((step_text, predicate))
    return _make_plan(parts, source=PlanSource.REMOTE)


def remote_plan(
    spec: PlannerSpec,
    instruction: Instruction,
    scene: Scene,
    timeout_s: float = 10.0,
    transport=None,
) -> Plan:
    template = load_prompt_template(spec.prompt_template_id)
    prompt = template.format(
        caption=caption(scene), instruction=instruction.text, exemplars=_EXEMPLARS
    )
    content = providers.chat_complete(
        spec.endpoint, spec.model_name, prompt, timeout_s=timeout_s, transport=transport
    )
    return parse_plan(content, scene)
