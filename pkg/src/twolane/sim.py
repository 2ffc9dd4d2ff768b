"""Deterministic tabletop simulator.

Applies primitive actions to immutable scenes, generates seeded task
scenes with feasibility guaranteed by construction, and judges task
success. Task family names are a stable contract used in config, CLI
flags, API payloads, and benchmark output.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, replace
from typing import Optional

from . import equations, instructions
from .errors import UnsupportedFamily
from .model import (
    Cell,
    Color,
    ObjectKind,
    Pick,
    Place,
    PrimitiveAction,
    Rotate,
    Scene,
    SceneObject,
    Texture,
    Zone,
)

MAX_STACK = 4

FAMILIES = (
    "math_reasoning",
    "word_correction",
    "color_sort",
    "intent_recognition",
    "pick_color",
    "pick_place_box",
    "pick_toy_box",
    "rotate",
    "simple_manipulation",
    "rearrange",
    "visual_reasoning_square",
    "stack_order",
    "stack_texture",
)

FAST_FAMILIES = frozenset(
    {"pick_color", "pick_place_box", "pick_toy_box", "rotate", "simple_manipulation"}
)
SLOW_FAMILIES = frozenset(FAMILIES) - FAST_FAMILIES

_COLORS = (Color.RED, Color.GREEN, Color.BLUE, Color.YELLOW)

# (label, attributes) pairs the intent scenes draw from.
FOODS = (
    ("chili", ("spicy",)),
    ("jalapeno", ("spicy",)),
    ("wasabi", ("spicy",)),
    ("apple", ()),
    ("bread", ()),
    ("banana", ()),
    ("cake", ("sweet",)),
    ("candy", ("sweet",)),
)

_WORDS = ("ICRA", "ROBOT", "ARM", "GRASP", "TABLE", "PLAN", "CUBE", "SORT", "WORD", "LEVEL")


class SimError(str, enum.Enum):
    NOT_HOLDING = "NotHolding"
    ALREADY_HOLDING = "AlreadyHolding"
    CELL_OCCUPIED = "CellOccupied"
    NO_SUCH_OBJECT = "NoSuchObject"
    OUT_OF_BOUNDS = "OutOfBounds"
    UNSTACKABLE = "Unstackable"


class SimulationError(Exception):
    """An action was rejected; `code` says why and `action` identifies it."""

    def __init__(self, code: SimError, action: PrimitiveAction, detail: str = ""):
        self.code = code
        self.action = action
        super().__init__(f"{code.value}: {action!r}" + (f" ({detail})" if detail else ""))


@dataclass(frozen=True)
class TaskSpec:
    family: str
    goal: dict
    instruction_text: str


# -- action application ------------------------------------------------------


def apply(scene: Scene, action: PrimitiveAction) -> Scene:
    """Apply one primitive action, returning a new scene.

    Pick lifts an unburied object into the gripper; Place drops the held
    object at the lowest free level of a cell; Rotate adds clockwise
    degrees mod 360. The input scene is never mutated.
    """
    if isinstance(action, Pick):
        obj = scene.object(action.object_id)
        if obj is None:
            raise SimulationError(SimError.NO_SUCH_OBJECT, action)
        if scene.held is not None:
            raise SimulationError(SimError.ALREADY_HOLDING, action)
        if scene.stack_height(obj.cell) - 1 > obj.z:
            raise SimulationError(SimError.CELL_OCCUPIED, action, "target is buried")
        return replace(scene, held=obj.id)

    if isinstance(action, Place):
        if scene.held is None:
            raise SimulationError(SimError.NOT_HOLDING, action)
        x, y = action.cell
        if not (0 <= x < scene.width and 0 <= y < scene.height):
            raise SimulationError(SimError.OUT_OF_BOUNDS, action)
        level = scene.stack_height(action.cell)
        if level >= MAX_STACK:
            raise SimulationError(SimError.UNSTACKABLE, action, f"column full at {action.cell}")
        if action.z is not None and action.z != level:
            code = SimError.CELL_OCCUPIED if action.z < level else SimError.UNSTACKABLE
            raise SimulationError(code, action, f"level {action.z} unavailable, lowest free is {level}")
        obj = scene.object(scene.held)
        placed = replace(obj, cell=action.cell, z=level)
        return replace(scene.replace_object(placed), held=None)

    if isinstance(action, Rotate):
        if action.degrees == 0:
            raise ValueError("rotate degrees must be a nonzero integer")
        obj = scene.object(action.object_id)
        if obj is None:
            raise SimulationError(SimError.NO_SUCH_OBJECT, action)
        turned = replace(obj, orientation_deg=(obj.orientation_deg + action.degrees) % 360)
        return scene.replace_object(turned)

    raise TypeError(f"unknown action {action!r}")


def apply_all(scene: Scene, actions: list[PrimitiveAction]) -> Scene:
    for action in actions:
        scene = apply(scene, action)
    return scene


# -- scene builders -----------------------------------------------------------


class _Builder:
    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.objects: list[SceneObject] = []
        self.zones: dict[str, Zone] = {}
        self._next_id = 1
        self._used: set[Cell] = set()

    def add(
        self,
        kind: ObjectKind,
        cell: Cell,
        color: Color = Color.NONE,
        texture: Texture = Texture.PLAIN,
        label: str = "",
        orientation: int = 0,
        attributes: tuple[str, ...] = (),
    ) -> SceneObject:
        obj = SceneObject(
            id=self._next_id,
            kind=kind,
            color=color,
            texture=texture,
            label=label,
            cell=cell,
            z=0,
            orientation_deg=orientation,
            attributes=frozenset(attributes),
        )
        self._next_id += 1
        self.objects.append(obj)
        self._used.add(cell)
        return obj

    def zone(self, name: str, x0: int, y0: int, x1: int, y1: int) -> Zone:
        z = Zone(x0, y0, x1, y1)
        self.zones[name] = z
        return z

    def free_cell(self, rng: random.Random, x0: int, y0: int, x1: int, y1: int) -> Cell:
        candidates = [
            (x, y) for x in range(x0, x1) for y in range(y0, y1) if (x, y) not in self._used
        ]
        if not candidates:
            raise ValueError("builder region exhausted")
        return candidates[rng.randrange(len(candidates))]

    def scene(self, held: Optional[int] = None) -> Scene:
        s = Scene(
            width=self.width,
            height=self.height,
            objects=tuple(self.objects),
            held=held,
            zones=dict(self.zones),
        )
        s.validate()
        return s


def build_equation_scene(equation_text: str, width: int = 16, height: int = 8) -> tuple[Scene, TaskSpec]:
    """Scene for one equation: tile row at y=1, stocked tile pool below.

    The pool holds every digit the answer needs plus one spare of each
    digit, so a correct plan never lacks a tile.
    """
    eq = equations.parse_equation(equation_text)
    answer = equations.solve(eq)
    digits_needed = equations.answer_digits(eq, answer)
    tiles = eq.tiles()
    if len(tiles) + (len(digits_needed) if eq.form == "direct" else 0) > width:
        raise ValueError(f"equation {equation_text!r} does not fit width {width}")

    b = _Builder(width, height)
    row_y = 1
    for i, ch in enumerate(tiles):
        kind = ObjectKind.DIGIT_TILE if ch.isdigit() else ObjectKind.SYMBOL_TILE
        b.add(kind, (i, row_y), label=ch)
    pool = b.zone("tile_pool", 0, height - 3, width, height)
    stock = list(digits_needed) + [str(d) for d in range(10)]
    cells = list(pool.cells())
    # Row-major pool layout keeps the left columns free for parked tiles.
    cells.sort(key=lambda c: (c[1], c[0]))
    for ch, cell in zip(stock, cells[: len(stock)]):
        b.add(ObjectKind.DIGIT_TILE, cell, label=ch)

    spec = TaskSpec(
        family="math_reasoning",
        goal={
            "equation": eq.text(),
            "answer": str(answer),
            "row_y": row_y,
            "row_len": len(tiles),
            "solved_row": equations.solved_row(eq, answer),
        },
        instruction_text=instructions.math_text(),
    )
    return b.scene(), spec


def build_word_scene(
    target: str, arrangement: list[Optional[str]], width: int = 8, height: int = 8
) -> tuple[Scene, TaskSpec]:
    """Scene with `target`'s letters laid out per `arrangement` over the
    word row plus the single blank slot (None marks the empty cell)."""
    length = len(target)
    if len(arrangement) != length + 1:
        raise ValueError("arrangement must cover the word row plus the blank slot")
    if sorted(ch for ch in arrangement if ch is not None) != sorted(target):
        raise ValueError("arrangement letters must be a permutation of the target")
    x0, y = 1, 2
    b = _Builder(width, height)
    b.zone("word_row", x0, y, x0 + length, y + 1)
    b.zone("blank_slot", x0 + length, y, x0 + length + 1, y + 1)
    for i, ch in enumerate(arrangement):
        if ch is not None:
            b.add(ObjectKind.LETTER_TILE, (x0 + i, y), label=ch)
    spec = TaskSpec(
        family="word_correction",
        goal={"target": target, "row_y": y, "x0": x0, "length": length},
        instruction_text=instructions.word_text(target),
    )
    return b.scene(), spec


def _gen_math(rng: random.Random) -> tuple[Scene, TaskSpec]:
    form = rng.choice(("add", "sub", "mul", "div", "x_add_l", "x_add_r", "x_sub", "x_mul"))
    if form == "add":
        text = f"{rng.randint(1, 999)} + {rng.randint(1, 999)} ="
    elif form == "sub":
        a = rng.randint(1, 999)
        text = f"{a} - {rng.randint(0, a)} ="
    elif form == "mul":
        text = f"{rng.randint(2, 99)} × {rng.randint(2, 99)} ="
    elif form == "div":
        b_, q = rng.randint(2, 12), rng.randint(2, 99)
        text = f"{b_ * q} ÷ {b_} ="
    elif form == "x_add_l":  # a + x = c, single-digit x
        a, x = rng.randint(1, 999), rng.randint(0, 9)
        text = f"{a} + x = {a + x}"
    elif form == "x_add_r":
        a, x = rng.randint(1, 999), rng.randint(0, 9)
        text = f"x + {a} = {a + x}"
    elif form == "x_sub":  # x - a = c with x = a + c <= 9
        a = rng.randint(1, 8)
        c = rng.randint(0, 9 - a)
        text = f"x - {a} = {c}"
    else:  # a × x = c
        a, x = rng.randint(2, 99), rng.randint(0, 9)
        text = f"{a} × x = {a * x}"
    return build_equation_scene(text)


def _gen_word(rng: random.Random) -> tuple[Scene, TaskSpec]:
    target = rng.choice(_WORDS)
    letters: list[Optional[str]] = list(target) + [None]
    while letters[: len(target)] == list(target):
        rng.shuffle(letters)  # fresh scenes start unsolved
    return build_word_scene(target, letters)


def _color_zone_boxes(b: _Builder) -> None:
    b.zone("red_zone", 0, 0, 2, 3)
    b.zone("green_zone", 6, 0, 8, 3)
    b.zone("blue_zone", 0, 5, 2, 8)
    b.zone("yellow_zone", 6, 5, 8, 8)


def _gen_color_sort(rng: random.Random) -> tuple[Scene, TaskSpec]:
    b = _Builder(8, 8)
    _color_zone_boxes(b)
    colors = rng.sample(_COLORS, rng.randint(2, 4))
    for color in colors:
        for _ in range(rng.randint(1, 3)):
            cell = b.free_cell(rng, 2, 0, 6, 8)  # middle band, clear of the zones
            b.add(ObjectKind.CUBE, cell, color=color)
    spec = TaskSpec(
        family="color_sort",
        goal={"colors": sorted(c.value for c in colors)},
        instruction_text=instructions.color_sort_text(),
    )
    return b.scene(), spec


def _gen_intent(rng: random.Random) -> tuple[Scene, TaskSpec]:
    b = _Builder(8, 8)
    b.zone("far_zone", 0, 0, 8, 2)
    picks = rng.sample(range(len(FOODS)), rng.randint(3, 5))
    if not any(FOODS[i][1] == ("spicy",) for i in picks):
        picks[0] = 0  # guarantee at least one spicy item
    for i in sorted(picks):
        label, attrs = FOODS[i]
        cell = b.free_cell(rng, 0, 3, 8, 8)
        b.add(ObjectKind.FOOD, cell, label=label, attributes=attrs)
    spec = TaskSpec(
        family="intent_recognition",
        goal={"attribute": "spicy", "zone": "far_zone"},
        instruction_text=instructions.intent_text(),
    )
    return b.scene(), spec


def _gen_pick_color(rng: random.Random) -> tuple[Scene, TaskSpec]:
    b = _Builder(8, 8)
    target = rng.choice(_COLORS)
    b.add(ObjectKind.CUBE, b.free_cell(rng, 1, 1, 7, 7), color=target)
    for _ in range(rng.randint(2, 4)):
        b.add(ObjectKind.CUBE, b.free_cell(rng, 1, 1, 7, 7), color=rng.choice(_COLORS))
    spec = TaskSpec(
        family="pick_color",
        goal={"color": target.value},
        instruction_text=instructions.pick_color_text(target.value),
    )
    return b.scene(), spec


def _gen_pick_place_box(rng: random.Random) -> tuple[Scene, TaskSpec]:
    b = _Builder(8, 8)
    b.zone("left_box", 0, 5, 2, 8)
    b.zone("right_box", 6, 5, 8, 8)
    target = rng.choice(_COLORS)
    side = rng.choice(("left", "right"))
    b.add(ObjectKind.CUBE, b.free_cell(rng, 1, 0, 7, 4), color=target)
    for _ in range(rng.randint(1, 3)):
        b.add(ObjectKind.CUBE, b.free_cell(rng, 1, 0, 7, 4), color=rng.choice(_COLORS))
    spec = TaskSpec(
        family="pick_place_box",
        goal={"color": target.value, "side": side},
        instruction_text=instructions.pick_place_box_text(target.value, side),
    )
    return b.scene(), spec


def _gen_pick_toy_box(rng: random.Random) -> tuple[Scene, TaskSpec]:
    b = _Builder(8, 8)
    toy = b.add(ObjectKind.TOY, b.free_cell(rng, 1, 1, 7, 7), color=rng.choice(_COLORS))
    box = b.add(ObjectKind.BOX, b.free_cell(rng, 1, 1, 7, 7), color=rng.choice(_COLORS))
    for _ in range(rng.randint(0, 2)):
        b.add(ObjectKind.CUBE, b.free_cell(rng, 1, 1, 7, 7), color=rng.choice(_COLORS))
    spec = TaskSpec(
        family="pick_toy_box",
        goal={"object_id": toy.id, "container_id": box.id},
        instruction_text=instructions.pick_toy_box_text(),
    )
    return b.scene(), spec


def _gen_rotate(rng: random.Random) -> tuple[Scene, TaskSpec]:
    b = _Builder(8, 8)
    initial = rng.choice((0, 90, 180, 270))
    bowl = b.add(
        ObjectKind.BOWL, b.free_cell(rng, 1, 1, 7, 7), color=rng.choice(_COLORS), orientation=initial
    )
    for _ in range(rng.randint(1, 3)):
        b.add(ObjectKind.CUBE, b.free_cell(rng, 1, 1, 7, 7), color=rng.choice(_COLORS))
    degrees = rng.choice((30, 45, 60, 90, 120, 180, 270))
    spec = TaskSpec(
        family="rotate",
        goal={"object_id": bowl.id, "target_orientation": (initial + degrees) % 360},
        instruction_text=instructions.rotate_text("bowl", degrees),
    )
    return b.scene(), spec


def _gen_simple_manipulation(rng: random.Random) -> tuple[Scene, TaskSpec]:
    b = _Builder(8, 8)
    obj_color, container_color = rng.sample(_COLORS, 2)
    toy = b.add(ObjectKind.TOY, b.free_cell(rng, 1, 1, 7, 7), color=obj_color)
    bowl = b.add(ObjectKind.BOWL, b.free_cell(rng, 1, 1, 7, 7), color=container_color)
    for _ in range(rng.randint(0, 2)):
        b.add(ObjectKind.CUBE, b.free_cell(rng, 1, 1, 7, 7), color=rng.choice(_COLORS))
    spec = TaskSpec(
        family="simple_manipulation",
        goal={"object_id": toy.id, "container_id": bowl.id},
        instruction_text=instructions.simple_manipulation_text(obj_color.value, container_color.value),
    )
    return b.scene(), spec


_REARRANGE_KINDS = (ObjectKind.CUBE, ObjectKind.TOY, ObjectKind.BOWL)


def _gen_rearrange(rng: random.Random) -> tuple[Scene, TaskSpec]:
    b = _Builder(8, 8)
    combos = [(k, c) for k in _REARRANGE_KINDS for c in _COLORS]
    chosen = rng.sample(combos, rng.randint(3, 5))
    objs = [b.add(kind, b.free_cell(rng, 1, 1, 7, 7), color=color) for kind, color in chosen]
    cells = [o.cell for o in objs]
    targets = cells[:]
    rng.shuffle(targets)
    if targets == cells:
        targets[0], targets[1] = targets[1], targets[0]
    moves = []
    placements = {}
    for obj, dest in zip(objs, targets):
        if dest != obj.cell:
            moves.append((f"{obj.color.value} {obj.kind.value}", dest))
            placements[str(obj.id)] = [dest[0], dest[1], 0]
    spec = TaskSpec(
        family="rearrange",
        goal={"placements": placements},
        instruction_text=instructions.rearrange_text(moves),
    )
    return b.scene(), spec


def _gen_square(rng: random.Random) -> tuple[Scene, TaskSpec]:
    side = rng.randint(2, 3)
    colors = rng.sample(_COLORS, 4)
    while True:
        b = _Builder(8, 8)
        ids = [b.add(ObjectKind.CUBE, b.free_cell(rng, 0, 0, 8, 8), color=c).id for c in colors]
        spec = TaskSpec(
            family="visual_reasoning_square",
            goal={"ids": sorted(ids), "side": side},
            instruction_text=instructions.square_text(side),
        )
        scene = b.scene()
        if not check_success(spec, scene):  # fresh scenes start unsolved
            return scene, spec


def _gen_stack_order(rng: random.Random) -> tuple[Scene, TaskSpec]:
    b = _Builder(8, 8)
    count = rng.randint(3, 4)
    colors = rng.sample(_COLORS, count)
    objs = [b.add(ObjectKind.CUBE, b.free_cell(rng, 1, 1, 7, 7), color=c) for c in colors]
    order = objs[:]
    rng.shuffle(order)
    spec = TaskSpec(
        family="stack_order",
        goal={"ids_bottom_up": [o.id for o in order]},
        instruction_text=instructions.stack_order_text([f"{o.color.value} cube" for o in order]),
    )
    return b.scene(), spec


def _gen_stack_texture(rng: random.Random) -> tuple[Scene, TaskSpec]:
    b = _Builder(8, 8)
    group_texture = rng.choice((Texture.STRIPED, Texture.DOTTED, Texture.WOODEN))
    group_ids = []
    for _ in range(rng.randint(2, 3)):
        kind = rng.choice((ObjectKind.CUBE, ObjectKind.TOY))
        obj = b.add(kind, b.free_cell(rng, 1, 1, 7, 7), color=rng.choice(_COLORS), texture=group_texture)
        group_ids.append(obj.id)
    # Distractors carry unique leftover textures so no second group forms.
    leftovers = [t for t in Texture if t is not group_texture]
    rng.shuffle(leftovers)
    for texture in leftovers[: rng.randint(0, 2)]:
        b.add(ObjectKind.CUBE, b.free_cell(rng, 1, 1, 7, 7), color=rng.choice(_COLORS), texture=texture)
    spec = TaskSpec(
        family="stack_texture",
        goal={"groups": {group_texture.value: sorted(group_ids)}},
        instruction_text=instructions.stack_texture_text(),
    )
    return b.scene(), spec


_GENERATORS = {
    "math_reasoning": _gen_math,
    "word_correction": _gen_word,
    "color_sort": _gen_color_sort,
    "intent_recognition": _gen_intent,
    "pick_color": _gen_pick_color,
    "pick_place_box": _gen_pick_place_box,
    "pick_toy_box": _gen_pick_toy_box,
    "rotate": _gen_rotate,
    "simple_manipulation": _gen_simple_manipulation,
    "rearrange": _gen_rearrange,
    "visual_reasoning_square": _gen_square,
    "stack_order": _gen_stack_order,
    "stack_texture": _gen_stack_texture,
}


def gen_scene(seed: int, family: str) -> tuple[Scene, TaskSpec]:
    """Deterministic seeded scene + task spec for one family."""
    gen = _GENERATORS.get(family)
    if gen is None:
        raise UnsupportedFamily(f"unknown task family {family!r}")
    return gen(random.Random(seed))


# -- success judgment -----------------------------------------------------------


def _row_labels(scene: Scene, y: int, x0: int, x1: int) -> str:
    labels = []
    for x in range(x0, x1):
        obj = scene.object_at((x, y), 0)
        if obj is not None and obj.label:
            labels.append(obj.label)
    return "".join(labels)


def check_success(spec: TaskSpec, scene: Scene) -> bool:
    """Pure family-specific success predicate."""
    family, goal = spec.family, spec.goal

    if family == "math_reasoning":
        return _row_labels(scene, goal["row_y"], 0, scene.width) == goal["solved_row"]

    if family == "word_correction":
        return _row_labels(scene, goal["row_y"], goal["x0"], goal["x0"] + goal["length"]) == goal["target"]

    if family == "color_sort":
        for obj in scene.objects:
            if obj.kind is not ObjectKind.CUBE or obj.color.value not in goal["colors"]:
                continue
            zone = scene.zones.get(f"{obj.color.value}_zone")
            if zone is None or obj.id == scene.held or not zone.contains(obj.cell):
                return False
        return True

    if family == "intent_recognition":
        zone = scene.zones.get(goal["zone"])
        if zone is None:
            return False
        for obj in scene.objects:
            if goal["attribute"] in obj.attributes:
                if obj.id == scene.held or not zone.contains(obj.cell):
                    return False
        return True

    if family == "pick_color":
        if scene.held is None:
            return False
        obj = scene.object(scene.held)
        return obj.kind is ObjectKind.CUBE and obj.color.value == goal["color"]

    if family == "pick_place_box":
        zone = scene.zones.get(f"{goal['side']}_box")
        if zone is None:
            return False
        return any(
            o.kind is ObjectKind.CUBE
            and o.color.value == goal["color"]
            and o.id != scene.held
            and zone.contains(o.cell)
            for o in scene.objects
        )

    if family in ("pick_toy_box", "simple_manipulation"):
        obj = scene.object(goal["object_id"])
        container = scene.object(goal["container_id"])
        if obj is None or container is None or scene.held in (obj.id, container.id):
            return False
        return obj.cell == container.cell and obj.z > container.z

    if family == "rotate":
        obj = scene.object(goal["object_id"])
        return obj is not None and obj.orientation_deg == goal["target_orientation"]

    if family == "rearrange":
        for oid, (x, y, z) in goal["placements"].items():
            obj = scene.object(int(oid))
            if obj is None or obj.id == scene.held or obj.cell != (x, y) or obj.z != z:
                return False
        return True

    if family == "visual_reasoning_square":
        cells = set()
        for oid in goal["ids"]:
            obj = scene.object(oid)
            if obj is None or obj.id == scene.held or obj.z != 0:
                return False
            cells.add(obj.cell)
        if len(cells) != 4:
            return False
        xs = sorted({c[0] for c in cells})
        ys = sorted({c[1] for c in cells})
        if len(xs) != 2 or len(ys) != 2:
            return False
        side = goal["side"]
        if xs[1] - xs[0] != side or ys[1] - ys[0] != side:
            return False
        return cells == {(x, y) for x in xs for y in ys}

    if family == "stack_order":
        ids = goal["ids_bottom_up"]
        objs = [scene.object(oid) for oid in ids]
        if any(o is None or o.id == scene.held for o in objs):
            return False
        base = objs[0]
        return all(o.cell == base.cell and o.z == i for i, o in enumerate(objs))

    if family == "stack_texture":
        for ids in goal["groups"].values():
            objs = [scene.object(oid) for oid in ids]
            if any(o is None or o.id == scene.held for o in objs):
                return False
            cells = {o.cell for o in objs}
            if len(cells) != 1 or sorted(o.z for o in objs) != list(range(len(objs))):
                return False
        return True

    raise UnsupportedFamily(f"unknown task family {family!r}")
