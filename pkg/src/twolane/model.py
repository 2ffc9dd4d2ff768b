"""Core domain types: scenes, instructions, actions, plans, trajectories.

Everything here is an immutable value object; operations are pure. The
caption grammar is versioned (CAPTION_VERSION) and part of the public
contract — alignment and planning both key off it.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping, Optional, Sequence, Union

from .errors import IdSetMismatch, InvalidScene

CAPTION_VERSION = 1

Cell = tuple[int, int]


class ObjectKind(str, enum.Enum):
    CUBE = "cube"
    LETTER_TILE = "letter_tile"
    DIGIT_TILE = "digit_tile"
    SYMBOL_TILE = "symbol_tile"
    TOY = "toy"
    FOOD = "food"
    BOX = "box"
    BOWL = "bowl"


#: Kinds whose objects carry a non-empty label.
LABELED_KINDS = frozenset(
    {ObjectKind.LETTER_TILE, ObjectKind.DIGIT_TILE, ObjectKind.SYMBOL_TILE, ObjectKind.FOOD}
)


class Color(str, enum.Enum):
    RED = "red"
    GREEN = "green"
    BLUE = "blue"
    YELLOW = "yellow"
    NONE = "none"


class Texture(str, enum.Enum):
    PLAIN = "plain"
    STRIPED = "striped"
    DOTTED = "dotted"
    WOODEN = "wooden"


class SystemLabel(str, enum.Enum):
    FAST = "FAST"
    SLOW = "SLOW"


@dataclass(frozen=True)
class SceneObject:
    id: int
    kind: ObjectKind
    color: Color = Color.NONE
    texture: Texture = Texture.PLAIN
    label: str = ""
    cell: Cell = (0, 0)
    z: int = 0
    orientation_deg: int = 0
    attributes: frozenset[str] = frozenset()

    def validate(self) -> None:
        if bool(self.label) != (self.kind in LABELED_KINDS):
            raise InvalidScene(
                f"object {self.id}: label must be non-empty iff kind is a labeled kind "
                f"(kind={self.kind.value}, label={self.label!r})"
            )
        if self.z < 0:
            raise InvalidScene(f"object {self.id}: negative stack level {self.z}")
        if not 0 <= self.orientation_deg < 360:
            raise InvalidScene(f"object {self.id}: orientation {self.orientation_deg} out of range")


@dataclass(frozen=True)
class Zone:
    """Axis-aligned cell rectangle, upper bounds exclusive."""

    x0: int
    y0: int
    x1: int
    y1: int

    def contains(self, cell: Cell) -> bool:
        return self.x0 <= cell[0] < self.x1 and self.y0 <= cell[1] < self.y1

    def cells(self) -> Iterator[Cell]:
        """Cells in leftmost-first order (ascending x, then ascending y)."""
        for x in range(self.x0, self.x1):
            for y in range(self.y0, self.y1):
                yield (x, y)


@dataclass(frozen=True)
class Scene:
    width: int
    height: int
    objects: tuple[SceneObject, ...] = ()
    held: Optional[int] = None
    zones: Mapping[str, Zone] = field(default_factory=dict)

    def validate(self) -> None:
        seen_ids = set()
        occupied: dict[tuple[int, int, int], int] = {}
        for obj in self.objects:
            obj.validate()
            if obj.id in seen_ids:
                raise InvalidScene(f"duplicate object id {obj.id}")
            seen_ids.add(obj.id)
            if obj.id == self.held:
                continue  # held object has no cell occupancy
            x, y = obj.cell
            if not (0 <= x < self.width and 0 <= y < self.height):
                raise InvalidScene(f"object {obj.id}: cell {obj.cell} outside {self.width}x{self.height}")
            key = (x, y, obj.z)
            if key in occupied:
                raise InvalidScene(f"objects {occupied[key]} and {obj.id} share cell {key}")
            occupied[key] = obj.id
        for (x, y, z), oid in occupied.items():
            if z > 0 and (x, y, z - 1) not in occupied:
                raise InvalidScene(f"object {oid} floats at {(x, y, z)} with no support")
        if self.held is not None and self.held not in seen_ids:
            raise InvalidScene(f"held id {self.held} not in scene")

    # -- lookups -------------------------------------------------------

    def object(self, oid: int) -> Optional[SceneObject]:
        for obj in self.objects:
            if obj.id == oid:
                return obj
        return None

    def occupancy(self) -> dict[tuple[int, int, int], int]:
        """(x, y, z) -> object id for all non-held objects."""
        return {
            (o.cell[0], o.cell[1], o.z): o.id for o in self.objects if o.id != self.held
        }

    def stack_height(self, cell: Cell) -> int:
        levels = [o.z for o in self.objects if o.id != self.held and o.cell == cell]
        return max(levels) + 1 if levels else 0

    def object_at(self, cell: Cell, z: int) -> Optional[SceneObject]:
        for o in self.objects:
            if o.id != self.held and o.cell == cell and o.z == z:
                return o
        return None

    def replace_object(self, new: SceneObject) -> Scene:
        objs = tuple(new if o.id == new.id else o for o in self.objects)
        return replace(self, objects=objs)


@dataclass(frozen=True)
class Instruction:
    id: str
    text: str

    def validate(self) -> None:
        if not self.text.strip():
            raise InvalidScene("instruction text empty after trimming")


# -- primitive actions --------------------------------------------------


@dataclass(frozen=True)
class Pick:
    object_id: int


@dataclass(frozen=True)
class Place:
    cell: Cell
    z: Optional[int] = None  # resolved to the lowest free level when applied


@dataclass(frozen=True)
class Rotate:
    object_id: int
    degrees: int  # nonzero, clockwise


PrimitiveAction = Union[Pick, Place, Rotate]


# -- predicates ----------------------------------------------------------
#
# Symbolic success descriptors, evaluable against any Scene without side
# effects. These are what plan monitoring trusts; step text is not.


@dataclass(frozen=True)
class ObjectAtZone:
    object_id: int
    zone: str

    def evaluate(self, scene: Scene) -> bool:
        obj = scene.object(self.object_id)
        zone = scene.zones.get(self.zone)
        if obj is None or zone is None or obj.id == scene.held:
            return False
        return zone.contains(obj.cell)


@dataclass(frozen=True)
class ObjectAtCell:
    object_id: int
    cell: Cell
    z: Optional[int] = None  # None: any stack level at the cell

    def evaluate(self, scene: Scene) -> bool:
        obj = scene.object(self.object_id)
        if obj is None or obj.id == scene.held:
            return False
        return obj.cell == self.cell and (self.z is None or obj.z == self.z)


@dataclass(frozen=True)
class LabelSequenceAtRow:
    """Labels of tiles in a row segment, read left to right, spell `labels`.

    Cells without a tile contribute nothing; every label in the segment
    must belong to the sequence (exact match, not subsequence).
    """

    y: int
    x0: int
    x1: int  # exclusive
    labels: str

    def evaluate(self, scene: Scene) -> bool:
        found = []
        for x in range(self.x0, self.x1):
            obj = scene.object_at((x, self.y), 0)
            if obj is not None and obj.label:
                found.append(obj.label)
        return "".join(found) == self.labels


@dataclass(frozen=True)
class StackedOrder:
    object_ids: tuple[int, ...]  # bottom-up

    def evaluate(self, scene: Scene) -> bool:
        objs = [scene.object(oid) for oid in self.object_ids]
        if any(o is None or o.id == scene.held for o in objs):
            return False
        base = objs[0]
        return all(o.cell == base.cell and o.z == i for i, o in enumerate(objs))


@dataclass(frozen=True)
class GroupedByColor:
    """Every object of each listed color sits inside that color's zone."""

    zones_by_color: tuple[tuple[str, str], ...]  # (color value, zone name)

    def evaluate(self, scene: Scene) -> bool:
        mapping = dict(self.zones_by_color)
        for obj in scene.objects:
            zone_name = mapping.get(obj.color.value)
            if zone_name is None:
                continue
            zone = scene.zones.get(zone_name)
            if zone is None or obj.id == scene.held or not zone.contains(obj.cell):
                return False
        return True


@dataclass(frozen=True)
class ObjectHeld:
    object_id: int

    def evaluate(self, scene: Scene) -> bool:
        return scene.held == self.object_id


@dataclass(frozen=True)
class OrientationIs:
    object_id: int
    degrees: int

    def evaluate(self, scene: Scene) -> bool:
        obj = scene.object(self.object_id)
        return obj is not None and obj.orientation_deg == self.degrees % 360


Predicate = Union[
    ObjectAtZone, ObjectAtCell, LabelSequenceAtRow, StackedOrder, GroupedByColor, ObjectHeld, OrientationIs
]


# -- plans and trajectories ----------------------------------------------


class PlanSource(str, enum.Enum):
    ORACLE = "oracle"
    REMOTE = "remote"
    MANUAL = "manual"


@dataclass(frozen=True)
class SubGoal:
    index: int
    text: str
    predicate: Optional[Predicate]


@dataclass(frozen=True)
class Plan:
    steps: tuple[SubGoal, ...]
    source: PlanSource = PlanSource.ORACLE

    def validate(self) -> None:
        for i, step in enumerate(self.steps):
            if step.index != i:
                raise InvalidScene(f"plan step {i} carries index {step.index}")

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class Frame:
    caption: str
    action: Optional[PrimitiveAction]


@dataclass(frozen=True)
class Trajectory:
    frames: tuple[Frame, ...]
    family: str = ""
    seed: int = 0


# -- canonical captioning --------------------------------------------------


def caption(scene: Scene) -> str:
    """Canonical scene caption; equal scenes yield byte-identical captions.

    Grammar (version 1): ``table <W>x<H>; `` then per-object clauses sorted
    by id, ``<color> <kind>[ '<label>'] at (x,y,z)[ held]`` joined by "; ".
    """
    clauses = []
    for obj in sorted(scene.objects, key=lambda o: o.id):
        part = f"{obj.color.value} {obj.kind.value}"
        if obj.label:
            part += f" '{obj.label}'"
        part += f" at ({obj.cell[0]},{obj.cell[1]},{obj.z})"
        if obj.id == scene.held:
            part += " held"
        clauses.append(part)
    return f"table {scene.width}x{scene.height}; " + "; ".join(clauses)


_PAST_TENSE = {
    "pick": "picked",
    "place": "placed",
    "move": "moved",
    "rotate": "rotated",
    "grab": "grabbed",
    "set": "set",
    "put": "put",
}


def step_echo(step_text: str) -> str:
    """Canonical caption of a completed plan step: verbs shifted to past tense.

    This is the captioner's step-completion form; the dataset generator
    records it as the observation for the frame that closes a step.
    """

    def repl(match: re.Match[str]) -> str:
        return _PAST_TENSE[match.group(0)]

    pattern = r"\b(" + "|".join(_PAST_TENSE) + r")\b"
    return re.sub(pattern, repl, step_text)


# -- scene diff ------------------------------------------------------------


@dataclass(frozen=True)
class PlacementChange:
    object_id: int
    old: tuple[Cell, int]
    new: tuple[Cell, int]


def scene_diff(a: Scene, b: Scene) -> list[PlacementChange]:
    """Objects whose (cell, z) differ between two scenes with equal id sets."""
    ids_a = {o.id for o in a.objects}
    ids_b = {o.id for o in b.objects}
    if ids_a != ids_b:
        raise IdSetMismatch(f"id sets differ: {sorted(ids_a ^ ids_b)}")
    changes = []
    by_id = {o.id: o for o in b.objects}
    for obj in sorted(a.objects, key=lambda o: o.id):
        other = by_id[obj.id]
        if (obj.cell, obj.z) != (other.cell, other.z):
            changes.append(PlacementChange(obj.id, (obj.cell, obj.z), (other.cell, other.z)))
    return changes
