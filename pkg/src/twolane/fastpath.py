"""Fast-lane command grammar: parsing, grounding, and action emission.

This is the deterministic executor behind the fast system: a strict
grammar (published in docs/fast_grammar.ebnf), object grounding with a
lowest-id tie-break, and primitive-action emission. The same grammar's
step forms (pick / place / move / rotate) ground the slow lane's plan
steps, so monitoring stays symbolic end to end.

Anything outside the grammar fails loudly with ParseError; free-form
language has no business on the fast path.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import NoMatch, ParseError, ZoneFull
from .model import (
    Cell,
    ObjectAtCell,
    ObjectAtZone,
    ObjectHeld,
    ObjectKind,
    OrientationIs,
    Pick,
    Place,
    Predicate,
    PrimitiveAction,
    Rotate,
    Scene,
    SceneObject,
)

COLORS = ("red", "green", "blue", "yellow")
TEXTURES = ("plain", "striped", "dotted", "wooden")

_KIND_WORDS = {
    ("cube",): ObjectKind.CUBE,
    ("letter", "tile"): ObjectKind.LETTER_TILE,
    ("digit", "tile"): ObjectKind.DIGIT_TILE,
    ("symbol", "tile"): ObjectKind.SYMBOL_TILE,
    ("toy",): ObjectKind.TOY,
    ("food",): ObjectKind.FOOD,
    ("box",): ObjectKind.BOX,
    ("bowl",): ObjectKind.BOWL,
}

_KIND_SURFACE = {kind: " ".join(words) for words, kind in _KIND_WORDS.items()}

_RESERVED = {
    "pick", "up", "the", "and", "place", "it", "in", "into", "put", "rotate",
    "by", "degrees", "clockwise", "at", "next", "to", "on",
} | set(COLORS) | set(TEXTURES) | {w for words in _KIND_WORDS for w in words}


@dataclass(frozen=True)
class ObjectPhrase:
    color: Optional[str] = None
    texture: Optional[str] = None
    kind: Optional[ObjectKind] = None
    label: Optional[str] = None
    locator: Optional[Cell] = None
    raw: str = field(default="", compare=False)

    def render(self) -> str:
        parts = []
        if self.color:
            parts.append(self.color)
        if self.texture:
            parts.append(self.texture)
        if self.kind:
            parts.append(_KIND_SURFACE[self.kind])
        if self.label is not None and self.kind is not None:
            parts.append(f"'{self.label}'")
        elif self.label is not None:
            parts.append(self.label)
        text = " ".join(parts)
        if self.locator is not None:
            text += f" at ({self.locator[0]}, {self.locator[1]})"
        return text


# -- commands ------------------------------------------------------------------


@dataclass(frozen=True)
class PickColorCube:
    color: str

    def render(self) -> str:
        return f"pick up the {self.color} cube"


@dataclass(frozen=True)
class PickPlaceBox:
    color: str
    side: str  # "left" | "right"

    def render(self) -> str:
        return f"pick the {self.color} cube and place it in the {self.side} box"


@dataclass(frozen=True)
class PutInto:
    obj: ObjectPhrase
    container: ObjectPhrase

    def render(self) -> str:
        return f"put the {self.obj.render()} into the {self.container.render()}"


@dataclass(frozen=True)
class RotateBy:
    obj: ObjectPhrase
    degrees: int

    def render(self) -> str:
        return f"rotate the {self.obj.render()} by {self.degrees} degrees clockwise"


FastCommand = Union[PickColorCube, PickPlaceBox, PutInto, RotateBy]


# -- step destinations and step commands -----------------------------------------


@dataclass(frozen=True)
class DestCell:
    cell: Cell

    def render(self) -> str:
        return f"at ({self.cell[0]}, {self.cell[1]})"


@dataclass(frozen=True)
class DestIn:
    """'in/into the <words>': a zone when the words name one, otherwise a
    container object; resolved at grounding time against the scene."""

    words: tuple[str, ...]

    def render(self) -> str:
        return f"in the {' '.join(self.words)}"

    def zone_name(self) -> str:
        return "_".join(self.words)


@dataclass(frozen=True)
class DestNextTo:
    ref: ObjectPhrase

    def render(self) -> str:
        return f"next to the {self.ref.render()}"


@dataclass(frozen=True)
class DestOn:
    ref: ObjectPhrase

    def render(self) -> str:
        return f"on the {self.ref.render()}"


Dest = Union[DestCell, DestIn, DestNextTo, DestOn]


def dest_in_zone(zone_name: str) -> DestIn:
    return DestIn(tuple(zone_name.split("_")))


@dataclass(frozen=True)
class MoveStep:
    obj: ObjectPhrase
    dest: Dest

    def render(self) -> str:
        return f"pick up the {self.obj.render()} and place it {self.dest.render()}"


@dataclass(frozen=True)
class PickStep:
    obj: ObjectPhrase

    def render(self) -> str:
        return f"pick up the {self.obj.render()}"


@dataclass(frozen=True)
class PlaceStep:
    dest: Dest
    obj: Optional[ObjectPhrase] = None  # None: "it" (whatever is held)

    def render(self) -> str:
        what = "it" if self.obj is None else f"the {self.obj.render()}"
        return f"place {what} {self.dest.render()}"


StepCommand = Union[MoveStep, PickStep, PlaceStep, RotateBy]


# -- tokenizer -------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # "word" | "num" | "label" | "punct"
    value: str
    pos: int
    end: int


_TOKEN_RE = re.compile(r"'([^']*)'|[A-Za-z]+|\d+|[(),]|\S")


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        raw = m.group(0)
        if m.group(1) is not None:
            tokens.append(_Token("label", m.group(1), m.start(), m.end()))
        elif raw.isalpha():
            tokens.append(_Token("word", raw.lower(), m.start(), m.end()))
        elif raw.isdigit():
            tokens.append(_Token("num", raw, m.start(), m.end()))
        else:
            tokens.append(_Token("punct", raw, m.start(), m.end()))
    return tokens


class _NoParse(Exception):
    pass


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.far_pos = 0
        self.far_expected = "command"

    def fail(self, expected: str):
        at = self.tokens[self.pos].pos if self.pos < len(self.tokens) else len(self.text)
        if at >= self.far_pos:
            self.far_pos = at
            self.far_expected = expected
        raise _NoParse()

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def word(self, *options: str) -> str:
        tok = self._peek()
        if tok is None or tok.kind != "word" or tok.value not in options:
            self.fail(" or ".join(repr(o) for o in options))
        self.pos += 1
        return tok.value

    def opt_word(self, *options: str) -> Optional[str]:
        tok = self._peek()
        if tok is not None and tok.kind == "word" and tok.value in options:
            self.pos += 1
            return tok.value
        return None

    def number(self) -> int:
        tok = self._peek()
        if tok is None or tok.kind != "num":
            self.fail("integer")
        self.pos += 1
        return int(tok.value)

    def punct(self, ch: str):
        tok = self._peek()
        if tok is None or tok.kind != "punct" or tok.value != ch:
            self.fail(repr(ch))
        self.pos += 1

    def end(self):
        if self.pos != len(self.tokens):
            self.fail("end of command")

    def attempt(self, fn):
        saved = self.pos
        try:
            return fn()
        except _NoParse:
            self.pos = saved
            return None

    # -- shared grammar pieces --

    def cell(self) -> Cell:
        self.punct("(")
        x = self.number()
        self.punct(",")
        y = self.number()
        self.punct(")")
        return (x, y)

    def object_phrase(self, allow_locator: bool = True) -> ObjectPhrase:
        start_tok = self._peek()
        start = start_tok.pos if start_tok is not None else len(self.text)
        color = self.opt_word(*COLORS)
        texture = self.opt_word(*TEXTURES)
        kind = None
        label = None
        tok = self._peek()
        if tok is not None and tok.kind == "word":
            for words, k in _KIND_WORDS.items():
                if tok.value == words[0]:
                    if len(words) == 2:
                        saved = self.pos
                        self.pos += 1
                        if self.opt_word(words[1]) is None:
                            self.pos = saved
                            continue
                    else:
                        self.pos += 1
                    kind = k
                    break
            else:
                if tok.value not in _RESERVED:
                    # bare noun, grounded by object label (e.g. "chili")
                    label = tok.value
                    self.pos += 1
        if kind is None and label is None and color is None and texture is None:
            self.fail("object phrase")
        if kind is not None:
            tok = self._peek()
            if tok is not None and tok.kind == "label":
                label = tok.value
                self.pos += 1
        locator = None
        if allow_locator:
            saved = self.pos
            if self.opt_word("at"):
                loc = self.attempt(self.cell)
                if loc is None:
                    self.pos = saved
                else:
                    locator = loc
        end = self.tokens[self.pos - 1].end if self.pos else start
        return ObjectPhrase(color, texture, kind, label, locator, raw=self.text[start:end])

    def dest(self) -> Dest:
        if self.opt_word("at"):
            return DestCell(self.cell())
        if self.opt_word("in", "into"):
            self.opt_word("the")
            words = []
            while True:
                tok = self._peek()
                if tok is None or tok.kind != "word":
                    break
                words.append(tok.value)
                self.pos += 1
            if not words:
                self.fail("zone or container name")
            return DestIn(tuple(words))
        if self.opt_word("next"):
            self.word("to")
            self.opt_word("the")
            return DestNextTo(self.object_phrase(allow_locator=False))
        if self.opt_word("on", "onto"):
            self.opt_word("the")
            return DestOn(self.object_phrase(allow_locator=False))
        self.fail("'at', 'in', 'next to' or 'on'")


def parse(text: str) -> FastCommand:
    """Parse a fast-lane instruction; raises ParseError outside the grammar."""
    p = _Parser(text)

    def pick_place() -> FastCommand:
        p.word("pick")
        p.opt_word("up")
        p.opt_word("the")
        color = p.word(*COLORS)
        p.word("cube")
        p.word("and")
        p.word("place")
        p.opt_word("it")
        p.word("in", "into")
        p.word("the")
        side = p.word("left", "right")
        p.word("box")
        p.end()
        return PickPlaceBox(color, side)

    def pick_cube() -> FastCommand:
        p.word("pick", "grab")
        p.opt_word("up")
        p.opt_word("the")
        color = p.word(*COLORS)
        p.word("cube")
        p.end()
        return PickColorCube(color)

    def put_into() -> FastCommand:
        p.word("put")
        p.opt_word("the")
        obj = p.object_phrase(allow_locator=False)
        p.word("in", "into")
        p.opt_word("the")
        container = p.object_phrase(allow_locator=False)
        p.end()
        return PutInto(obj, container)

    def rotate() -> FastCommand:
        p.word("rotate")
        p.opt_word("the")
        obj = p.object_phrase(allow_locator=False)
        p.opt_word("by")
        degrees = p.number()
        p.word("degrees")
        p.opt_word("clockwise")
        p.end()
        if degrees == 0:
            p.fail("nonzero degrees")
        return RotateBy(obj, degrees)

    # Most specific alternative first (longest match wins).
    for alt in (pick_place, pick_cube, put_into, rotate):
        result = p.attempt(alt)
        if result is not None:
            return result
    raise ParseError(p.far_pos, p.far_expected)


def parse_step(text: str) -> StepCommand:
    """Parse one plan-step line; the grammar the slow lane grounds against."""
    p = _Parser(text.strip().rstrip("."))

    def move_step() -> StepCommand:
        p.word("pick")
        p.opt_word("up")
        p.opt_word("the")
        obj = p.object_phrase()
        p.word("and")
        p.word("place")
        if p.opt_word("it") is None:
            p.opt_word("the")
            p.object_phrase(allow_locator=False)  # restated object; the picked one governs
        dest = p.dest()
        p.end()
        return MoveStep(obj, dest)

    def pick_only() -> StepCommand:
        p.word("pick")
        p.opt_word("up")
        p.opt_word("the")
        obj = p.object_phrase()
        p.end()
        return PickStep(obj)

    def place_only() -> StepCommand:
        p.word("place", "put")
        obj = None
        if p.opt_word("it") is None:
            p.opt_word("the")
            obj = p.object_phrase(allow_locator=False)
        dest = p.dest()
        p.end()
        return PlaceStep(dest, obj)

    def rotate() -> StepCommand:
        p.word("rotate")
        p.opt_word("the")
        obj = p.object_phrase(allow_locator=False)
        p.opt_word("by")
        degrees = p.number()
        p.word("degrees")
        p.opt_word("clockwise")
        p.end()
        if degrees == 0:
            p.fail("nonzero degrees")
        return RotateBy(obj, degrees)

    for alt in (move_step, pick_only, place_only, rotate):
        result = p.attempt(alt)
        if result is not None:
            return result
    raise ParseError(p.far_pos, p.far_expected)


# -- grounding --------------------------------------------------------------------


def phrase_for(obj: SceneObject, with_locator: bool = True) -> ObjectPhrase:
    """Canonical phrase an oracle plan uses to reference `obj`."""
    return ObjectPhrase(
        color=None if obj.color.value == "none" else obj.color.value,
        texture=None,
        kind=obj.kind,
        label=obj.label or None,
        locator=obj.cell if with_locator else None,
    )


def ground_phrase(phrase: ObjectPhrase, scene: Scene) -> SceneObject:
    """Resolve an object phrase to the lowest-id matching scene object."""
    candidates = []
    for obj in scene.objects:
        if phrase.color is not None and obj.color.value != phrase.color:
            continue
        if phrase.texture is not None and obj.texture.value != phrase.texture:
            continue
        if phrase.kind is not None and obj.kind is not phrase.kind:
            continue
        if phrase.label is not None and phrase.kind is not None and obj.label != phrase.label:
            continue
        if phrase.label is not None and phrase.kind is None and obj.label.lower() != phrase.label.lower():
            continue
        if phrase.locator is not None and (obj.cell != phrase.locator or obj.id == scene.held):
            continue
        candidates.append(obj)
    if not candidates:
        raise NoMatch(phrase.raw or phrase.render())
    return min(candidates, key=lambda o: o.id)


def parse_phrase(text: str) -> ObjectPhrase:
    """Parse a standalone object phrase (e.g. "red cube", "letter tile 'A'")."""
    p = _Parser(text)

    def full():
        phrase = p.object_phrase(allow_locator=False)
        p.end()
        return phrase

    result = p.attempt(full)
    if result is None:
        raise ParseError(p.far_pos, p.far_expected)
    return result


def _phrase_from_words(words: tuple[str, ...]) -> ObjectPhrase:
    try:
        return parse_phrase(" ".join(words))
    except ParseError:
        raise NoMatch(" ".join(words)) from None


def first_free_zone_cell(scene: Scene, zone_name: str, reserved: frozenset[Cell] = frozenset()) -> Cell:
    zone = scene.zones.get(zone_name)
    if zone is None:
        raise NoMatch(zone_name)
    for cell in zone.cells():
        if scene.stack_height(cell) == 0 and cell not in reserved:
            return cell
    raise ZoneFull(f"no free cell in zone {zone_name!r}")


def ground_dest(dest: Dest, scene: Scene) -> Cell:
    """Resolve a destination to a target cell (z always auto-resolves)."""
    if isinstance(dest, DestCell):
        return dest.cell
    if isinstance(dest, DestIn):
        if dest.zone_name() in scene.zones:
            return first_free_zone_cell(scene, dest.zone_name())
        return ground_phrase(_phrase_from_words(dest.words), scene).cell
    if isinstance(dest, DestNextTo):
        ref = ground_phrase(dest.ref, scene)
        return (ref.cell[0] + 1, ref.cell[1])  # immediately right, by convention
    if isinstance(dest, DestOn):
        return ground_phrase(dest.ref, scene).cell
    raise TypeError(f"unknown dest {dest!r}")


def ground(cmd: Union[FastCommand, StepCommand], scene: Scene) -> dict:
    """Resolve a command's phrases to concrete ids/cells (explainability)."""
    if isinstance(cmd, PickColorCube):
        obj = ground_phrase(ObjectPhrase(color=cmd.color, kind=ObjectKind.CUBE), scene)
        return {"object_id": obj.id}
    if isinstance(cmd, PickPlaceBox):
        obj = ground_phrase(ObjectPhrase(color=cmd.color, kind=ObjectKind.CUBE), scene)
        return {"object_id": obj.id, "cell": first_free_zone_cell(scene, f"{cmd.side}_box")}
    if isinstance(cmd, PutInto):
        obj = ground_phrase(cmd.obj, scene)
        container = ground_phrase(cmd.container, scene)
        return {"object_id": obj.id, "container_id": container.id, "cell": container.cell}
    if isinstance(cmd, RotateBy):
        obj = ground_phrase(cmd.obj, scene)
        return {"object_id": obj.id, "degrees": cmd.degrees}
    if isinstance(cmd, MoveStep):
        obj = ground_phrase(cmd.obj, scene)
        return {"object_id": obj.id, "cell": ground_dest(cmd.dest, scene)}
    if isinstance(cmd, PickStep):
        return {"object_id": ground_phrase(cmd.obj, scene).id}
    if isinstance(cmd, PlaceStep):
        return {"cell": ground_dest(cmd.dest, scene)}
    raise TypeError(f"unknown command {cmd!r}")


def emit(cmd: Union[FastCommand, StepCommand], scene: Scene) -> list[PrimitiveAction]:
    """Primitive actions realizing `cmd` on `scene`."""
    if isinstance(cmd, (PickColorCube, PickStep)):
        return [Pick(ground(cmd, scene)["object_id"])]
    if isinstance(cmd, (PickPlaceBox, PutInto, MoveStep)):
        g = ground(cmd, scene)
        return [Pick(g["object_id"]), Place(g["cell"])]
    if isinstance(cmd, RotateBy):
        g = ground(cmd, scene)
        return [Rotate(g["object_id"], g["degrees"])]
    if isinstance(cmd, PlaceStep):
        return [Place(ground(cmd, scene)["cell"])]
    raise TypeError(f"unknown command {cmd!r}")


def derive_predicate(cmd: StepCommand, scene: Scene, held_hint: Optional[int] = None) -> Optional[Predicate]:
    """Symbolic completion predicate for a step, resolved at planning time.

    Never trusts provider text beyond the grammar: if a phrase does not
    ground against the planning scene, the predicate stays None and the
    episode fails at the grounding stage instead.
    """
    try:
        if isinstance(cmd, MoveStep):
            obj = ground_phrase(cmd.obj, scene)
            return _dest_predicate(obj.id, cmd.dest, scene)
        if isinstance(cmd, PickStep):
            return ObjectHeld(ground_phrase(cmd.obj, scene).id)
        if isinstance(cmd, PlaceStep):
            oid = held_hint if cmd.obj is None else ground_phrase(cmd.obj, scene).id
            if oid is None:
                return None
            return _dest_predicate(oid, cmd.dest, scene)
        if isinstance(cmd, RotateBy):
            obj = ground_phrase(cmd.obj, scene)
            return OrientationIs(obj.id, (obj.orientation_deg + cmd.degrees) % 360)
    except NoMatch:
        return None
    return None


def _dest_predicate(object_id: int, dest: Dest, scene: Scene) -> Optional[Predicate]:
    if isinstance(dest, DestCell):
        return ObjectAtCell(object_id, dest.cell)
    if isinstance(dest, DestIn) and dest.zone_name() in scene.zones:
        return ObjectAtZone(object_id, dest.zone_name())
    try:
        cell = ground_dest(dest, scene)
    except (NoMatch, ZoneFull):
        return None
    return ObjectAtCell(object_id, cell)
