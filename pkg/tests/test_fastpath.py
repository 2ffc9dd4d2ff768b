"""Fast-lane grammar: parsing, rendering, grounding, emission."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twolane import fastpath, sim
from twolane.errors import NoMatch, ParseError, ZoneFull
from twolane.fastpath import (
    DestCell,
    DestIn,
    MoveStep,
    ObjectPhrase,
    PickColorCube,
    PickPlaceBox,
    PickStep,
    PlaceStep,
    PutInto,
    RotateBy,
    emit,
    ground,
    parse,
    parse_step,
)
from twolane.model import Color, ObjectKind, Pick, Place, Rotate, Scene, SceneObject, Zone


def obj(oid, kind, cell, color=Color.NONE, label="", texture=None):
    from twolane.model import Texture

    return SceneObject(
        id=oid, kind=kind, color=color,
        texture=texture or Texture.PLAIN, label=label, cell=cell,
    )


def test_parse_pick_color_cube():
    assert parse("pick up the red cube") == PickColorCube("red")
    assert parse("Pick Up The RED Cube") == PickColorCube("red")
    assert parse("pick the blue cube") == PickColorCube("blue")


def test_parse_pick_place_box():
    cmd = parse("pick the blue cube and place it in the left box")
    assert cmd == PickPlaceBox("blue", "left")
    assert parse("pick up the yellow cube and place it into the right box") == PickPlaceBox(
        "yellow", "right"
    )


def test_parse_put_into():
    cmd = parse("put the toy into the box")
    assert isinstance(cmd, PutInto)
    assert cmd.obj.kind is ObjectKind.TOY
    assert cmd.container.kind is ObjectKind.BOX


def test_parse_rotate():
    cmd = parse("rotate the bowl by 30 degrees clockwise")
    assert cmd == RotateBy(ObjectPhrase(kind=ObjectKind.BOWL), 30)
    assert parse("rotate the red cube 90 degrees") == RotateBy(
        ObjectPhrase(color="red", kind=ObjectKind.CUBE), 90
    )


def test_parse_error_reports_position_and_expectation():
    with pytest.raises(ParseError) as err:
        parse("please do something")
    assert err.value.position == 0
    with pytest.raises(ParseError):
        parse("I'm allergic to spicy food")
    with pytest.raises(ParseError):
        parse("pick up the red cube and dance")  # trailing garbage: no partial accept


def test_parse_zero_degrees_rejected():
    with pytest.raises(ParseError):
        parse("rotate the bowl by 0 degrees")


_phrases = st.builds(
    ObjectPhrase,
    color=st.sampled_from([None, "red", "green", "blue", "yellow"]),
    texture=st.just(None),
    kind=st.sampled_from(list(ObjectKind)),
    label=st.just(None),
    locator=st.just(None),
)


@given(
    st.one_of(
        st.builds(PickColorCube, st.sampled_from(["red", "green", "blue", "yellow"])),
        st.builds(
            PickPlaceBox,
            st.sampled_from(["red", "green", "blue", "yellow"]),
            st.sampled_from(["left", "right"]),
        ),
        st.builds(PutInto, _phrases, _phrases),
        st.builds(RotateBy, _phrases, st.integers(1, 359)),
    )
)
@settings(max_examples=300, deadline=None)
def test_render_parse_identity(cmd):
    assert parse(cmd.render()) == cmd


def test_step_render_parse_identity_examples():
    steps = [
        MoveStep(
            ObjectPhrase(kind=ObjectKind.LETTER_TILE, label="A", locator=(3, 2)),
            DestCell((5, 2)),
        ),
        MoveStep(ObjectPhrase(color="red", kind=ObjectKind.CUBE), DestIn(("red", "zone"))),
        PickStep(ObjectPhrase(kind=ObjectKind.SYMBOL_TILE, label="x", locator=(2, 1))),
        PlaceStep(DestIn(("tile", "pool"))),
        RotateBy(ObjectPhrase(kind=ObjectKind.BOWL), 45),
    ]
    for step in steps:
        assert parse_step(step.render()) == step


def test_parse_step_paper_phrasing():
    step = parse_step("pick up the letter tile 'A' and place it next to the letter tile 'R'")
    assert isinstance(step, MoveStep)
    assert step.obj.label == "A"


def test_ground_lowest_id_tie_break():
    scene = Scene(
        8, 8,
        objects=(
            obj(9, ObjectKind.CUBE, (1, 1), Color.RED),
            obj(4, ObjectKind.CUBE, (2, 2), Color.RED),
        ),
    )
    assert ground(PickColorCube("red"), scene)["object_id"] == 4


def test_ground_no_match():
    scene = Scene(8, 8, objects=(obj(1, ObjectKind.CUBE, (1, 1), Color.RED),))
    with pytest.raises(NoMatch):
        ground(PickColorCube("blue"), scene)


def test_ground_put_into_seeded_scene():
    scene, spec = sim.gen_scene(11, "pick_toy_box")
    cmd = parse(spec.instruction_text)
    g = ground(cmd, scene)
    assert g["object_id"] == spec.goal["object_id"]
    assert g["container_id"] == spec.goal["container_id"]


def test_ground_bare_label_word():
    scene = Scene(
        8, 8,
        objects=(obj(2, ObjectKind.FOOD, (3, 3), label="chili"),),
        zones={"far_zone": Zone(0, 0, 8, 2)},
    )
    step = parse_step("pick up the chili and place it in the far zone")
    actions = emit(step, scene)
    assert actions[0] == Pick(2)
    assert actions[1].cell in [(x, y) for x in range(8) for y in range(2)]


def test_emit_pick_place_box():
    scene = Scene(
        8, 8,
        objects=(obj(1, ObjectKind.CUBE, (4, 2), Color.BLUE),),
        zones={"left_box": Zone(0, 5, 2, 8), "right_box": Zone(6, 5, 8, 8)},
    )
    actions = emit(parse("pick the blue cube and place it in the left box"), scene)
    assert actions == [Pick(1), Place((0, 5))]
    after = sim.apply_all(scene, actions)
    assert scene.zones["left_box"].contains(after.object(1).cell)


def test_emit_rotate():
    scene = Scene(8, 8, objects=(obj(5, ObjectKind.BOWL, (3, 3)),))
    assert emit(parse("rotate the bowl by 30 degrees clockwise"), scene) == [Rotate(5, 30)]
    after = sim.apply_all(scene, [Rotate(5, 30)])
    assert after.object(5).orientation_deg == 30


def test_emit_zone_full():
    objs = tuple(
        obj(i + 1, ObjectKind.CUBE, (x, y), Color.GREEN)
        for i, (x, y) in enumerate((x, y) for x in range(2) for y in range(5, 8))
    ) + (obj(99, ObjectKind.CUBE, (4, 4), Color.RED),)
    scene = Scene(8, 8, objects=objs, zones={"left_box": Zone(0, 5, 2, 8)})
    with pytest.raises(ZoneFull):
        emit(parse("pick the red cube and place it in the left box"), scene)


def test_emit_put_into_stacks_on_container():
    scene = Scene(
        8, 8,
        objects=(
            obj(1, ObjectKind.TOY, (1, 1), Color.RED),
            obj(2, ObjectKind.BOWL, (5, 5), Color.GREEN),
        ),
    )
    actions = emit(parse("put the red toy into the green bowl"), scene)
    assert actions == [Pick(1), Place((5, 5))]
    after = sim.apply_all(scene, actions)
    assert after.object(1).cell == (5, 5) and after.object(1).z == 1


def test_grounding_determinism():
    scene, spec = sim.gen_scene(23, "pick_color")
    cmd = parse(spec.instruction_text)
    assert ground(cmd, scene) == ground(cmd, scene)
