"""Line-delimited record encoding for scenes, trajectories, and plans.

Each value is a short sequence of JSON records, one per line, beginning
with a typed header that carries a mandatory `version` field. The formats
are documented field-by-field in docs/file_formats.md. Decoding errors
raise SchemaViolation with the path of the offending field.
"""

from __future__ import annotations

import json
from typing import Any, Optional

from . import model
from .errors import SchemaViolation

FORMAT_VERSION = 1

_KIND = {k.value: k for k in model.ObjectKind}
_COLOR = {c.value: c for c in model.Color}
_TEXTURE = {t.value: t for t in model.Texture}
_SOURCE = {s.value: s for s in model.PlanSource}


def _dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def _require(record: dict, field: str, kind: type, path: str) -> Any:
    if field not in record:
        raise SchemaViolation(f"{path}{field}", "missing")
    value = record[field]
    if kind is int and isinstance(value, bool):
        raise SchemaViolation(f"{path}{field}", "expected integer, got bool")
    if not isinstance(value, kind):
        raise SchemaViolation(f"{path}{field}", f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _enum(record: dict, field: str, table: dict, path: str):
    raw = _require(record, field, str, path)
    if raw not in table:
        raise SchemaViolation(f"{path}{field}", f"unknown value {raw!r}")
    return table[raw]


def _parse_lines(text: str, expected_header: str) -> tuple[dict, list[dict]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SchemaViolation("header", "empty input")
    records = []
    for i, line in enumerate(lines):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"line[{i}]", f"invalid JSON: {exc}") from exc
        if not isinstance(rec, dict):
            raise SchemaViolation(f"line[{i}]", "record is not an object")
        records.append(rec)
    header = records[0]
    if header.get("record") != expected_header:
        raise SchemaViolation("record", f"expected {expected_header!r} header")
    version = _require(header, "version", int, "")
    if version != FORMAT_VERSION:
        raise SchemaViolation("version", f"unsupported version {version}")
    return header, records[1:]


# -- actions ---------------------------------------------------------------


def action_to_record(action: Optional[model.PrimitiveAction]) -> Optional[dict]:
    if action is None:
        return None
    if isinstance(action, model.Pick):
        return {"type": "pick", "object_id": action.object_id}
    if isinstance(action, model.Place):
        rec: dict[str, Any] = {"type": "place", "x": action.cell[0], "y": action.cell[1]}
        if action.z is not None:
            rec["z"] = action.z
        return rec
    if isinstance(action, model.Rotate):
        return {"type": "rotate", "object_id": action.object_id, "degrees": action.degrees}
    raise TypeError(f"unknown action {action!r}")


def action_from_record(rec: Optional[dict], path: str) -> Optional[model.PrimitiveAction]:
    if rec is None:
        return None
    if not isinstance(rec, dict):
        raise SchemaViolation(path, "action is not an object")
    kind = _require(rec, "type", str, f"{path}.")
    if kind == "pick":
        return model.Pick(_require(rec, "object_id", int, f"{path}."))
    if kind == "place":
        x = _require(rec, "x", int, f"{path}.")
        y = _require(rec, "y", int, f"{path}.")
        z = rec.get("z")
        if z is not None and not isinstance(z, int):
            raise SchemaViolation(f"{path}.z", "expected int")
        return model.Place((x, y), z)
    if kind == "rotate":
        return model.Rotate(
            _require(rec, "object_id", int, f"{path}."),
            _require(rec, "degrees", int, f"{path}."),
        )
    raise SchemaViolation(f"{path}.type", f"unknown action type {kind!r}")


# -- predicates --------------------------------------------------------------


def predicate_to_record(pred: Optional[model.Predicate]) -> Optional[dict]:
    if pred is None:
        return None
    if isinstance(pred, model.ObjectAtZone):
        return {"kind": "object_at_zone", "object_id": pred.object_id, "zone": pred.zone}
    if isinstance(pred, model.ObjectAtCell):
        rec: dict[str, Any] = {
            "kind": "object_at_cell",
            "object_id": pred.object_id,
            "x": pred.cell[0],
            "y": pred.cell[1],
        }
        if pred.z is not None:
            rec["z"] = pred.z
        return rec
    if isinstance(pred, model.LabelSequenceAtRow):
        return {
            "kind": "label_sequence_at_row",
            "y": pred.y,
            "x0": pred.x0,
            "x1": pred.x1,
            "labels": pred.labels,
        }
    if isinstance(pred, model.StackedOrder):
        return {"kind": "stacked_order", "object_ids": list(pred.object_ids)}
    if isinstance(pred, model.GroupedByColor):
        return {"kind": "grouped_by_color", "zones_by_color": [list(p) for p in pred.zones_by_color]}
    if isinstance(pred, model.ObjectHeld):
        return {"kind": "object_held", "object_id": pred.object_id}
    if isinstance(pred, model.OrientationIs):
        return {"kind": "orientation_is", "object_id": pred.object_id, "degrees": pred.degrees}
    raise TypeError(f"unknown predicate {pred!r}")


def predicate_from_record(rec: Optional[dict], path: str) -> Optional[model.Predicate]:
    if rec is None:
        return None
    kind = _require(rec, "kind", str, f"{path}.")
    if kind == "object_at_zone":
        return model.ObjectAtZone(_require(rec, "object_id", int, f"{path}."), _require(rec, "zone", str, f"{path}."))
    if kind == "object_at_cell":
        z = rec.get("z")
        return model.ObjectAtCell(
            _require(rec, "object_id", int, f"{path}."),
            (_require(rec, "x", int, f"{path}."), _require(rec, "y", int, f"{path}.")),
            z,
        )
    if kind == "label_sequence_at_row":
        return model.LabelSequenceAtRow(
            _require(rec, "y", int, f"{path}."),
            _require(rec, "x0", int, f"{path}."),
            _require(rec, "x1", int, f"{path}."),
            _require(rec, "labels", str, f"{path}."),
        )
    if kind == "stacked_order":
        ids = _require(rec, "object_ids", list, f"{path}.")
        return model.StackedOrder(tuple(int(i) for i in ids))
    if kind == "grouped_by_color":
        pairs = _require(rec, "zones_by_color", list, f"{path}.")
        return model.GroupedByColor(tuple((str(a), str(b)) for a, b in pairs))
    if kind == "object_held":
        return model.ObjectHeld(_require(rec, "object_id", int, f"{path}."))
    if kind == "orientation_is":
        return model.OrientationIs(
            _require(rec, "object_id", int, f"{path}."), _require(rec, "degrees", int, f"{path}.")
        )
    raise SchemaViolation(f"{path}.kind", f"unknown predicate kind {kind!r}")


# -- scene -------------------------------------------------------------------


def encode_scene(scene: model.Scene) -> str:
    header = {
        "record": "scene",
        "version": FORMAT_VERSION,
        "width": scene.width,
        "height": scene.height,
        "held": scene.held,
        "zones": {
            name: [z.x0, z.y0, z.x1, z.y1] for name, z in sorted(scene.zones.items())
        },
    }
    lines = [_dumps(header)]
    for obj in sorted(scene.objects, key=lambda o: o.id):
        lines.append(
            _dumps(
                {
                    "record": "object",
                    "id": obj.id,
                    "kind": obj.kind.value,
                    "color": obj.color.value,
                    "texture": obj.texture.value,
                    "label": obj.label,
                    "x": obj.cell[0],
                    "y": obj.cell[1],
                    "z": obj.z,
                    "orientation_deg": obj.orientation_deg,
                    "attributes": sorted(obj.attributes),
                }
            )
        )
    return "\n".join(lines) + "\n"


def decode_scene(text: str) -> model.Scene:
    header, rest = _parse_lines(text, "scene")
    width = _require(header, "width", int, "")
    height = _require(header, "height", int, "")
    held = header.get("held")
    if held is not None and not isinstance(held, int):
        raise SchemaViolation("held", "expected int or null")
    zones_rec = _require(header, "zones", dict, "")
    zones = {}
    for name, box in zones_rec.items():
        if not (isinstance(box, list) and len(box) == 4 and all(isinstance(v, int) for v in box)):
            raise SchemaViolation(f"zones.{name}", "expected [x0, y0, x1, y1]")
        zones[name] = model.Zone(*box)
    objects = []
    for i, rec in enumerate(rest):
        path = f"objects[{i}]."
        if rec.get("record") != "object":
            raise SchemaViolation(f"objects[{i}].record", "expected object record")
        objects.append(
            model.SceneObject(
                id=_require(rec, "id", int, path),
                kind=_enum(rec, "kind", _KIND, path),
                color=_enum(rec, "color", _COLOR, path),
                texture=_enum(rec, "texture", _TEXTURE, path),
                label=_require(rec, "label", str, path),
                cell=(_require(rec, "x", int, path), _require(rec, "y", int, path)),
                z=_require(rec, "z", int, path),
                orientation_deg=_require(rec, "orientation_deg", int, path),
                attributes=frozenset(_require(rec, "attributes", list, path)),
            )
        )
    scene = model.Scene(width=width, height=height, objects=tuple(objects), held=held, zones=zones)
    scene.validate()
    return scene


def scene_to_dict(scene: model.Scene) -> dict:
    """Structured single-object view of a scene (API payloads and events)."""
    return {
        "width": scene.width,
        "height": scene.height,
        "held": scene.held,
        "zones": {name: [z.x0, z.y0, z.x1, z.y1] for name, z in sorted(scene.zones.items())},
        "objects": [
            {
                "id": o.id,
                "kind": o.kind.value,
                "color": o.color.value,
                "texture": o.texture.value,
                "label": o.label,
                "x": o.cell[0],
                "y": o.cell[1],
                "z": o.z,
                "orientation_deg": o.orientation_deg,
                "attributes": sorted(o.attributes),
            }
            for o in sorted(scene.objects, key=lambda o: o.id)
        ],
    }


# -- trajectory ----------------------------------------------------------------


def encode_trajectory(traj: model.Trajectory) -> str:
    header = {
        "record": "trajectory",
        "version": FORMAT_VERSION,
        "family": traj.family,
        "seed": traj.seed,
        "n_frames": len(traj.frames),
    }
    lines = [_dumps(header)]
    for i, frame in enumerate(traj.frames):
        lines.append(
            _dumps(
                {
                    "record": "frame",
                    "index": i,
                    "caption": frame.caption,
                    "action": action_to_record(frame.action),
                }
            )
        )
    return "\n".join(lines) + "\n"


def decode_trajectory(text: str) -> model.Trajectory:
    header, rest = _parse_lines(text, "trajectory")
    family = _require(header, "family", str, "")
    seed = _require(header, "seed", int, "")
    n_frames = _require(header, "n_frames", int, "")
    if n_frames != len(rest):
        raise SchemaViolation("n_frames", f"declared {n_frames}, found {len(rest)} frames")
    frames = []
    for i, rec in enumerate(rest):
        path = f"frames[{i}]"
        if rec.get("record") != "frame":
            raise SchemaViolation(f"{path}.record", "expected frame record")
        if _require(rec, "index", int, f"{path}.") != i:
            raise SchemaViolation(f"{path}.index", "frame indices must be contiguous")
        if "action" not in rec:
            raise SchemaViolation(f"{path}.action", "missing")
        frames.append(
            model.Frame(
                caption=_require(rec, "caption", str, f"{path}."),
                action=action_from_record(rec["action"], f"{path}.action"),
            )
        )
    return model.Trajectory(frames=tuple(frames), family=family, seed=seed)


def decode_trajectories(text: str) -> list[model.Trajectory]:
    """Decode a corpus file of concatenated trajectory records."""
    blocks: list[list[str]] = []
    for line in text.splitlines():
        if not line.strip():
            continue
        try:
            is_header = json.loads(line).get("record") == "trajectory"
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"line[{sum(len(b) for b in blocks)}]", f"invalid JSON: {exc}") from exc
        if is_header:
            blocks.append([line])
        elif blocks:
            blocks[-1].append(line)
        else:
            raise SchemaViolation("header", "corpus does not start with a trajectory header")
    return [decode_trajectory("\n".join(block)) for block in blocks]


# -- plan ------------------------------------------------------------------------


def encode_plan(plan: model.Plan) -> str:
    header = {
        "record": "plan",
        "version": FORMAT_VERSION,
        "source": plan.source.value,
        "n_steps": len(plan.steps),
    }
    lines = [_dumps(header)]
    for step in plan.steps:
        lines.append(
            _dumps(
                {
                    "record": "subgoal",
                    "index": step.index,
                    "text": step.text,
                    "predicate": predicate_to_record(step.predicate),
                }
            )
        )
    return "\n".join(lines) + "\n"


def decode_plan(text: str) -> model.Plan:
    header, rest = _parse_lines(text, "plan")
    source = _enum(header, "source", _SOURCE, "")
    n_steps = _require(header, "n_steps", int, "")
    if n_steps != len(rest):
        raise SchemaViolation("n_steps", f"declared {n_steps}, found {len(rest)} steps")
    steps = []
    for i, rec in enumerate(rest):
        path = f"steps[{i}]"
        if rec.get("record") != "subgoal":
            raise SchemaViolation(f"{path}.record", "expected subgoal record")
        if _require(rec, "index", int, f"{path}.") != i:
            raise SchemaViolation(f"{path}.index", "step indices must be contiguous")
        if "predicate" not in rec:
            raise SchemaViolation(f"{path}.predicate", "missing")
        steps.append(
            model.SubGoal(
                index=i,
                text=_require(rec, "text", str, f"{path}."),
                predicate=predicate_from_record(rec["predicate"], f"{path}.predicate"),
            )
        )
    plan = model.Plan(steps=tuple(steps), source=source)
    plan.validate()
    return plan
