"""JSON persistence for instances and plans."""
from __future__ import annotations

import json
import math
from pathlib import Path

from .geometry import Point
from .model import Assignment, DeploymentPlan, Instance, Target, ValidationError


class FormatError(ValidationError):
    """A file parsed as JSON but does not match the expected schema."""


def _point(name, raw) -> Point:
    if not (isinstance(raw, list) and len(raw) == 2 and all(isinstance(v, (int, float)) for v in raw)):
        raise FormatError(name, f"expected [x, y], got {raw!r}")
    return Point(float(raw[0]), float(raw[1]))


def _number(name, raw) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise FormatError(name, f"expected a number, got {raw!r}")
    return float(raw)


def _require(obj: dict, key: str, where: str = ""):
    if key not in obj:
        raise FormatError(where + key, "missing")
    return obj[key]


def instance_to_dict(inst: Instance) -> dict:
    return {
        "rs": inst.rs,
        "rt": "inf" if inst.unbounded else inst.rt,
        "sink": list(inst.sink),
        "sensors": [list(s) for s in inst.sensors],
        "targets": [{"pos": list(t.pos), "w": t.weight} for t in inst.targets],
    }


def instance_from_dict(data) -> Instance:
    if not isinstance(data, dict):
        raise FormatError("<root>", "expected a JSON object")
    rs = _number("rs", _require(data, "rs"))
    rt_raw = _require(data, "rt")
    rt = math.inf if rt_raw == "inf" else _number("rt", rt_raw)
    sink = _point("sink", _require(data, "sink"))
    sensors_raw = _require(data, "sensors")
    if not isinstance(sensors_raw, list):
        raise FormatError("sensors", "expected a list")
    sensors = tuple(_point(f"sensors[{i}]", s) for i, s in enumerate(sensors_raw))
    targets_raw = _require(data, "targets")
    if not isinstance(targets_raw, list):
        raise FormatError("targets", "expected a list")
    targets = []
    for i, t in enumerate(targets_raw):
        if not isinstance(t, dict):
            raise FormatError(f"targets[{i}]", "expected an object")
        pos = _point(f"targets[{i}].pos", _require(t, "pos", f"targets[{i}]."))
        w = _number(f"targets[{i}].w", _require(t, "w", f"targets[{i}]."))
        targets.append(Target(pos, w))
    return Instance(rs, rt, sink, sensors, tuple(targets))


def plan_to_dict(plan: DeploymentPlan) -> dict:
    rows = []
    for a in plan.assignments:
        if a.idle:
            rows.append({"sensor": a.sensor, "idle": True})
        else:
            rows.append({"sensor": a.sensor, "dest": list(a.dest), "dist": a.dist, "point": a.point})
    return {"algorithm": plan.algorithm, "points": [list(p) for p in plan.points], "assignments": rows}


def plan_from_dict(data) -> DeploymentPlan:
    if not isinstance(data, dict):
        raise FormatError("<root>", "expected a JSON object")
    algo = _require(data, "algorithm")
    if not isinstance(algo, str):
        raise FormatError("algorithm", "expected a string")
    points_raw = _require(data, "points")
    if not isinstance(points_raw, list):
        raise FormatError("points", "expected a list")
    points = [_point(f"points[{i}]", p) for i, p in enumerate(points_raw)]
    rows = _require(data, "assignments")
    if not isinstance(rows, list):
        raise FormatError("assignments", "expected a list")
    out = []
    for i, row in enumerate(rows):
        where = f"assignments[{i}]"
        if not isinstance(row, dict):
            raise FormatError(where, "expected an object")
        sensor = _require(row, "sensor", where + ".")
        if isinstance(sensor, bool) or not isinstance(sensor, int) or sensor < 0:
            raise FormatError(where + ".sensor", f"expected a sensor index, got {sensor!r}")
        if row.get("idle") is True:
            out.append(Assignment(sensor))
            continue
        dest = _point(where + ".dest", _require(row, "dest", where + "."))
        dist = _number(where + ".dist", _require(row, "dist", where + "."))
        point = row.get("point")
        if point is not None and (isinstance(point, bool) or not isinstance(point, int)):
            raise FormatError(where + ".point", f"expected a point index, got {point!r}")
        out.append(Assignment(sensor, dest, dist, point))
    return DeploymentPlan(algo, points, out)


def _read_json(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError("<root>", f"not valid JSON ({exc})") from None


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n", encoding="utf-8")


def save_instance(path, inst: Instance) -> None:
    _write_json(path, instance_to_dict(inst))


def load_instance(path) -> Instance:
    return instance_from_dict(_read_json(path))


def save_plan(path, plan: DeploymentPlan) -> None:
    _write_json(path, plan_to_dict(plan))


def load_plan(path) -> DeploymentPlan:
    return plan_from_dict(_read_json(path))
