"""On-disk formats.

All JSON documents are written in one canonical form: object keys sorted,
two-space indentation, innermost numeric arrays kept on one line, floats
rounded to 9 decimal places with trailing zeros trimmed (``0.0``,
``0.066666667``), and a trailing newline. Re-serialising a parsed canonical
document reproduces it byte for byte.

Pose files::

    {"fps": 15.0, "skeleton": [10 names], "frames": [[[x, y, z] x 10], ...]}

Config files::

    {"skeleton": [10 names],
     "joints": [{"name": ..., "angle_min": ..., "angle_max": ..., "vel_max": ...,
                 "rule": {"kind": "direction_pair", "parent": ..., "child": ...,
                          "numerator_axis": "x", "denominator_axis": "y",
                          "sign": 1, "scale": 0.3}}, ...]}

Trajectory files::

    {"fps": 15.0, "joint_names": [...], "samples": [[angle per joint], ...],
     "duration": seconds (optional)}

Timeline export (the names / angle lists / time lists triple)::

    {"names": [...], "angleLists": [[...], ...], "timeLists": [[...], ...]}

with ``timeLists[j][k] = (k + 1) / fps``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ParseError, SchemaError
from .model import (
    CONSTANT, DEFAULT_FPS, DIRECTION_PAIR, INTERIOR_ANGLE, JointSpec, JointTrajectory,
    KinematicConfig, MappingRule, PoseSequence, Skeleton, Violation, validate_config,
)

log = logging.getLogger(__name__)

TRAJECTORY_FORMATS = ("json", "csv", "timeline")

# rounding step of canonical float rendering
CANONICAL_RESOLUTION = 1e-9

_POSE_KEYS = {"fps", "skeleton", "frames"}
_CONFIG_KEYS = {"skeleton", "joints"}
_JOINT_KEYS = {"name", "rule", "angle_min", "angle_max", "vel_max"}
_RULE_KEYS = {"kind", "parent", "child", "third", "numerator_axis", "denominator_axis",
              "sign", "scale", "constant_value"}
_TRAJ_KEYS = {"fps", "joint_names", "samples", "duration"}
_TIMELINE_KEYS = {"names", "angleLists", "timeLists"}


# -- canonical rendering ----------------------------------------------------

def format_number(x) -> str:
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite number {x!r}")
    if abs(x) >= 1e6:
        # fixed-point would exceed double precision; repr round-trips exactly
        return repr(x)
    s = f"{x:.9f}".rstrip("0")
    if s.endswith("."):
        s += "0"
    if s == "-0.0":
        s = "0.0"
    return s


def _is_scalar(v) -> bool:
    return v is None or isinstance(v, (str, bool, int, float, np.integer, np.floating))


def _render(obj, depth: int) -> str:
    pad = "  " * (depth + 1)
    end = "  " * depth
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, (int, float, np.integer, np.floating)):
        return format_number(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=True)}: {_render(obj[k], depth + 1)}"
                 for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        flat = all(_is_scalar(v) for v in obj) or all(
            isinstance(v, (list, tuple, np.ndarray)) and all(_is_scalar(w) for w in v) for v in obj)
        if flat:
            return "[" + ", ".join(_render(v, depth + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _render(v, depth + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_canonical(doc: Any) -> str:
    return _render(doc, 0) + "\n"


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load_json(text: str, source: str | None) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, source=source, line=exc.lineno, column=exc.colno) from None


def _read_json(path) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    return _load_json(text, str(path))


# -- field helpers ----------------------------------------------------------

def _check_keys(doc, allowed: set, where: str, source, strict: bool) -> None:
    if not isinstance(doc, dict):
        raise SchemaError("not_object", "expected a JSON object", where, source)
    extra = sorted(set(doc) - allowed)
    if extra:
        msg = f"unknown key(s): {', '.join(extra)}"
        if strict:
            raise SchemaError("unknown_key", msg, where, source)
        log.warning("%s:%s: %s (ignored)", source or "<input>", where, msg)


def _require(doc: dict, key: str, where: str, source):
    if key not in doc:
        raise SchemaError("missing_key", f"missing required key {key!r}", where, source)
    return doc[key]


def _number(value, where: str, source) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError("type_error", f"expected a number, got {type(value).__name__}", where, source)
    if not math.isfinite(value):
        raise SchemaError("nonfinite", "number must be finite", where, source)
    return value


def _string(value, where: str, source) -> str:
    if not isinstance(value, str):
        raise SchemaError("type_error", f"expected a string, got {type(value).__name__}", where, source)
    return value


def _skeleton(value, where: str, source) -> Skeleton:
    if not isinstance(value, list):
        raise SchemaError("type_error", "skeleton must be a list of joint names", where, source)
    names = [_string(v, f"{where}[{i}]", source) for i, v in enumerate(value)]
    try:
        return Skeleton(tuple(names))
    except SchemaError as exc:
        raise SchemaError(exc.code, exc.detail, where, source) from None


def _fps(doc: dict, where: str, source, default: float | None) -> float:
    if "fps" not in doc:
        if default is None:
            raise SchemaError("fps_invalid", "fps is required", where, source)
        log.warning("%s: fps missing, defaulting to %g Hz", source or "<input>", default)
        return float(default)
    fps = doc["fps"]
    if isinstance(fps, bool) or not isinstance(fps, (int, float)) or not math.isfinite(fps) or fps <= 0:
        raise SchemaError("fps_invalid", f"fps must be a positive number, got {fps!r}", "fps", source)
    return float(fps)


# -- poses ------------------------------------------------------------------

def pose_from_dict(doc: Any, source: str | None = None, strict: bool = True) -> PoseSequence:
    _check_keys(doc, _POSE_KEYS, "$", source, strict)
    skeleton = _skeleton(_require(doc, "skeleton", "$", source), "skeleton", source)
    fps = _fps(doc, "$", source, DEFAULT_FPS)
    frames = _require(doc, "frames", "$", source)
    if not isinstance(frames, list):
        raise SchemaError("type_error", "frames must be a list", "frames", source)
    if not frames:
        raise SchemaError("frames_empty", "at least one frame is required", "frames", source)
    n = len(skeleton)
    data = np.empty((len(frames), n, 3))
    for f, frame in enumerate(frames):
        if not isinstance(frame, list):
            raise SchemaError("type_error", "frame must be a list of [x, y, z]", f"frames[{f}]", source)
        if len(frame) != n:
            raise SchemaError("joint_arity", f"frame has {len(frame)} joints, skeleton has {n}",
                              f"frames[{f}]", source)
        for j, p in enumerate(frame):
            where = f"frames[{f}][{j}]"
            if not isinstance(p, list) or len(p) != 3:
                raise SchemaError("coord_arity", "joint position must be [x, y, z]", where, source)
            for k in range(3):
                data[f, j, k] = _number(p[k], where, source)
    return PoseSequence(skeleton=skeleton, fps=fps, positions=data)


def pose_to_dict(seq: PoseSequence) -> dict:
    return {
        "fps": float(seq.fps),
        "skeleton": list(seq.skeleton.joint_names),
        "frames": seq.positions.tolist(),
    }


def read_pose_file(path, strict: bool = True) -> PoseSequence:
    return pose_from_dict(_read_json(path), str(path), strict)


def write_pose_file(seq: PoseSequence, path) -> None:
    _write_text(path, dumps_canonical(pose_to_dict(seq)))


# -- kinematic config -------------------------------------------------------

def _rule_from_dict(doc, where: str, source, strict: bool) -> MappingRule:
    _check_keys(doc, _RULE_KEYS, where, source, strict)
    kind = _string(_require(doc, "kind", where, source), f"{where}.kind", source)

    def opt_str(key):
        return _string(doc[key], f"{where}.{key}", source) if key in doc else None

    sign = doc.get("sign", 1)
    if isinstance(sign, bool) or not isinstance(sign, (int, float)):
        raise SchemaError("bad_sign", f"sign must be +1 or -1, got {sign!r}", f"{where}.sign", source)
    return MappingRule(
        kind=kind,
        parent_joint=opt_str("parent"),
        child_joint=opt_str("child"),
        third_joint=opt_str("third"),
        numerator_axis=opt_str("numerator_axis"),
        denominator_axis=opt_str("denominator_axis"),
        sign=int(sign) if sign in (1, -1) else sign,
        scale=float(_number(doc.get("scale", 1.0), f"{where}.scale", source)),
        constant_value=float(_number(doc.get("constant_value", 0.0), f"{where}.constant_value", source)),
    )


def _rule_to_dict(rule: MappingRule) -> dict:
    if rule.kind == CONSTANT:
        return {"kind": rule.kind, "constant_value": float(rule.constant_value)}
    out: dict = {
        "kind": rule.kind,
        "parent": rule.parent_joint,
        "child": rule.child_joint,
        "sign": int(rule.sign),
        "scale": float(rule.scale),
    }
    if rule.kind == DIRECTION_PAIR:
        out["numerator_axis"] = rule.numerator_axis
        out["denominator_axis"] = rule.denominator_axis
    if rule.kind == INTERIOR_ANGLE or rule.third_joint is not None:
        out["third"] = rule.third_joint
        out["constant_value"] = float(rule.constant_value)
    return out


def config_from_dict(doc: Any, source: str | None = None, strict: bool = True,
                     validate: bool = True) -> KinematicConfig:
    _check_keys(doc, _CONFIG_KEYS, "$", source, strict)
    skeleton = _skeleton(_require(doc, "skeleton", "$", source), "skeleton", source)
    raw_joints = _require(doc, "joints", "$", source)
    if not isinstance(raw_joints, list):
        raise SchemaError("type_error", "joints must be a list", "joints", source)
    joints = []
    for i, jd in enumerate(raw_joints):
        where = f"joints[{i}]"
        _check_keys(jd, _JOINT_KEYS, where, source, strict)
        joints.append(JointSpec(
            name=_string(_require(jd, "name", where, source), f"{where}.name", source),
            rule=_rule_from_dict(_require(jd, "rule", where, source), f"{where}.rule", source, strict),
            angle_min=float(_number(_require(jd, "angle_min", where, source), f"{where}.angle_min", source)),
            angle_max=float(_number(_require(jd, "angle_max", where, source), f"{where}.angle_max", source)),
            vel_max=float(_number(_require(jd, "vel_max", where, source), f"{where}.vel_max", source)),
        ))
    config = KinematicConfig(skeleton=skeleton, joints=tuple(joints))
    if validate:
        problems = validate_config(config)
        if problems:
            first = problems[0]
            detail = "; ".join(str(p) for p in problems)
            raise SchemaError(first.code, detail, "joints", source)
    return config


def config_to_dict(config: KinematicConfig) -> dict:
    return {
        "skeleton": list(config.skeleton.joint_names),
        "joints": [
            {
                "name": j.name,
                "rule": _rule_to_dict(j.rule),
                "angle_min": float(j.angle_min),
                "angle_max": float(j.angle_max),
                "vel_max": float(j.vel_max),
            }
            for j in config.joints
        ],
    }


def read_config(path, strict: bool = True, validate: bool = True) -> KinematicConfig:
    return config_from_dict(_read_json(path), str(path), strict, validate)


def write_config(config: KinematicConfig, path) -> None:
    _write_text(path, dumps_canonical(config_to_dict(config)))


# -- trajectories -----------------------------------------------------------

def trajectory_from_dict(doc: Any, source: str | None = None, strict: bool = True) -> JointTrajectory:
    _check_keys(doc, _TRAJ_KEYS, "$", source, strict)
    fps = _fps(doc, "$", source, None)
    names_raw = _require(doc, "joint_names", "$", source)
    if not isinstance(names_raw, list):
        raise SchemaError("type_error", "joint_names must be a list", "joint_names", source)
    names = [_string(n, f"joint_names[{i}]", source) for i, n in enumerate(names_raw)]
    if len(set(names)) != len(names):
        raise SchemaError("duplicate_joint", "joint names must be unique", "joint_names", source)
    rows = _require(doc, "samples", "$", source)
    if not isinstance(rows, list):
        raise SchemaError("type_error", "samples must be a list", "samples", source)
    if not rows:
        raise SchemaError("frames_empty", "at least one sample row is required", "samples", source)
    data = np.empty((len(rows), len(names)))
    for f, row in enumerate(rows):
        where = f"samples[{f}]"
        if not isinstance(row, list) or len(row) != len(names):
            raise SchemaError("joint_arity", f"row must hold {len(names)} angles", where, source)
        for j, v in enumerate(row):
            data[f, j] = _number(v, where, source)
    duration = doc.get("duration")
    if duration is not None:
        if isinstance(duration, bool) or not isinstance(duration, (int, float)) \
                or not math.isfinite(duration) or duration <= 0:
            raise SchemaError("duration_invalid", f"duration must be > 0, got {duration!r}",
                              "duration", source)
    return JointTrajectory(fps, tuple(names), data, duration)


def trajectory_to_dict(traj: JointTrajectory) -> dict:
    out = {
        "fps": float(traj.fps),
        "joint_names": list(traj.joint_names),
        "samples": traj.samples.tolist(),
    }
    if traj.duration is not None:
        out["duration"] = float(traj.duration)
    return out


def read_trajectory(path, strict: bool = True) -> JointTrajectory:
    return trajectory_from_dict(_read_json(path), str(path), strict)


@dataclass(frozen=True)
class TimelineExport:
    names: list[str]
    angle_lists: list[list[float]]
    time_lists: list[list[float]]

    def to_dict(self) -> dict:
        return {"names": list(self.names), "angleLists": self.angle_lists,
                "timeLists": self.time_lists}


def to_timeline(traj: JointTrajectory, degrees: bool = False) -> TimelineExport:
    samples = np.degrees(traj.samples) if degrees else traj.samples
    times = [(k + 1) / traj.fps for k in range(traj.n_frames)]
    return TimelineExport(
        names=list(traj.joint_names),
        angle_lists=[samples[:, j].tolist() for j in range(len(traj.joint_names))],
        time_lists=[list(times) for _ in traj.joint_names],
    )


def validate_timeline(doc: Any) -> list[Violation]:
    """Check a decoded timeline document against its schema invariants."""
    if not isinstance(doc, dict):
        return [Violation("not_object", "timeline must be a JSON object")]
    out = []
    missing = sorted(_TIMELINE_KEYS - set(doc))
    if missing:
        return [Violation("missing_key", f"missing key(s): {', '.join(missing)}")]
    extra = sorted(set(doc) - _TIMELINE_KEYS)
    if extra:
        out.append(Violation("unknown_key", f"unknown key(s): {', '.join(extra)}"))
    names, angles, times = doc["names"], doc["angleLists"], doc["timeLists"]
    if not all(isinstance(x, list) for x in (names, angles, times)):
        return out + [Violation("type_error", "names, angleLists and timeLists must be lists")]
    if not (len(names) == len(angles) == len(times)):
        out.append(Violation("timeline_shape",
                             f"{len(names)} names, {len(angles)} angle lists, {len(times)} time lists"))
        return out
    if not all(isinstance(n, str) for n in names):
        out.append(Violation("type_error", "names must be strings"))
    for name, a, t in zip(names, angles, times):
        if not isinstance(a, list) or not isinstance(t, list) or len(a) != len(t):
            out.append(Violation("timeline_shape", f"{name}: angle and time lists differ in length"))
            continue
        nums = a + t
        if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in nums):
            out.append(Violation("type_error", f"{name}: lists must hold numbers"))
            continue
        if not all(math.isfinite(v) for v in nums):
            out.append(Violation("nonfinite", f"{name}: non-finite value"))
            continue
        if not t or t[0] <= 0 or any(b <= a_ for a_, b in zip(t, t[1:])):
            out.append(Violation("timeline_times", f"{name}: times must increase strictly from > 0"))
    return out


def read_timeline(path) -> TimelineExport:
    doc = _read_json(path)
    problems = validate_timeline(doc)
    if problems:
        raise SchemaError(problems[0].code, "; ".join(str(p) for p in problems), "$", str(path))
    return TimelineExport(doc["names"], doc["angleLists"], doc["timeLists"])


def trajectory_to_csv(traj: JointTrajectory, degrees: bool = False) -> str:
    samples = np.degrees(traj.samples) if degrees else traj.samples
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["time", *traj.joint_names])
    for k, row in enumerate(samples):
        writer.writerow([format_number(k / traj.fps), *(format_number(v) for v in row)])
    return buf.getvalue()


def render_trajectory(traj: JointTrajectory, fmt: str = "json", degrees: bool = False) -> str:
    if fmt == "json":
        if degrees:
            raise ValueError("json trajectories are always stored in radians")
        return dumps_canonical(trajectory_to_dict(traj))
    if fmt == "csv":
        return trajectory_to_csv(traj, degrees)
    if fmt == "timeline":
        return dumps_canonical(to_timeline(traj, degrees).to_dict())
    raise ValueError(f"format must be one of {TRAJECTORY_FORMATS}, got {fmt!r}")


def write_trajectory(traj: JointTrajectory, path, fmt: str = "json", degrees: bool = False) -> None:
    _write_text(path, render_trajectory(traj, fmt, degrees))
