"""Shared data model: poses, kinematic configuration, trajectories, reports.

Poses are stored as a single ``(frames, joints, 3)`` float array so that the
per-frame and per-sequence code paths share one layout. Everything here is
immutable after construction; numpy arrays are flagged read-only.

Coordinate convention: the stick figure's "up" is ``-y`` (an upright spine
points from hip towards negative y), ``z`` points forward, and the subject's
right side is ``-x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import SchemaError, UnknownJoint

DEFAULT_FPS = 15.0

CANONICAL_JOINTS = (
    "hip", "spine", "neck", "head",
    "r_shoulder", "r_elbow", "r_wrist",
    "l_shoulder", "l_elbow", "l_wrist",
)
SKELETON_SIZE = 10

AXES = ("x", "y", "z")
AXIS_INDEX = {"x": 0, "y": 1, "z": 2}

DIRECTION_PAIR = "direction_pair"
INTERIOR_ANGLE = "interior_angle"
CONSTANT = "constant"
RULE_KINDS = (DIRECTION_PAIR, INTERIOR_ANGLE, CONSTANT)


class Vec3(NamedTuple):
    x: float
    y: float
    z: float


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Skeleton:
    joint_names: tuple[str, ...] = CANONICAL_JOINTS

    def __post_init__(self):
        names = tuple(self.joint_names)
        object.__setattr__(self, "joint_names", names)
        if len(names) != SKELETON_SIZE:
            raise SchemaError("skeleton_arity",
                              f"skeleton needs {SKELETON_SIZE} joints, got {len(names)}")
        if len(set(names)) != len(names):
            raise SchemaError("skeleton_duplicate", "skeleton joint names must be unique")

    def __len__(self) -> int:
        return len(self.joint_names)

    def index(self, name: str) -> int:
        try:
            return self.joint_names.index(name)
        except ValueError:
            raise UnknownJoint(f"joint {name!r} is not in the skeleton") from None


@dataclass(frozen=True, eq=False)
class PoseFrame:
    """One frame of joint positions, shape ``(joints, 3)``."""

    positions: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.positions)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise SchemaError("coord_arity", f"expected (joints, 3) positions, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise SchemaError("nonfinite", "joint positions must be finite")
        object.__setattr__(self, "positions", arr)

    def __len__(self) -> int:
        return self.positions.shape[0]

    def __getitem__(self, i: int) -> Vec3:
        return Vec3(*(float(v) for v in self.positions[i]))


@dataclass(frozen=True, eq=False)
class PoseSequence:
    skeleton: Skeleton
    fps: float
    positions: np.ndarray  # (frames, joints, 3)

    def __post_init__(self):
        fps = self.fps
        if isinstance(fps, bool) or not isinstance(fps, (int, float)) \
                or not math.isfinite(fps) or fps <= 0:
            raise SchemaError("fps_invalid", f"fps must be a positive number, got {fps!r}")
        object.__setattr__(self, "fps", float(fps))
        arr = np.asarray(self.positions, dtype=float)
        if arr.ndim != 3 or arr.shape[0] < 1:
            raise SchemaError("frames_empty", "a pose sequence needs at least one frame")
        if arr.shape[1] != len(self.skeleton):
            raise SchemaError("joint_arity",
                              f"frames hold {arr.shape[1]} joints, skeleton has {len(self.skeleton)}")
        if arr.shape[2] != 3:
            raise SchemaError("coord_arity", "joint positions must be 3-vectors")
        if not np.all(np.isfinite(arr)):
            raise SchemaError("nonfinite", "joint positions must be finite")
        object.__setattr__(self, "positions", _frozen_array(arr))

    @classmethod
    def from_frames(cls, frames: Sequence, fps: float = DEFAULT_FPS,
                    skeleton: Skeleton | None = None) -> "PoseSequence":
        skeleton = skeleton or Skeleton()
        rows = []
        for i, frame in enumerate(frames):
            arr = np.asarray(frame.positions if isinstance(frame, PoseFrame) else frame, dtype=float)
            if arr.ndim != 2 or arr.shape[0] != len(skeleton):
                raise SchemaError("joint_arity",
                                  f"frame {i} has {arr.shape[0] if arr.ndim else 0} joints, "
                                  f"expected {len(skeleton)}")
            rows.append(arr)
        if not rows:
            raise SchemaError("frames_empty", "a pose sequence needs at least one frame")
        return cls(skeleton=skeleton, fps=fps, positions=np.stack(rows))

    @property
    def n_frames(self) -> int:
        return self.positions.shape[0]

    @property
    def frames(self) -> list[PoseFrame]:
        return [PoseFrame(p) for p in self.positions]

    def frame(self, i: int) -> PoseFrame:
        return PoseFrame(self.positions[i])

    def with_fps(self, fps: float) -> "PoseSequence":
        return PoseSequence(self.skeleton, fps, self.positions)


@dataclass(frozen=True)
class MappingRule:
    """How one robot joint angle is read off the pose.

    ``direction_pair`` measures atan2 of the ``child - parent`` bone on two
    axes, shifts it by pi and multiplies by ``sign * scale``.
    ``interior_angle`` takes the angle at ``child`` between ``parent`` and
    ``third`` and maps it to ``sign * scale * (angle - constant_value)``.
    ``constant`` always yields ``constant_value``.
    """

    kind: str
    parent_joint: str | None = None
    child_joint: str | None = None
    third_joint: str | None = None
    numerator_axis: str | None = None
    denominator_axis: str | None = None
    sign: int = 1
    scale: float = 1.0
    constant_value: float = 0.0

    def referenced_joints(self) -> tuple[str, ...]:
        return tuple(j for j in (self.parent_joint, self.child_joint, self.third_joint)
                     if j is not None)


@dataclass(frozen=True)
class JointSpec:
    name: str
    rule: MappingRule
    angle_min: float
    angle_max: float
    vel_max: float


@dataclass(frozen=True)
class KinematicConfig:
    """Robot joint definitions. Construction does not validate; see
    :func:`validate_config`."""

    skeleton: Skeleton
    joints: tuple[JointSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "joints", tuple(self.joints))

    @property
    def joint_names(self) -> tuple[str, ...]:
        return tuple(j.name for j in self.joints)

    def joint(self, name: str) -> JointSpec:
        for spec in self.joints:
            if spec.name == name:
                return spec
        raise UnknownJoint(f"joint {name!r} is not defined in the config")


@dataclass(frozen=True, eq=False)
class JointTrajectory:
    fps: float
    joint_names: tuple[str, ...]
    samples: np.ndarray  # (frames, joints), radians
    duration: float | None = None

    def __post_init__(self):
        fps = self.fps
        if isinstance(fps, bool) or not isinstance(fps, (int, float)) \
                or not math.isfinite(fps) or fps <= 0:
            raise SchemaError("fps_invalid", f"fps must be a positive number, got {fps!r}")
        object.__setattr__(self, "fps", float(fps))
        names = tuple(self.joint_names)
        if len(set(names)) != len(names):
            raise SchemaError("duplicate_joint", "trajectory joint names must be unique")
        object.__setattr__(self, "joint_names", names)
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, len(names))
        if arr.ndim != 2 or arr.shape[1] != len(names):
            raise SchemaError("joint_arity", f"samples must be (frames, {len(names)}), got {arr.shape}")
        if arr.shape[0] < 1:
            raise SchemaError("frames_empty", "a trajectory needs at least one frame")
        if not np.all(np.isfinite(arr)):
            raise SchemaError("nonfinite", "trajectory angles must be finite")
        object.__setattr__(self, "samples", _frozen_array(arr))
        if self.duration is not None:
            d = self.duration
            if isinstance(d, bool) or not isinstance(d, (int, float)) \
                    or not math.isfinite(d) or d <= 0:
                raise SchemaError("duration_invalid", f"duration must be > 0, got {d!r}")
            object.__setattr__(self, "duration", float(d))

    @property
    def n_frames(self) -> int:
        return self.samples.shape[0]

    def column(self, name: str) -> np.ndarray:
        try:
            return self.samples[:, self.joint_names.index(name)]
        except ValueError:
            raise UnknownJoint(f"joint {name!r} is not in the trajectory") from None

    def replace_samples(self, samples: np.ndarray) -> "JointTrajectory":
        return JointTrajectory(self.fps, self.joint_names, samples, self.duration)

    def __eq__(self, other) -> bool:
        if not isinstance(other, JointTrajectory):
            return NotImplemented
        return (self.fps == other.fps and self.joint_names == other.joint_names
                and self.duration == other.duration
                and self.samples.shape == other.samples.shape
                and bool(np.array_equal(self.samples, other.samples)))

    def __iter__(self) -> Iterator[dict[str, float]]:
        for row in self.samples:
            yield dict(zip(self.joint_names, (float(v) for v in row)))


@dataclass
class MetricsReport:
    per_item_variance: dict[str, float] = field(default_factory=dict)
    fgd: dict[str, float] | None = None
    style_ids: tuple[str, str, str] | None = None

    def to_dict(self) -> dict:
        out: dict = {"per_item_variance": dict(self.per_item_variance)}
        if self.fgd is not None:
            out["fgd"] = dict(self.fgd)
        if self.style_ids is not None:
            intro, normal, extro = self.style_ids
            out["style_ids"] = {"introvert": intro, "normal": normal, "extrovert": extro}
        return out


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def validate_config(config: KinematicConfig) -> list[Violation]:
    """Return every invariant violation in ``config``; empty means valid."""
    out: list[Violation] = []
    names = config.skeleton.joint_names
    skeleton_names = set(names)

    seen: set[str] = set()
    for spec in config.joints:
        label = spec.name
        if spec.name in seen:
            out.append(Violation("duplicate_joint", f"robot joint {label!r} defined more than once"))
        seen.add(spec.name)

        rule = spec.rule
        if rule.kind not in RULE_KINDS:
            out.append(Violation("unknown_kind", f"{label}: rule kind {rule.kind!r} not in {RULE_KINDS}"))
        for ref in rule.referenced_joints():
            if ref not in skeleton_names:
                out.append(Violation("unknown_joint", f"{label}: {ref!r} is not a skeleton joint"))
        if rule.kind in (DIRECTION_PAIR, INTERIOR_ANGLE):
            if rule.parent_joint is None or rule.child_joint is None:
                out.append(Violation("missing_key", f"{label}: rule needs parent and child joints"))
            if rule.sign not in (1, -1):
                out.append(Violation("bad_sign", f"{label}: sign must be +1 or -1, got {rule.sign!r}"))
            if not (isinstance(rule.scale, (int, float)) and math.isfinite(rule.scale)) \
                    or rule.scale <= 0:
                out.append(Violation("scale_nonpositive", f"{label}: scale must be > 0, got {rule.scale!r}"))
        if rule.kind == DIRECTION_PAIR:
            axes = (rule.numerator_axis, rule.denominator_axis)
            if any(a not in AXES for a in axes):
                out.append(Violation("bad_axis", f"{label}: axes must be drawn from x, y, z, got {axes}"))
            elif axes[0] == axes[1]:
                out.append(Violation("same_axes", f"{label}: numerator and denominator axis are both {axes[0]!r}"))
        if (rule.third_joint is not None) != (rule.kind == INTERIOR_ANGLE):
            out.append(Violation("third_joint_mismatch",
                                 f"{label}: third joint is required for, and only for, interior_angle"))
        if not math.isfinite(rule.constant_value):
            out.append(Violation("nonfinite", f"{label}: constant_value must be finite"))

        if not (math.isfinite(spec.angle_min) and math.isfinite(spec.angle_max)):
            out.append(Violation("nonfinite", f"{label}: joint limits must be finite"))
        elif not spec.angle_min < spec.angle_max:
            out.append(Violation("limits_degenerate",
                                 f"{label}: angle_min {spec.angle_min} must be < angle_max {spec.angle_max}"))
        if not math.isfinite(spec.vel_max) or spec.vel_max <= 0:
            out.append(Violation("vel_max_nonpositive", f"{label}: vel_max must be > 0, got {spec.vel_max}"))
    return out

