"""Pose-to-angle conversion.

A bone from point A to B is projected onto two coordinate axes and its
direction read with ``atan2(d_num, d_den)``. With the stick figure's up
direction along ``-y`` an upright bone reads pi, so the raw angle is shifted
by pi (towards zero) and multiplied by a per-joint scale and sign:

    hip_roll  =  m * shift(atan2(Bx - Ax, By - Ay))
    hip_pitch = -n * shift(atan2(Bz - Az, By - Ay))

with ``shift(r) = r + pi`` for ``r < 0`` and ``r - pi`` otherwise, and
``m = n = 0.3`` by default. Elbow-like joints use the interior angle at the
middle point of a three-point chain instead.
"""

from __future__ import annotations

import math
from typing import Dict

import numpy as np

from .errors import DegenerateBone, SchemaError
from .model import (
    AXIS_INDEX, CONSTANT, DIRECTION_PAIR, INTERIOR_ANGLE, JointTrajectory,
    KinematicConfig, PoseFrame, PoseSequence, Skeleton,
)

HIP_ROLL_SCALE = 0.3
HIP_PITCH_SCALE = 0.3

DEGENERATE_POLICIES = ("hold_previous", "zero", "fail")

AngleFrame = Dict[str, float]


def _axis(axis) -> int:
    if isinstance(axis, int):
        return axis
    return AXIS_INDEX[axis]


def raw_direction_angle(a, b, numerator_axis="x", denominator_axis="y") -> float:
    """``atan2`` of the ``b - a`` bone on the two given axes, in (-pi, pi]."""
    ni, di = _axis(numerator_axis), _axis(denominator_axis)
    # "+ 0.0" turns a -0.0 difference into +0.0 so the result never lands on -pi
    d_num = (float(b[ni]) - float(a[ni])) + 0.0
    d_den = (float(b[di]) - float(a[di])) + 0.0
    if d_num == 0.0 and d_den == 0.0:
        raise DegenerateBone("bone has no extent in the measurement plane")
    return math.atan2(d_num, d_den)


def shift_angle(raw: float) -> float:
    # raw == 0 (bone along +y, a fully inverted posture) takes the raw > 0 branch
    if raw < 0.0:
        return raw + math.pi
    return raw - math.pi


def shifted_scaled_angle(raw: float, sign: int = 1, scale: float = 1.0) -> float:
    return sign * (shift_angle(raw) * scale)


def hip_angles(a, b, m: float = HIP_ROLL_SCALE, n: float = HIP_PITCH_SCALE) -> tuple[float, float]:
    """(HipRoll, HipPitch) of the hip-to-spine bone ``a -> b``."""
    roll = shifted_scaled_angle(raw_direction_angle(a, b, "x", "y"), +1, m)
    pitch = shifted_scaled_angle(raw_direction_angle(a, b, "z", "y"), -1, n)
    return roll, pitch


def interior_angle(a, b, c) -> float:
    """Angle at ``b`` between segments ``b -> a`` and ``b -> c``, in [0, pi]."""
    u = [float(a[i]) - float(b[i]) for i in range(3)]
    v = [float(c[i]) - float(b[i]) for i in range(3)]
    nu = math.sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2])
    nv = math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    if nu == 0.0 or nv == 0.0:
        raise DegenerateBone("segment has zero length")
    cos_angle = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]) / (nu * nv)
    cross = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
    sin_angle = math.sqrt(cross[0] ** 2 + cross[1] ** 2 + cross[2] ** 2) / (nu * nv)
    # atan2 keeps full precision near 0 and pi, where acos(cos) does not
    return math.atan2(sin_angle, max(-1.0, min(1.0, cos_angle)))


def _check_skeleton(skeleton: Skeleton, config: KinematicConfig) -> None:
    names = set(skeleton.joint_names)
    for spec in config.joints:
        for ref in spec.rule.referenced_joints():
            if ref not in names:
                raise SchemaError("skeleton_mismatch",
                                  f"robot joint {spec.name!r} needs pose joint {ref!r}")


def _evaluate(spec, positions: np.ndarray, index: Dict[str, int]) -> float:
    rule = spec.rule
    if rule.kind == CONSTANT:
        return float(rule.constant_value)
    a = positions[index[rule.parent_joint]]
    b = positions[index[rule.child_joint]]
    if rule.kind == DIRECTION_PAIR:
        raw = raw_direction_angle(a, b, rule.numerator_axis, rule.denominator_axis)
        return shifted_scaled_angle(raw, rule.sign, rule.scale)
    if rule.kind == INTERIOR_ANGLE:
        c = positions[index[rule.third_joint]]
        return rule.sign * (rule.scale * (interior_angle(a, b, c) - rule.constant_value))
    raise SchemaError("unknown_kind", f"unsupported rule kind {rule.kind!r}")


def retarget_frame(frame: PoseFrame, config: KinematicConfig,
                   skeleton: Skeleton | None = None) -> AngleFrame:
    """Evaluate every configured joint on one frame.

    ``skeleton`` names the frame's joint layout and defaults to the config's.
    Raises :class:`DegenerateBone` naming the offending robot joint.
    """
    skeleton = skeleton or config.skeleton
    _check_skeleton(skeleton, config)
    positions = frame.positions if isinstance(frame, PoseFrame) else np.asarray(frame, dtype=float)
    if positions.shape != (len(skeleton), 3):
        raise SchemaError("joint_arity", f"frame shape {positions.shape} does not match skeleton")
    index = {n: i for i, n in enumerate(skeleton.joint_names)}
    out: AngleFrame = {}
    for spec in config.joints:
        try:
            out[spec.name] = _evaluate(spec, positions, index)
        except DegenerateBone as exc:
            raise exc.located(joint=spec.name) from None
    return out


def retarget_sequence(seq: PoseSequence, config: KinematicConfig,
                      degenerate_policy: str = "hold_previous") -> JointTrajectory:
    """Retarget every frame of ``seq``.

    Degenerate bones are handled per joint: ``hold_previous`` repeats that
    joint's last good angle (0 if none yet), ``zero`` writes 0, ``fail``
    re-raises with the frame index attached.
    """
    if degenerate_policy not in DEGENERATE_POLICIES:
        raise ValueError(f"degenerate_policy must be one of {DEGENERATE_POLICIES}")
    _check_skeleton(seq.skeleton, config)
    index = {n: i for i, n in enumerate(seq.skeleton.joint_names)}
    specs = config.joints
    samples = np.zeros((seq.n_frames, len(specs)))
    last = [0.0] * len(specs)
    for f, positions in enumerate(seq.positions):
        for j, spec in enumerate(specs):
            try:
                value = _evaluate(spec, positions, index)
            except DegenerateBone as exc:
                if degenerate_policy == "fail":
                    raise exc.located(joint=spec.name, frame=f) from None
                value = last[j] if degenerate_policy == "hold_previous" else 0.0
            samples[f, j] = value
            last[j] = value
    return JointTrajectory(seq.fps, config.joint_names, samples)
