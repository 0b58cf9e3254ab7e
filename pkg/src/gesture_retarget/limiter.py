"""Joint-limit clamping and per-step velocity limiting.

The velocity pass is causal: each step is compared against the already
adjusted previous sample, and only steps larger than ``vel_max / fps`` are
cut back to exactly that size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownJoint
from .model import JointSpec, JointTrajectory, KinematicConfig

FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class FeasibilityReport:
    per_joint_max_velocity: dict[str, float]
    per_joint_limit_hits: dict[str, int]
    feasible: bool

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "per_joint_limit_hits": dict(self.per_joint_limit_hits),
            "per_joint_max_velocity": dict(self.per_joint_max_velocity),
        }


def _specs_for(traj: JointTrajectory, config: KinematicConfig) -> list[JointSpec]:
    by_name = {spec.name: spec for spec in config.joints}
    missing = [n for n in traj.joint_names if n not in by_name]
    if missing:
        raise UnknownJoint(f"trajectory joints not in config: {', '.join(missing)}")
    return [by_name[n] for n in traj.joint_names]


def clamp_limits(traj: JointTrajectory, config: KinematicConfig) -> JointTrajectory:
    specs = _specs_for(traj, config)
    lo = np.array([s.angle_min for s in specs])
    hi = np.array([s.angle_max for s in specs])
    return traj.replace_samples(np.minimum(np.maximum(traj.samples, lo), hi))


def limit_joint_series(theta, vel_max: float, fps: float) -> np.ndarray:
    """Velocity-limit one joint's angle series (first sample untouched)."""
    out = np.array(theta, dtype=float)
    max_step = vel_max * (1.0 / fps)
    for i in range(1, len(out)):
        prev = out[i - 1]
        step = out[i] - prev
        if step > max_step:
            out[i] = max_step + prev
        elif step < -max_step:
            out[i] = -max_step + prev
    return out


def limit_velocity(traj: JointTrajectory, config: KinematicConfig) -> JointTrajectory:
    specs = _specs_for(traj, config)
    samples = np.empty_like(traj.samples)
    for j, spec in enumerate(specs):
        samples[:, j] = limit_joint_series(traj.samples[:, j], spec.vel_max, traj.fps)
    return traj.replace_samples(samples)


def validate_trajectory(traj: JointTrajectory, config: KinematicConfig,
                        angle_resolution: float = 0.0) -> FeasibilityReport:
    """Offline feasibility check standing in for robot playback.

    ``angle_resolution`` is the rounding step of the samples (e.g. ``1e-9``
    for a trajectory read back from a canonical file). Rounding both ends of
    a step can widen it by one resolution unit, so the speed bound is relaxed
    by ``angle_resolution * fps``. In memory it stays 0.
    """
    specs = _specs_for(traj, config)
    slack = FEASIBILITY_TOL + 1.01 * angle_resolution * traj.fps
    max_vel: dict[str, float] = {}
    hits: dict[str, int] = {}
    feasible = True
    for j, spec in enumerate(specs):
        col = traj.samples[:, j]
        if len(col) > 1:
            v = float(np.max(np.abs(np.diff(col)))) * traj.fps
        else:
            v = 0.0
        n_out = int(np.count_nonzero((col < spec.angle_min) | (col > spec.angle_max)))
        max_vel[spec.name] = v
        hits[spec.name] = n_out
        if v > spec.vel_max + slack or n_out:
            feasible = False
    return FeasibilityReport(max_vel, hits, feasible)


def enforce(traj: JointTrajectory, config: KinematicConfig) -> tuple[JointTrajectory, FeasibilityReport]:
    """Velocity pass, then limit clamp, then validation."""
    out = clamp_limits(limit_velocity(traj, config), config)
    return out, validate_trajectory(out, config)
