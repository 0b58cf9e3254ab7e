"""Retarget generated 3-D gesture poses onto humanoid-robot joint trajectories
and score gesture sets by motion variance and Frechet Gesture Distance."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import (
    DegenerateBone, DimensionMismatch, GestureRetargetError, InsufficientSamples, NonPSD,
    ParseError, SchemaError, TooFewItems, UnknownJoint,
)
from .formats import (
    read_config, read_pose_file, read_timeline, read_trajectory, write_config,
    write_pose_file, write_trajectory,
)
from .limiter import FeasibilityReport, clamp_limits, enforce, limit_velocity, validate_trajectory
from .metrics import (
    FeatureSpec, GaussianFit, fgd_between_sets, fit_gaussian, frechet_distance,
    motion_variance, select_style_ids,
)
from .model import (
    JointSpec, JointTrajectory, KinematicConfig, MappingRule, MetricsReport, PoseFrame,
    PoseSequence, Skeleton, Vec3, validate_config,
)
from .retarget import (
    hip_angles, interior_angle, raw_direction_angle, retarget_frame, retarget_sequence,
    shifted_scaled_angle,
)

__version__ = "0.1.0"


def data_path(name: str) -> Path:
    """Path of a shipped fixture, e.g. ``data_path("pepper_like.config.json")``."""
    return Path(str(resources.files(__package__).joinpath("data", name)))
