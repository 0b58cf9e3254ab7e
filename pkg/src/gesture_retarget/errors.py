"""Exception types raised across the package."""

from __future__ import annotations


class GestureRetargetError(Exception):
    """Base class for every error raised by this package."""


class DegenerateBone(GestureRetargetError):
    """A bone has no usable direction (zero length or zero planar projection)."""

    def __init__(self, message: str, joint: str | None = None, frame: int | None = None):
        self.reason = message
        self.joint = joint
        self.frame = frame
        where = []
        if joint is not None:
            where.append(f"joint {joint!r}")
        if frame is not None:
            where.append(f"frame {frame}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)

    def located(self, joint: str | None = None, frame: int | None = None) -> "DegenerateBone":
        return DegenerateBone(
            self.reason,
            joint=joint if joint is not None else self.joint,
            frame=frame if frame is not None else self.frame,
        )


class UnknownJoint(GestureRetargetError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown joint"


class ParseError(GestureRetargetError):
    """Input is not well-formed (e.g. invalid JSON)."""

    def __init__(self, message: str, source: str | None = None, line: int | None = None,
                 column: int | None = None):
        self.source = source
        self.line = line
        self.column = column
        loc = source or "<input>"
        if line is not None:
            loc += f":{line}"
            if column is not None:
                loc += f":{column}"
        super().__init__(f"{loc}: {message}")


class SchemaError(GestureRetargetError, ValueError):
    """Well-formed input that violates a schema or type invariant.

    ``code`` is a stable machine-readable identifier (see ``SCHEMA_CODES``).
    """

    def __init__(self, code: str, message: str, location: str | None = None,
                 source: str | None = None):
        self.code = code
        self.detail = message
        self.location = location
        self.source = source
        prefix = source or ""
        if location:
            prefix = f"{prefix}:{location}" if prefix else location
        text = f"[{code}] {message}"
        super().__init__(f"{prefix}: {text}" if prefix else text)


class InsufficientSamples(GestureRetargetError, ValueError):
    pass


class DimensionMismatch(GestureRetargetError, ValueError):
    pass


class NonPSD(GestureRetargetError, ValueError):
    pass


class TooFewItems(GestureRetargetError, ValueError):
    pass


# Every code a SchemaError (or config Violation) can carry.
SCHEMA_CODES = {
    "not_object": "document root (or a nested record) is not a JSON object",
    "unknown_key": "unexpected key in strict mode",
    "missing_key": "required key absent",
    "type_error": "value has the wrong JSON type",
    "nonfinite": "number is NaN or infinite",
    "fps_invalid": "fps missing where required, not a number, or <= 0",
    "skeleton_arity": "skeleton does not list exactly 10 joints",
    "skeleton_duplicate": "skeleton joint names are not unique",
    "frames_empty": "pose or trajectory has no frames",
    "joint_arity": "frame does not hold one entry per skeleton joint",
    "coord_arity": "joint position is not an [x, y, z] triple",
    "skeleton_mismatch": "pose skeleton lacks a joint the config references",
    "duplicate_joint": "robot joint name used twice",
    "unknown_joint": "mapping rule references a name absent from the skeleton",
    "unknown_kind": "mapping rule kind is not one of the supported kinds",
    "bad_axis": "axis is not one of x, y, z",
    "same_axes": "direction_pair uses the same axis twice",
    "third_joint_mismatch": "third joint present without interior_angle, or missing with it",
    "bad_sign": "sign is not +1 or -1",
    "scale_nonpositive": "scale <= 0 on a non-constant rule",
    "limits_degenerate": "angle_min is not strictly below angle_max",
    "vel_max_nonpositive": "vel_max <= 0",
    "timeline_shape": "timeline lists disagree in length",
    "timeline_times": "timeline times not strictly increasing from > 0",
    "duration_invalid": "duration metadata is not a positive number",
}
