"""Command-line front end.

    gesture-retarget retarget -i clip.pose.json -c robot.config.json -o clip.json
    gesture-retarget pipeline -i clip.pose.json -c robot.config.json -o clip.timeline.json --format timeline
    gesture-retarget limit|clamp -i traj.json -c robot.config.json -o out.json
    gesture-retarget validate -i traj.json -c robot.config.json
    gesture-retarget metrics variance -i clip.pose.json
    gesture-retarget metrics fgd -a setA/ -b setB/ [--features positions|speeds]
    gesture-retarget metrics styles -d clips/ [--percentiles 10,50,90]

Exit codes: 0 ok, 1 unexpected error, 2 unreadable or schema-invalid input,
3 degenerate bone under ``--on-degenerate fail``, 4 trajectory infeasible
after enforcement, 5 too few samples or items for a metric. Machine-readable
results go to stdout as canonical JSON; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .errors import (
    DegenerateBone, GestureRetargetError, InsufficientSamples, ParseError, SchemaError,
    TooFewItems, UnknownJoint,
)
from .formats import (
    CANONICAL_RESOLUTION, dumps_canonical, read_config, read_pose_file, read_trajectory, render_trajectory,
)
from .limiter import clamp_limits, limit_velocity, validate_trajectory
from .metrics import FLAT_POSITIONS, JOINT_SPEEDS, FeatureSpec, fgd_between_sets, motion_variance, \
    select_style_ids
from .model import JointTrajectory, MetricsReport
from .retarget import retarget_sequence

log = logging.getLogger("gesture_retarget")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_SCHEMA = 2
EXIT_DEGENERATE = 3
EXIT_INFEASIBLE = 4
EXIT_INSUFFICIENT = 5

POLICIES = {"hold": "hold_previous", "zero": "zero", "fail": "fail"}
FEATURES = {"positions": FLAT_POSITIONS, "speeds": JOINT_SPEEDS}
SUFFIXES = {"json": ".trajectory.json", "csv": ".csv", "timeline": ".timeline.json"}


@dataclass(frozen=True)
class PipelineOptions:
    input: str
    config: str
    output: str
    format: str = "json"
    degenerate_policy: str = "hold_previous"
    fps: float | None = None
    duration: float | None = None
    degrees: bool = False
    strict: bool = True
    enforce: bool = True

    def __post_init__(self):
        if not self.input or not self.config or not self.output:
            raise ValueError("input, config and output paths must be non-empty")
        if self.fps is not None and self.fps <= 0:
            raise ValueError("fps override must be > 0")


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, DegenerateBone):
        return EXIT_DEGENERATE
    if isinstance(exc, (InsufficientSamples, TooFewItems)):
        return EXIT_INSUFFICIENT
    if isinstance(exc, (ParseError, SchemaError, UnknownJoint, OSError)):
        return EXIT_SCHEMA
    return EXIT_ERROR


def _describe(exc: BaseException) -> str:
    if isinstance(exc, OSError) and exc.filename is not None:
        return f"{exc.strerror or exc.__class__.__name__}: {exc.filename}"
    return str(exc)


def _write_output(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run_file(opts: PipelineOptions) -> tuple[int, str, dict | None]:
    """Retarget (and optionally enforce) one pose file.

    Returns ``(exit_code, error_message, feasibility_summary)``; safe to run
    in a worker process.
    """
    try:
        seq = read_pose_file(opts.input, strict=opts.strict)
        if opts.fps is not None:
            seq = seq.with_fps(opts.fps)
        config = read_config(opts.config, strict=opts.strict)
        traj = retarget_sequence(seq, config, opts.degenerate_policy)
        if opts.duration is not None:
            traj = JointTrajectory(traj.fps, traj.joint_names, traj.samples, opts.duration)
        summary = None
        if opts.enforce:
            traj = clamp_limits(limit_velocity(traj, config), config)
            report = validate_trajectory(traj, config)
            summary = {"input": opts.input, **report.to_dict()}
            if not report.feasible:
                return EXIT_INFEASIBLE, f"{opts.input}: trajectory infeasible after enforcement", summary
        _write_output(opts.output, render_trajectory(traj, opts.format, opts.degrees))
        return EXIT_OK, "", summary
    except Exception as exc:  # noqa: BLE001 - mapped onto exit codes
        return _exit_code(exc), f"{_describe(exc)}", None


def _output_for(input_path: str, output: str, fmt: str, batch: bool) -> str:
    if not batch:
        return output
    name = Path(input_path).name
    for suffix in (".pose.json", ".json"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
            break
    return str(Path(output) / (name + SUFFIXES[fmt]))


def _run_pose_command(args, enforce: bool) -> int:
    inputs = args.input
    batch = len(inputs) > 1
    if batch:
        Path(args.output).mkdir(parents=True, exist_ok=True)
    jobs = [
        PipelineOptions(
            input=inp, config=args.config, output=_output_for(inp, args.output, args.format, batch),
            format=args.format, degenerate_policy=POLICIES[args.on_degenerate], fps=args.fps,
            duration=args.duration, degrees=args.degrees, strict=not args.lenient, enforce=enforce,
        )
        for inp in inputs
    ]
    if batch and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_file, jobs))
    else:
        results = [run_file(j) for j in jobs]

    code = EXIT_OK
    summaries = {}
    for job, (rc, msg, summary) in zip(jobs, results):
        if msg:
            print(f"error: {msg}", file=sys.stderr)
        if summary is not None:
            summaries[job.input] = summary
        code = max(code, rc)
    if enforce and summaries:
        doc = next(iter(summaries.values())) if not batch else summaries
        sys.stdout.write(dumps_canonical(doc))
    return code


def cmd_retarget(args) -> int:
    return _run_pose_command(args, enforce=False)


def cmd_pipeline(args) -> int:
    return _run_pose_command(args, enforce=True)


def _trajectory_command(args, transform) -> int:
    traj = read_trajectory(args.input, strict=not args.lenient)
    config = read_config(args.config, strict=not args.lenient)
    _write_output(args.output, render_trajectory(transform(traj, config), args.format, args.degrees))
    return EXIT_OK


def cmd_clamp(args) -> int:
    return _trajectory_command(args, clamp_limits)


def cmd_limit(args) -> int:
    return _trajectory_command(args, limit_velocity)


def cmd_validate(args) -> int:
    traj = read_trajectory(args.input, strict=not args.lenient)
    config = read_config(args.config, strict=not args.lenient)
    # samples were rounded when the file was written
    report = validate_trajectory(traj, config, angle_resolution=CANONICAL_RESOLUTION)
    sys.stdout.write(dumps_canonical(report.to_dict()))
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def _item_id(path: Path) -> str:
    name = path.name
    for suffix in (".pose.json", ".json"):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return name


def _pose_dir(path: str, strict: bool):
    d = Path(path)
    if not d.is_dir():
        raise FileNotFoundError(2, "not a directory", str(d))
    files = sorted(p for p in d.iterdir() if p.is_file() and p.name.endswith(".json"))
    return [(_item_id(p), read_pose_file(p, strict=strict)) for p in files]


def cmd_metrics(args) -> int:
    strict = not args.lenient
    if args.metric == "variance":
        seqs = [(_item_id(Path(p)), read_pose_file(p, strict=strict)) for p in args.input]
        report = MetricsReport({item: motion_variance(s) for item, s in seqs})
        doc = report.to_dict()
        if len(seqs) == 1:
            doc["variance"] = report.per_item_variance[seqs[0][0]]
    elif args.metric == "fgd":
        set_a = _pose_dir(args.set_a, strict)
        set_b = _pose_dir(args.set_b, strict)
        spec = FeatureSpec(FEATURES[args.features])
        label_a, label_b = Path(args.set_a).name or args.set_a, Path(args.set_b).name or args.set_b
        variances = {f"{label_a}/{i}": motion_variance(s) for i, s in set_a}
        variances.update({f"{label_b}/{i}": motion_variance(s) for i, s in set_b})
        fgd = fgd_between_sets([s for _, s in set_a], [s for _, s in set_b], spec)
        doc = MetricsReport(variances, fgd={f"{label_a}:{label_b}": fgd}).to_dict()
        doc["features"] = spec.kind
    else:
        items = _pose_dir(args.dir, strict)
        variances = {i: motion_variance(s) for i, s in items}
        ids = select_style_ids(variances, args.percentiles)
        doc = MetricsReport(variances, style_ids=ids).to_dict()
    sys.stdout.write(dumps_canonical(doc))
    return EXIT_OK


def _percentiles(text: str) -> tuple[float, float, float]:
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"percentiles must be numbers, got {text!r}") from None
    if len(values) != 3 or not all(0 <= v <= 100 for v in values):
        raise argparse.ArgumentTypeError("expected three percentiles L,M,H in [0, 100]")
    return values


def _positive(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gesture-retarget", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lenient", action="store_true", help="warn on unknown keys instead of failing")

    out_fmt = argparse.ArgumentParser(add_help=False)
    out_fmt.add_argument("-o", "--output", required=True)
    out_fmt.add_argument("--format", choices=sorted(SUFFIXES), default="json")
    out_fmt.add_argument("--degrees", action="store_true", help="csv/timeline angles in degrees")

    for name, func, help_text in (
        ("retarget", cmd_retarget, "pose file(s) -> raw joint trajectory"),
        ("pipeline", cmd_pipeline, "retarget, velocity-limit, clamp, validate, export"),
    ):
        p = sub.add_parser(name, parents=[common, out_fmt], help=help_text)
        p.add_argument("-i", "--input", action="append", required=True,
                       help="pose file; repeat for batch mode (then -o is a directory)")
        p.add_argument("-c", "--config", required=True)
        p.add_argument("--fps", type=_positive, help="override the pose file frame rate")
        p.add_argument("--on-degenerate", choices=sorted(POLICIES), default="hold")
        p.add_argument("--duration", type=_positive, help="clip length in seconds, stored as metadata")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers in batch mode")
        p.set_defaults(func=func)

    for name, func, help_text in (
        ("clamp", cmd_clamp, "clamp a trajectory into joint limits"),
        ("limit", cmd_limit, "apply the per-step velocity limit to a trajectory"),
    ):
        p = sub.add_parser(name, parents=[common, out_fmt], help=help_text)
        p.add_argument("-i", "--input", required=True, help="trajectory json")
        p.add_argument("-c", "--config", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("validate", parents=[common], help="feasibility report for a trajectory")
    p.add_argument("-i", "--input", required=True, help="trajectory json")
    p.add_argument("-c", "--config", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("metrics", help="gesture statistics")
    msub = p.add_subparsers(dest="metric", required=True)
    m = msub.add_parser("variance", parents=[common], help="motion variance per pose file")
    m.add_argument("-i", "--input", action="append", required=True)
    m = msub.add_parser("fgd", parents=[common], help="Frechet gesture distance between two sets")
    m.add_argument("-a", dest="set_a", required=True, help="directory of pose files")
    m.add_argument("-b", dest="set_b", required=True, help="directory of pose files")
    m.add_argument("--features", choices=sorted(FEATURES), default="positions")
    m = msub.add_parser("styles", parents=[common], help="pick introvert/normal/extrovert clips")
    m.add_argument("-d", "--dir", required=True, help="directory of pose files")
    m.add_argument("--percentiles", type=_percentiles, default=(10.0, 50.0, 90.0),
                   help="L,M,H (default 10,50,90)")
    for m in msub.choices.values():
        m.set_defaults(func=cmd_metrics)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except GestureRetargetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except OSError as exc:
        print(f"error: {_describe(exc)}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
