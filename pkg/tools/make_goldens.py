"""Regenerate tests/golden/ from the independent oracles in tests/oracles.py.

    python tools/make_goldens.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402

from gesture_retarget.formats import write_trajectory  # noqa: E402
from gesture_retarget.model import JointTrajectory  # noqa: E402

DATA = ROOT / "src" / "gesture_retarget" / "data"
GOLDEN = ROOT / "tests" / "golden"


def oracle_trajectory(pose_doc: dict, config_doc: dict) -> JointTrajectory:
    names = pose_doc["skeleton"]
    rows = []
    for frame in pose_doc["frames"]:
        by_name = dict(zip(names, frame))
        rows.append([oracles.joint_angle(j["rule"], by_name) for j in config_doc["joints"]])
    return JointTrajectory(pose_doc["fps"], [j["name"] for j in config_doc["joints"]], np.array(rows))


def main() -> None:
    GOLDEN.mkdir(exist_ok=True)
    config = json.loads((DATA / "pepper_like.config.json").read_text())
    wave = json.loads((DATA / "wave.pose.json").read_text())
    traj = oracle_trajectory(wave, config)
    write_trajectory(traj, GOLDEN / "wave.trajectory.json")

    clamped = traj.samples.copy()
    for j, spec in enumerate(config["joints"]):
        lo, hi = oracles.TIGHT_LIMITS.get(spec["name"], (spec["angle_min"], spec["angle_max"]))
        clamped[:, j] = [min(max(v, lo), hi) for v in clamped[:, j]]
    write_trajectory(traj.replace_samples(clamped), GOLDEN / "wave_clamped.trajectory.json")


if __name__ == "__main__":
    main()
