from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gesture_retarget import data_path, read_config, read_pose_file  # noqa: E402
from gesture_retarget.model import PoseSequence, Skeleton  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"
FIXTURES = ("upright", "bend_right_elbow", "wave", "degenerate")


@pytest.fixture(scope="session")
def config():
    return read_config(data_path("pepper_like.config.json"))


@pytest.fixture(scope="session")
def upright():
    return read_pose_file(data_path("upright.pose.json"))


@pytest.fixture(scope="session")
def wave():
    return read_pose_file(data_path("wave.pose.json"))


def random_sequence(rng: np.random.Generator, n_frames: int = 8, fps: float = 15.0,
                    scale: float = 1.0) -> PoseSequence:
    return PoseSequence(Skeleton(), fps, rng.normal(scale=scale, size=(n_frames, 10, 3)))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(n, passed, detail)``."""
    def record(number: int, passed: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
