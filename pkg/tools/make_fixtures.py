"""Regenerate the shipped fixtures in src/gesture_retarget/data/.

    python tools/make_fixtures.py
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from gesture_retarget.formats import write_config, write_pose_file
from gesture_retarget.model import (
    CANONICAL_JOINTS, CONSTANT, DIRECTION_PAIR, INTERIOR_ANGLE, JointSpec, KinematicConfig,
    MappingRule, PoseSequence, Skeleton,
)

DATA = Path(__file__).resolve().parents[1] / "src" / "gesture_retarget" / "data"

UPPER_ARM = 0.3
FOREARM = 0.3


def pepper_like_config() -> KinematicConfig:
    def direction(parent, child, num, den, sign, scale=1.0):
        return MappingRule(DIRECTION_PAIR, parent, child, numerator_axis=num,
                           denominator_axis=den, sign=sign, scale=scale)

    def interior(a, b, c, sign):
        return MappingRule(INTERIOR_ANGLE, a, b, third_joint=c, sign=sign, scale=1.0,
                           constant_value=math.pi)

    joints = [
        JointSpec("HipRoll", direction("hip", "spine", "x", "y", 1, 0.3), -0.5149, 0.5149, 2.27),
        JointSpec("HipPitch", direction("hip", "spine", "z", "y", -1, 0.3), -1.0385, 1.0385, 2.27),
        JointSpec("HeadYaw", MappingRule(CONSTANT, constant_value=0.0), -2.0857, 2.0857, 7.33),
        JointSpec("HeadPitch", direction("neck", "head", "z", "y", -1), -0.7068, 0.6371, 9.23),
        # shoulder bones are measured elbow -> shoulder so a hanging arm reads zero
        JointSpec("RShoulderPitch", direction("r_elbow", "r_shoulder", "z", "y", -1), -2.0857, 2.0857, 7.33),
        JointSpec("RShoulderRoll", direction("r_elbow", "r_shoulder", "x", "y", 1), -1.562, 0.0, 9.23),
        JointSpec("RElbowRoll", interior("r_shoulder", "r_elbow", "r_wrist", -1), 0.0, 1.562, 9.23),
        JointSpec("LShoulderPitch", direction("l_elbow", "l_shoulder", "z", "y", -1), -2.0857, 2.0857, 7.33),
        JointSpec("LShoulderRoll", direction("l_elbow", "l_shoulder", "x", "y", 1), 0.0, 1.562, 9.23),
        JointSpec("LElbowRoll", interior("l_shoulder", "l_elbow", "l_wrist", 1), -1.562, 0.0, 9.23),
    ]
    return KinematicConfig(Skeleton(CANONICAL_JOINTS), tuple(joints))


def pose(spine_tilt=0.0, head_nod=0.0, r_abduct=0.0, r_bend=0.0, l_pitch=0.0,
         r_forearm_forward=0.0) -> np.ndarray:
    """Upper-body stick figure: up is -y, forward is +z, right side is -x."""
    hip = np.zeros(3)
    spine = hip + 0.5 * np.array([math.sin(spine_tilt), -math.cos(spine_tilt), 0.0])
    neck = spine + np.array([0.0, -0.5, 0.0])
    head = neck + 0.25 * np.array([0.0, -math.cos(head_nod), math.sin(head_nod)])
    r_sh = neck + np.array([-0.2, 0.0, 0.0])
    l_sh = neck + np.array([0.2, 0.0, 0.0])
    r_el = r_sh + UPPER_ARM * np.array([-math.sin(r_abduct), math.cos(r_abduct), 0.0])
    turn = r_abduct + r_bend
    r_wr = r_el + FOREARM * np.array([-math.sin(turn) * math.cos(r_forearm_forward),
                                      math.cos(turn) * math.cos(r_forearm_forward),
                                      math.sin(r_forearm_forward)])
    l_el = l_sh + UPPER_ARM * np.array([0.0, math.cos(l_pitch), math.sin(l_pitch)])
    l_wr = l_el + FOREARM * np.array([0.0, math.cos(l_pitch), math.sin(l_pitch)])
    return np.round(np.stack([hip, spine, neck, head, r_sh, r_el, r_wr, l_sh, l_el, l_wr]), 9) + 0.0


def bent_elbow_pose(bend: float) -> np.ndarray:
    # forearm swings forward in the sagittal plane; nothing else moves
    frame = pose()
    frame[6] = np.round(frame[5] + FOREARM * np.array([0.0, math.cos(bend), math.sin(bend)]), 9) + 0.0
    return frame


def wave_frames(n: int = 30, fps: float = 15.0) -> np.ndarray:
    frames = []
    for k in range(n):
        t = k / fps
        frames.append(pose(
            spine_tilt=0.08 * math.sin(2 * math.pi * 0.5 * t),
            head_nod=0.15 * math.sin(2 * math.pi * 1.0 * t),
            r_abduct=1.0 + 0.35 * math.sin(2 * math.pi * 1.5 * t),
            r_bend=0.8 + 0.7 * math.sin(2 * math.pi * 3.0 * t),
            l_pitch=0.25 * math.sin(2 * math.pi * 0.5 * t),
        ))
    return np.stack(frames)


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    sk = Skeleton(CANONICAL_JOINTS)
    write_config(pepper_like_config(), DATA / "pepper_like.config.json")
    rest = pose()
    write_pose_file(PoseSequence(sk, 15.0, np.stack([rest, rest])), DATA / "upright.pose.json")
    write_pose_file(PoseSequence(sk, 15.0, bent_elbow_pose(0.6)[None]), DATA / "bend_right_elbow.pose.json")
    write_pose_file(PoseSequence(sk, 15.0, wave_frames()), DATA / "wave.pose.json")
    lean = pose(spine_tilt=0.1)
    collapsed = np.zeros((10, 3))
    write_pose_file(PoseSequence(sk, 15.0, np.stack([lean, collapsed, rest])), DATA / "degenerate.pose.json")


if __name__ == "__main__":
    main()
