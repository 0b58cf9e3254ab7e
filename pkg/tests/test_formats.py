import json
import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import FIXTURES, GOLDEN
from gesture_retarget import data_path
from gesture_retarget.errors import SCHEMA_CODES, ParseError, SchemaError
from gesture_retarget.formats import (
    config_from_dict, config_to_dict, dumps_canonical, format_number, pose_from_dict,
    pose_to_dict, read_config, read_pose_file, read_timeline, read_trajectory, render_trajectory,
    trajectory_from_dict, trajectory_to_dict, validate_timeline, write_config, write_pose_file,
    write_trajectory,
)
from gesture_retarget.model import CANONICAL_JOINTS, JointTrajectory


def pose_doc(**overrides):
    doc = {"fps": 15.0, "skeleton": list(CANONICAL_JOINTS), "frames": [[[0.0, 0.0, 0.0]] * 10]}
    doc.update(overrides)
    return doc


@pytest.mark.parametrize("value, text", [
    (0.0, "0.0"),
    (-0.0, "0.0"),
    (-1e-12, "0.0"),
    (1 / 15, "0.066666667"),
    (0.3, "0.3"),
    (-2.0857, "-2.0857"),
    (15.0, "15.0"),
    (3, "3"),
    (1e7, "10000000.0"),
])
def test_format_number(value, text):
    assert format_number(value) == text


def test_format_number_rejects_nonfinite():
    with pytest.raises(ValueError):
        format_number(float("nan"))


def test_canonical_layout():
    text = dumps_canonical({"b": [1.0, 2.0], "a": {"z": "s", "y": None}, "c": [[1.0], [2.0, 3.0]]})
    assert text == ('{\n  "a": {\n    "y": null,\n    "z": "s"\n  },\n  "b": [1.0, 2.0],\n'
                    '  "c": [[1.0], [2.0, 3.0]]\n}\n')


# -- poses ---------------------------------------------------------------------

def test_read_upright():
    seq = read_pose_file(data_path("upright.pose.json"))
    assert seq.n_frames == 2 and seq.fps == 15.0
    assert seq.skeleton.joint_names == CANONICAL_JOINTS


def test_nine_joint_frame_rejected():
    with pytest.raises(SchemaError) as exc:
        pose_from_dict(pose_doc(frames=[[[0.0, 0.0, 0.0]] * 9]))
    assert exc.value.code == "joint_arity"
    assert exc.value.location == "frames[0]"


def test_missing_fps_defaults_with_warning(caplog):
    doc = pose_doc()
    del doc["fps"]
    with caplog.at_level(logging.WARNING):
        seq = pose_from_dict(doc, source="clip.json")
    assert seq.fps == 15.0
    assert "fps missing" in caplog.text


def test_unknown_key_strict_vs_lenient(caplog):
    doc = pose_doc(speaker=3)
    with pytest.raises(SchemaError) as exc:
        pose_from_dict(doc)
    assert exc.value.code == "unknown_key"
    with caplog.at_level(logging.WARNING):
        pose_from_dict(doc, strict=False)
    assert "speaker" in caplog.text


def test_parse_error_has_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "fps": 15,\n  "frames": [,]\n}\n')
    with pytest.raises(ParseError) as exc:
        read_pose_file(path)
    assert exc.value.line == 3
    assert str(path) in str(exc.value)


@pytest.mark.parametrize("doc, code", [
    ([], "not_object"),
    (pose_doc(fps=0), "fps_invalid"),
    (pose_doc(fps="15"), "fps_invalid"),
    (pose_doc(skeleton=list(CANONICAL_JOINTS[:9])), "skeleton_arity"),
    (pose_doc(skeleton=list(CANONICAL_JOINTS[:9]) + ["hip"]), "skeleton_duplicate"),
    (pose_doc(skeleton="hip"), "type_error"),
    (pose_doc(frames=[]), "frames_empty"),
    (pose_doc(frames=[[[0.0, 0.0]] * 10]), "coord_arity"),
    (pose_doc(frames=[[[0.0, 0.0, "x"]] * 10]), "type_error"),
    (pose_doc(frames=[[[0.0, 0.0, float("nan")]] * 10]), "nonfinite"),
    ({"fps": 15.0, "frames": []}, "missing_key"),
])
def test_pose_schema_codes(doc, code):
    with pytest.raises(SchemaError) as exc:
        pose_from_dict(doc)
    assert exc.value.code == code
    assert code in SCHEMA_CODES


# -- config --------------------------------------------------------------------

def test_read_shipped_config():
    cfg = read_config(data_path("pepper_like.config.json"))
    assert cfg.joint("HipRoll").rule.scale == 0.3
    assert cfg.joint("HipPitch").rule.scale == 0.3
    assert cfg.joint("HipPitch").rule.sign == -1


def _config_doc():
    return json.loads(data_path("pepper_like.config.json").read_text())


@pytest.mark.parametrize("mutate, code", [
    (lambda d: d["joints"][0].update(vel_max=0.0), "vel_max_nonpositive"),
    (lambda d: d["joints"][0].update(angle_min=1.0, angle_max=1.0), "limits_degenerate"),
    (lambda d: d["joints"][0]["rule"].update(parent="wrist_r"), "unknown_joint"),
    (lambda d: d["joints"][0]["rule"].update(sign=0), "bad_sign"),
    (lambda d: d["joints"][0]["rule"].update(kind="spline"), "unknown_kind"),
    (lambda d: d["joints"][0]["rule"].update(denominator_axis="x"), "same_axes"),
    (lambda d: d["joints"][0]["rule"].update(numerator_axis="w"), "bad_axis"),
    (lambda d: d["joints"][0]["rule"].update(scale=-0.3), "scale_nonpositive"),
    (lambda d: d["joints"][0]["rule"].update(third="neck"), "third_joint_mismatch"),
    (lambda d: d["joints"][1].update(name="HipRoll"), "duplicate_joint"),
    (lambda d: d["joints"][0].update(comment="x"), "unknown_key"),
    (lambda d: d["joints"][0].pop("vel_max"), "missing_key"),
    (lambda d: d.update(joints={}), "type_error"),
])
def test_config_schema_codes(mutate, code):
    doc = _config_doc()
    mutate(doc)
    with pytest.raises(SchemaError) as exc:
        config_from_dict(doc)
    assert exc.value.code == code
    assert code in SCHEMA_CODES


def test_config_round_trip(config):
    assert config_from_dict(json.loads(dumps_canonical(config_to_dict(config)))) == config


# -- trajectories ----------------------------------------------------------------

def test_csv_two_zero_frames():
    traj = JointTrajectory(15.0, ("A", "B"), np.zeros((2, 2)))
    assert render_trajectory(traj, "csv") == "time,A,B\n0.0,0.0,0.0\n0.066666667,0.0,0.0\n"


def test_csv_degrees():
    traj = JointTrajectory(15.0, ("A",), [[np.pi / 2]])
    assert render_trajectory(traj, "csv", degrees=True).splitlines()[1] == "0.0,90.0"


def test_timeline_single_frame(tmp_path):
    traj = JointTrajectory(15.0, ("A", "B"), [[0.1, 0.2]])
    path = tmp_path / "t.json"
    write_trajectory(traj, path, "timeline")
    doc = json.loads(path.read_text())
    assert doc["timeLists"] == [[0.066666667], [0.066666667]]
    assert doc["angleLists"] == [[0.1], [0.2]]
    assert doc["names"] == ["A", "B"]
    assert validate_timeline(doc) == []
    assert read_timeline(path).names == ["A", "B"]


@pytest.mark.parametrize("doc, code", [
    ({"names": ["A"], "angleLists": [[0.1]], "timeLists": [[0.0]]}, "timeline_times"),
    ({"names": ["A"], "angleLists": [[0.1, 0.2]], "timeLists": [[0.2, 0.1]]}, "timeline_times"),
    ({"names": ["A", "B"], "angleLists": [[0.1]], "timeLists": [[0.1]]}, "timeline_shape"),
    ({"names": ["A"], "angleLists": [[0.1, 0.2]], "timeLists": [[0.1]]}, "timeline_shape"),
    ({"names": ["A"], "angleLists": [[0.1]]}, "missing_key"),
    ([], "not_object"),
])
def test_timeline_violations(doc, code):
    assert code in [v.code for v in validate_timeline(doc)]
    assert code in SCHEMA_CODES


def test_trajectory_json_round_trip(tmp_path, config, wave):
    from gesture_retarget.retarget import retarget_sequence
    traj = retarget_sequence(wave, config)
    path = tmp_path / "t.json"
    write_trajectory(traj, path)
    back = read_trajectory(path)
    assert back.joint_names == traj.joint_names and back.fps == traj.fps
    np.testing.assert_allclose(back.samples, traj.samples, rtol=0, atol=5e-10)
    write_trajectory(back, tmp_path / "u.json")
    assert (tmp_path / "u.json").read_bytes() == path.read_bytes()


def test_trajectory_duration_round_trip():
    traj = JointTrajectory(15.0, ("A",), [[0.25]], duration=2.5)
    back = trajectory_from_dict(json.loads(dumps_canonical(trajectory_to_dict(traj))))
    assert back == traj


@pytest.mark.parametrize("doc, code", [
    ({"joint_names": ["A"], "samples": [[0.0]]}, "fps_invalid"),
    ({"fps": 15, "joint_names": ["A"], "samples": []}, "frames_empty"),
    ({"fps": 15, "joint_names": ["A"], "samples": [[0.0, 1.0]]}, "joint_arity"),
    ({"fps": 15, "joint_names": ["A", "A"], "samples": [[0.0, 1.0]]}, "duplicate_joint"),
    ({"fps": 15, "joint_names": ["A"], "samples": [[0.0]], "duration": -1}, "duration_invalid"),
])
def test_trajectory_schema_codes(doc, code):
    with pytest.raises(SchemaError) as exc:
        trajectory_from_dict(doc)
    assert exc.value.code == code


def test_unknown_format():
    with pytest.raises(ValueError):
        render_trajectory(JointTrajectory(15.0, ("A",), [[0.0]]), "npz")


# -- canonical byte identity ------------------------------------------------------

@pytest.mark.parametrize("name", FIXTURES)
def test_pose_fixtures_canonical(tmp_path, name):
    src = data_path(f"{name}.pose.json")
    write_pose_file(read_pose_file(src), tmp_path / "p.json")
    assert (tmp_path / "p.json").read_bytes() == src.read_bytes()


def test_config_fixture_canonical(tmp_path):
    src = data_path("pepper_like.config.json")
    write_config(read_config(src), tmp_path / "c.json")
    assert (tmp_path / "c.json").read_bytes() == src.read_bytes()


@pytest.mark.parametrize("name", ["wave.trajectory.json", "wave_clamped.trajectory.json"])
def test_golden_trajectories_canonical(tmp_path, name):
    write_trajectory(read_trajectory(GOLDEN / name), tmp_path / "t.json")
    assert (tmp_path / "t.json").read_bytes() == (GOLDEN / name).read_bytes()


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 4)),
              elements=st.floats(-1e5, 1e5, allow_nan=False)),
       st.floats(0.5, 240))
def test_trajectory_serialization_idempotent(samples, fps):
    traj = JointTrajectory(fps, tuple(f"J{i}" for i in range(samples.shape[1])), samples)
    first = dumps_canonical(trajectory_to_dict(traj))
    again = dumps_canonical(trajectory_to_dict(trajectory_from_dict(json.loads(first))))
    assert again == first


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 4), st.just(10), st.just(3)),
              elements=st.floats(-10, 10, allow_nan=False)))
def test_pose_serialization_idempotent(positions):
    from gesture_retarget.model import PoseSequence, Skeleton
    seq = PoseSequence(Skeleton(), 15.0, positions)
    first = dumps_canonical(pose_to_dict(seq))
    assert dumps_canonical(pose_to_dict(pose_from_dict(json.loads(first)))) == first
