"""Tests for the mobile / inch-worm switching decision."""

import itertools
import json

import numpy as np
import pytest

from steelnav.cloud import FilterConfig, PlanarPatch, PointCloud, RigidTransform
from steelnav.errors import DomainError
from steelnav.footprint import FootGeometry, FootPose
from steelnav.switching import (
    HeightConfig,
    StageDiagnostics,
    SwitchDecision,
    Transformation,
    decide,
    decision_to_dict,
    decision_to_json,
    height_availability,
    plane_availability,
    switching_function,
)
from steelnav.synth import CloudShape, SyntheticCloudSpec, generate_cloud


def square_cloud(z: float = 0.0) -> PointCloud:
    pose = RigidTransform.from_euler_zyx(0.0, 0.0, 0.0, translation=(0.0, 0.0, z))
    spec = SyntheticCloudSpec(shape=CloudShape.RECTANGLE, size_x=0.30, size_y=0.30, pitch=0.01, pose=pose)
    return generate_cloud(spec, seed=0)


def small_filter() -> FilterConfig:
    return FilterConfig(min_inlier_count=50)


# -- switching_function ------------------------------------------------------


def test_switching_truth_table():
    for pa, am, hc in itertools.product([False, True], repeat=3):
        ok, transformation = switching_function(pa, am, hc)
        assert ok == (pa and am and hc)
        expected = Transformation.MOBILE if ok else Transformation.INCH_WORM
        assert transformation is expected


def test_transformation_wire_values():
    assert Transformation.MOBILE.value == "Mobile"
    assert Transformation.INCH_WORM.value == "InchWorm"


# -- plane_availability ------------------------------------------------------


def test_plane_availability_none_is_false():
    assert plane_availability(None) is False


def test_plane_availability_patch_is_true():
    pts = np.column_stack([np.tile(np.arange(4) * 0.01, 4), np.repeat(np.arange(4) * 0.01, 4), np.zeros(16)])
    patch = PlanarPatch(
        inliers=PointCloud(pts),
        normal=np.array([0.0, 0.0, 1.0]),
        centroid=pts.mean(axis=0),
        plane_coeffs=(0.0, 0.0, 1.0, 0.0),
    )
    assert plane_availability(patch) is True


# -- height_availability -----------------------------------------------------


def test_height_exact_match():
    ok, delta = height_availability((0.2, -0.1, 0.0), HeightConfig())
    assert ok is True
    assert delta == 0.0


def test_height_out_of_band():
    ok, delta = height_availability((0.0, 0.0, -0.07), HeightConfig())
    assert ok is False
    assert delta == pytest.approx(-0.07)


def test_height_band_is_inclusive():
    cfg = HeightConfig(tolerance=0.01)
    ok_hi, delta_hi = height_availability((0.0, 0.0, 0.01), cfg)
    ok_lo, delta_lo = height_availability((0.0, 0.0, -0.01), cfg)
    assert ok_hi is True and delta_hi == pytest.approx(0.01)
    assert ok_lo is True and delta_lo == pytest.approx(-0.01)
    ok_over, _ = height_availability((0.0, 0.0, 0.0100001), cfg)
    assert ok_over is False


def test_height_uses_camera_to_base_transform():
    lift = RigidTransform.from_euler_zyx(0.0, 0.0, 0.0, translation=(0.0, 0.0, 0.5))
    cfg = HeightConfig(camera_to_base=lift)
    ok, delta = height_availability((0.0, 0.0, -0.5), cfg)
    assert ok is True
    assert delta == pytest.approx(0.0)


def test_height_nonzero_base_height():
    cfg = HeightConfig(base_height=0.3, tolerance=0.01)
    ok, delta = height_availability((0.0, 0.0, 0.3), cfg)
    assert ok is True and delta == pytest.approx(0.0)
    ok2, delta2 = height_availability((0.0, 0.0, 0.0), cfg)
    assert ok2 is False and delta2 == pytest.approx(-0.3)


def test_height_config_rejects_bad_tolerance():
    with pytest.raises(DomainError):
        HeightConfig(tolerance=0.0)
    with pytest.raises(DomainError):
        HeightConfig(tolerance=-0.01)


# -- SwitchDecision consistency guards ---------------------------------------


def _diag():
    return StageDiagnostics(inlier_count=0, boundary_count=0, accepted_candidate=None, height_delta=None)


def test_decision_rejects_wrong_conjunction():
    with pytest.raises(DomainError):
        SwitchDecision(
            plane_ok=True, area_ok=True, height_ok=True, ok=False,
            transformation=Transformation.INCH_WORM, pose=None, diagnostics=_diag(),
        )


def test_decision_rejects_wrong_transformation():
    with pytest.raises(DomainError):
        SwitchDecision(
            plane_ok=False, area_ok=False, height_ok=False, ok=False,
            transformation=Transformation.MOBILE, pose=None, diagnostics=_diag(),
        )


def test_decision_rejects_pose_without_area():
    pose = FootPose(position=np.zeros(3), orientation=np.eye(3))
    with pytest.raises(DomainError):
        SwitchDecision(
            plane_ok=True, area_ok=False, height_ok=True, ok=False,
            transformation=Transformation.INCH_WORM, pose=pose, diagnostics=_diag(),
        )


# -- decide ------------------------------------------------------------------


def test_decide_no_plane_short_circuits():
    rng = np.random.default_rng(3)
    scatter = PointCloud(rng.uniform(-1.0, 1.0, size=(40, 3)))
    decision = decide(scatter, FilterConfig())
    assert decision.plane_ok is False
    assert decision.area_ok is False
    assert decision.height_ok is False
    assert decision.ok is False
    assert decision.transformation is Transformation.INCH_WORM
    assert decision.pose is None
    assert decision.diagnostics.inlier_count == 0
    assert decision.diagnostics.boundary_count == 0
    assert decision.diagnostics.accepted_candidate is None
    assert decision.diagnostics.height_delta is None


def test_decide_level_square_goes_mobile():
    decision = decide(square_cloud(), small_filter())
    assert (decision.plane_ok, decision.area_ok, decision.height_ok) == (True, True, True)
    assert decision.ok is True
    assert decision.transformation is Transformation.MOBILE
    assert decision.pose is not None
    assert decision.diagnostics.inlier_count > 0
    assert decision.diagnostics.boundary_count > 0
    assert decision.diagnostics.accepted_candidate is not None
    assert decision.diagnostics.accepted_candidate >= 1
    assert decision.diagnostics.height_delta == pytest.approx(0.0, abs=1e-6)


def test_decide_lowered_square_keeps_pose_but_steps():
    decision = decide(square_cloud(z=-0.07), small_filter())
    assert decision.plane_ok is True
    assert decision.area_ok is True
    assert decision.height_ok is False
    assert decision.ok is False
    assert decision.transformation is Transformation.INCH_WORM
    assert decision.pose is not None
    assert decision.diagnostics.height_delta == pytest.approx(-0.07, abs=1e-3)


def test_decide_narrow_strip_rejects_foot():
    spec = SyntheticCloudSpec(shape=CloudShape.STRIP, size_x=0.40, size_y=0.05, pitch=0.01)
    decision = decide(generate_cloud(spec, seed=0), small_filter())
    assert decision.plane_ok is True
    assert decision.area_ok is False
    assert decision.ok is False
    assert decision.transformation is Transformation.INCH_WORM
    assert decision.pose is None
    assert decision.diagnostics.accepted_candidate is None


def test_decide_is_deterministic():
    cloud = square_cloud()
    a = decision_to_json(decide(cloud, small_filter(), seed=7))
    b = decision_to_json(decide(cloud, small_filter(), seed=7))
    assert a == b


# -- wire format -------------------------------------------------------------


def test_decision_dict_key_names():
    decision = decide(square_cloud(), small_filter())
    wire = decision_to_dict(decision)
    assert list(wire.keys()) == ["s_pa", "s_am", "s_hc", "s", "transformation", "pose", "diagnostics"]
    assert list(wire["diagnostics"].keys()) == [
        "inlier_count", "boundary_count", "accepted_candidate", "height_delta_m",
    ]
    assert wire["transformation"] == "Mobile"
    assert set(wire["pose"].keys()) == {"position", "orientation"}
    assert len(wire["pose"]["position"]) == 3
    orientation = np.asarray(wire["pose"]["orientation"], dtype=np.float64)
    assert orientation.shape == (3, 3)
    np.testing.assert_allclose(orientation, np.asarray(decision.pose.orientation), atol=1e-12)


def test_decision_dict_null_pose_when_rejected():
    spec = SyntheticCloudSpec(shape=CloudShape.STRIP, size_x=0.40, size_y=0.05, pitch=0.01)
    wire = decision_to_dict(decide(generate_cloud(spec, seed=0), small_filter()))
    assert wire["pose"] is None
    assert wire["s_am"] is False
    assert wire["transformation"] == "InchWorm"


def test_decision_json_round_trip_preserves_order():
    decision = decide(square_cloud(), small_filter())
    text = decision_to_json(decision)
    parsed = json.loads(text)
    assert parsed == decision_to_dict(decision)
    assert text.index('"s_pa"') < text.index('"s_am"') < text.index('"s_hc"') < text.index('"s"')
