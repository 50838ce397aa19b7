import numpy as np
import pytest

from inrhomb import (ContractError, Frame, GeometryConfig, boundary_scale,
                     crosspolytope_condition_report, pole_check, random_frame,
                     regularity_probe, special_corner_scan)
from inrhomb.diagnostics import _axis_gaps
from conftest import (ball, ellipsoid, lens2d, lens3d_extruded,
                      lens3d_revolution, rotation_2d, superellipsoid)
from oracles import ellipsoid_support


def test_resolution_precondition():
    with pytest.raises(ContractError):
        special_corner_scan(ball(2), Frame.identity(2), 4, 1e-4)
    with pytest.raises(ContractError):
        regularity_probe(ball(2), Frame.identity(2), 4, 1e-4)
    with pytest.raises(ContractError):
        crosspolytope_condition_report(ball(2), Frame.identity(2), 4, 1e-4)


def test_lens_special_corner_detected(lens_body):
    hits = special_corner_scan(lens_body, Frame.identity(2), 64, 1e-4)
    assert len(hits) == 1
    assert np.linalg.norm(hits[0].point) <= 10 * 1e-4
    assert hits[0].max_gap <= 1e-4


def test_lens_rotated_basis_clean(lens_body):
    fr = Frame(rotation_2d(np.radians(45.0)))
    assert special_corner_scan(lens_body, fr, 64, 1e-4) == []


def test_detection_soundness(lens_body):
    # reported hits reproduce their gaps under a 10x tighter chord tolerance
    hits = special_corner_scan(lens_body, Frame.identity(2), 64, 1e-4)
    tight = GeometryConfig(boundary_tol=1e-9)
    for h in hits:
        gaps = _axis_gaps(lens_body, Frame.identity(2), h.point[None, :],
                          None, tight)[0]
        assert np.max(gaps) <= 1e-4


def test_extruded_lens_regularity_violations():
    body = lens3d_extruded()
    viols = regularity_probe(body, Frame.identity(3), 12, 1e-4)
    pairs = {v.subset for v in viols}
    assert (0, 1) in pairs
    # witnesses sit on the vertical edge circle through the origin
    for v in viols:
        if v.subset != (0, 1):
            continue
        for c in body.shape.members:
            assert abs(np.linalg.norm(v.point - c.translation) - 1.0) <= 1e-5
        assert v.witness_distance > 1e-3
        assert v.witness_gauge <= 1.0 - 1e-7


def test_revolution_lens_is_regular():
    # the double-silhouette set for axes {0,1} is exactly the two poles, so
    # the sphere-arrangement requirements hold despite the equatorial edge
    body = lens3d_revolution()
    assert regularity_probe(body, Frame.identity(3), 12, 1e-4) == []


@pytest.mark.parametrize("body", [
    ball(2), ball(3), ellipsoid((1.0, 2.0, 3.0)),
    superellipsoid(4.0, (1.0, 1.0, 1.0)),
])
def test_smooth_exclusion(body):
    for k in range(20):
        fr = random_frame(body.dim, 500 + k)
        res = 16 if body.dim == 2 else 9
        assert special_corner_scan(body, fr, res, 1e-4) == []
        assert regularity_probe(body, fr, res, 1e-4) == []


def test_pole_check_examples():
    I3 = Frame.identity(3)
    pc = pole_check(ball(3), I3, 2, 1e-5)
    assert pc.passed
    assert np.allclose(sorted([pc.x_plus[2], pc.x_minus[2]]), [-1, 1], atol=1e-6)
    assert pc.max_gap <= 1e-5

    e = ellipsoid((1.0, 2.0, 3.0))
    pc = pole_check(e, I3, 1, 1e-5)
    assert pc.passed
    assert np.allclose(np.abs(pc.x_plus), [0, 2, 0], atol=1e-5)

    fr = Frame(np.array([[np.cos(0.52), 0, np.sin(0.52)],
                         [0, 1, 0],
                         [-np.sin(0.52), 0, np.cos(0.52)]]))
    pc = pole_check(e, fr, 0, 1e-5)
    assert pc.passed
    # independent support location from the stationarity condition
    oracle = ellipsoid_support((1.0, 2.0, 3.0), fr.axes[0])
    assert np.allclose(pc.x_plus, oracle, atol=1e-6)


def test_pole_extremality():
    rng = np.random.default_rng(101)
    body = superellipsoid(4.0, (1.0, 1.5, 0.7))
    fr = random_frame(3, 103)
    samples = []
    for _ in range(1000):
        u = rng.standard_normal(3)
        u /= np.linalg.norm(u)
        samples.append(boundary_scale(body, body.interior_point, u))
    samples = np.array(samples)
    for j in range(3):
        pc = pole_check(body, fr, j, 1e-5)
        v = fr.axes[j]
        assert pc.x_plus @ v >= np.max(samples @ v) - 1e-6
        assert pc.x_minus @ v <= np.min(samples @ v) + 1e-6


def test_crosspolytope_condition_report_smooth():
    body = superellipsoid(4.0, (1.0, 1.0, 1.0))
    fr = random_frame(3, 107)
    rep = crosspolytope_condition_report(body, fr, 12, 1e-5)
    assert rep.passed
    assert rep.total_intersection_empty
    for cert in rep.certificates:
        assert len(cert.points) >= cert.required


def test_crosspolytope_condition_report_lens(lens_body):
    rep = crosspolytope_condition_report(lens_body, Frame.identity(2), 64, 1e-4)
    assert not rep.passed
    assert len(rep.special_corners) == 1
    assert not rep.total_intersection_empty


def test_report_json_records_parameters(lens_body):
    rep = crosspolytope_condition_report(lens_body, Frame.identity(2), 64,
                                         1e-4, seed=5)
    obj = rep.to_json()
    assert obj["resolution"] == 64
    assert obj["tol"] == 1e-4
    assert obj["seed"] == 5
    assert obj["passed"] == rep.passed
    assert len(obj["special_corners"]) == 1
