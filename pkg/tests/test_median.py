import numpy as np
import pytest

from inrhomb import (FiberDegenerateError, Frame, OutsideShadowError,
                     boundary_sphere_sample, envelope_points, gauge_eval,
                     median_height, median_height_extended, median_mesh,
                     median_offset, project_coords, radial_clamp_shadow)
from conftest import ball, ellipsoid, superellipsoid, rotation_matrix
from oracles import bisect, quadratic_chord


def test_envelope_points_examples():
    I2 = Frame.identity(2)
    xp, xm = envelope_points(ball(2), I2, 1, [0.0])
    assert np.allclose(xp, [0, 1], atol=1e-10)
    assert np.allclose(xm, [0, -1], atol=1e-10)

    e = ellipsoid((1.0, 2.0))
    xp, xm = envelope_points(e, I2, 1, [0.5])
    lo, hi = quadratic_chord((1.0, 2.0), [0.5, 0.0], [0.0, 1.0])
    assert np.allclose(xp, [0.5, hi], atol=1e-9)
    assert np.allclose(xm, [0.5, lo], atol=1e-9)

    with pytest.raises(FiberDegenerateError):
        envelope_points(ball(2), I2, 1, [1.0])


def test_median_height_examples():
    I3 = Frame.identity(3)
    assert median_height(ball(3), I3, 2, [0.3, 0.0]) == pytest.approx(0.0, abs=1e-10)

    e = ellipsoid((1.0, 2.0), translation=[0.0, 5.0])
    I2 = Frame.identity(2)
    assert median_height(e, I2, 1, [0.3]) == pytest.approx(5.0, abs=1e-9)

    se = superellipsoid(4.0, (1.0, 1.0))
    assert median_height(se, I2, 1, [0.5]) == pytest.approx(0.0, abs=1e-9)
    # independent root check: |0.5|^4 + t^4 = 1 has symmetric roots
    t_star = bisect(lambda t: 0.5 ** 4 + t ** 4 - 1.0, 0.0, 2.0)
    xp, xm = envelope_points(se, I2, 1, [0.5])
    assert xp[1] == pytest.approx(t_star, abs=1e-9)
    assert xm[1] == pytest.approx(-t_star, abs=1e-9)

    with pytest.raises(OutsideShadowError):
        median_height(ball(2), I2, 1, [1.5])


def test_median_height_extended():
    I2 = Frame.identity(2)
    assert median_height_extended(ball(2), I2, 1, [3.0]) == pytest.approx(0.0, abs=1e-9)
    e = ellipsoid((1.0, 2.0), translation=[0.0, 5.0])
    assert median_height_extended(e, I2, 1, [7.0]) == pytest.approx(5.0, abs=1e-8)
    # identity on the shadow
    assert median_height_extended(e, I2, 1, [0.4]) == pytest.approx(
        median_height(e, I2, 1, [0.4]), abs=1e-12)


def test_median_offset_examples():
    I3 = Frame.identity(3)
    assert median_offset(ball(3), I3, 2, [0.0, 0.0, 0.7]) == pytest.approx(0.7, abs=1e-10)
    assert median_offset(ball(3), I3, 2, [0.0, 0.0, 0.0]) == pytest.approx(0.0, abs=1e-10)
    e = ellipsoid((1.0, 2.0), translation=[0.0, 5.0])
    I2 = Frame.identity(2)
    assert median_offset(e, I2, 1, [0.3, 4.0]) == pytest.approx(-1.0, abs=1e-8)


@pytest.mark.parametrize("body", [
    ellipsoid((1.0, 2.0, 3.0)), superellipsoid(4.0, (1.0, 0.8)),
])
def test_median_interiority(body):
    rng = np.random.default_rng(23)
    d = body.dim
    frame = Frame(rotation_matrix(d, 31))
    axis = 0
    y0 = project_coords(frame, body.interior_point, axis)
    n = 0
    while n < 1000:
        y = y0 + rng.uniform(-3, 3, d - 1)
        try:
            h = median_height(body, frame, axis, y)
        except OutsideShadowError:
            continue
        n += 1
        pt = frame.point(frame.embed(y[None, :], axis, h))[0]
        assert gauge_eval(body, pt) < 1.0 - 1e-10


@pytest.mark.parametrize("body,axis", [
    (ball(2), 1), (ball(3), 2), (ellipsoid((1.0, 2.0, 3.0)), 2),
])
def test_median_boundary_coincidence(body, axis):
    frame = Frame.identity(body.dim)
    pts = boundary_sphere_sample(body, frame, axis, resolution=4)
    for x in pts:
        assert abs(gauge_eval(body, x) - 1.0) <= 1e-6
        y = project_coords(frame, x, axis)
        yc = radial_clamp_shadow(body, frame, axis, y)
        h = median_height(body, frame, axis, yc)
        assert abs(h - x @ frame.axes[axis]) <= 1e-5


def test_boundary_sphere_sample_examples():
    I2 = Frame.identity(2)
    pts = boundary_sphere_sample(ball(2), I2, 1, resolution=1)
    got = sorted(round(p[0], 6) for p in pts)
    assert got == [-1.0, 1.0]
    assert all(abs(p[1]) <= 1e-6 for p in pts)

    I3 = Frame.identity(3)
    pts = boundary_sphere_sample(ball(3), I3, 2, resolution=3)
    assert len(pts) == 12
    assert all(abs(p[2]) <= 1e-6 for p in pts)

    e = ellipsoid((1.0, 2.0, 3.0))
    pts = boundary_sphere_sample(e, I3, 2, resolution=3)
    for p in pts:
        assert abs(p[0] ** 2 + (p[1] / 2) ** 2 - 1.0) <= 1e-5
        assert abs(p[2]) <= 1e-5


def test_median_translation_equivariance():
    rng = np.random.default_rng(29)
    base = superellipsoid(4.0, (1.0, 1.5, 0.7))
    I3 = Frame.identity(3)
    c = np.array([0.4, -1.2, 2.0])
    moved = superellipsoid(4.0, (1.0, 1.5, 0.7), translation=c)
    for _ in range(25):
        y = rng.uniform(-0.5, 0.5, 2)
        h0 = median_height(base, I3, 2, y)
        h1 = median_height(moved, I3, 2, y + c[:2])
        assert h1 == pytest.approx(h0 + c[2], abs=1e-9)


def test_median_rotation_equivariance():
    rng = np.random.default_rng(37)
    base = superellipsoid(4.0, (1.0, 1.5, 0.7))
    f0 = Frame(rotation_matrix(3, 41))
    R = rotation_matrix(3, 43)
    rotated = base.posed(R, np.zeros(3))
    f1 = Frame(f0.axes @ R.T)
    for _ in range(25):
        y = rng.uniform(-0.5, 0.5, 2)
        h0 = median_height(base, f0, 1, y)
        h1 = median_height(rotated, f1, 1, y)
        assert h1 == pytest.approx(h0, abs=1e-8)


def test_offset_signs_at_envelope():
    rng = np.random.default_rng(47)
    body = ellipsoid((1.0, 2.0, 3.0))
    frame = Frame(rotation_matrix(3, 53))
    y0 = project_coords(frame, body.interior_point, 1)
    n = 0
    while n < 100:
        y = y0 + rng.uniform(-1.5, 1.5, 2)
        try:
            xp, xm = envelope_points(body, frame, 1, y)
        except FiberDegenerateError:
            continue
        n += 1
        assert median_offset(body, frame, 1, xp) > 0
        assert median_offset(body, frame, 1, xm) < 0


def test_extended_height_continuity_across_silhouette():
    # finite-difference variation across a boundary crossing stays small;
    # the axis-1 silhouette of both bodies sits at first coordinate +-1
    I2 = Frame.identity(2)
    for body in [ball(2), ellipsoid((1.0, 2.0))]:
        for y_star in (1.0, -1.0):
            h = [median_height_extended(body, I2, 1, [y_star + s])
                 for s in (-1e-5, 1e-5)]
            assert abs(h[1] - h[0]) <= 1e-2


def test_median_mesh_examples():
    I2 = Frame.identity(2)
    mesh = median_mesh(ball(2), I2, 1, 3)
    assert [round(float(s.y[0]), 9) for s in mesh.samples] == [-1.0, 0.0, 1.0]
    for s in mesh.samples:
        assert s.point is not None
        assert s.point[1] == pytest.approx(0.0, abs=1e-8)

    I3 = Frame.identity(3)
    mesh = median_mesh(ball(3), I3, 2, 2)
    assert len(mesh.samples) == 4
    assert all(s.point is None and s.classification.kind == "outside"
               for s in mesh.samples)

    mesh = median_mesh(ellipsoid((1.0, 2.0)), I2, 0, 3)
    assert [round(float(s.y[0]), 9) for s in mesh.samples] == [-2.0, 0.0, 2.0]
    for s in mesh.samples:
        assert s.point[0] == pytest.approx(0.0, abs=1e-8)


def test_median_mesh_invariants():
    body = superellipsoid(3.0, (1.0, 1.4, 0.9))
    frame = Frame(rotation_matrix(3, 59))
    mesh = median_mesh(body, frame, 1, 9)
    seen = {"interior": 0, "boundary": 0, "outside": 0}
    for s in mesh.samples:
        seen[s.classification.kind] += 1
        if s.classification.kind == "interior":
            assert gauge_eval(body, s.point) < 1.0
        elif s.classification.kind == "boundary":
            assert abs(gauge_eval(body, s.point) - 1.0) <= 1e-6
        else:
            assert s.point is None
    assert seen["interior"] > 0 and seen["outside"] > 0
