"""Median surfaces: chord-midpoint heights over shadow coordinates.

For a body, frame and axis, the fiber over reduced coordinates y is the line
along the axis direction through the point with reduced frame coordinates y.
Over the interior of the shadow the fiber is a proper chord and the median
height is the midpoint height; on the shadow boundary it degenerates to the
tangent height.  The extended height composes with the radial clamp so it is
defined and continuous on the whole reduced plane (constant along rays
outside the shadow), which is what the sign fields fed to the root finder
need.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from . import kernels
from .bodies import (DEFAULT_GEOMETRY, ConvexBodySpec, Frame, GeometryConfig,
                     ShadowClass, _as_vec, _clamp_batch, _fiber_solve,
                     classify_status, project_coords)
from .errors import ContractError, FiberDegenerateError, OutsideShadowError

__all__ = [
    "MedianEvaluator", "MedianSample", "MedianSampleSet", "envelope_points",
    "median_height", "median_height_extended", "median_offset",
    "median_heights_extended_batch", "median_offsets_batch", "median_mesh",
    "boundary_sphere_sample",
]


def _check_reduced(body, y):
    return _as_vec(y, body.dim - 1, "reduced coordinates")


def envelope_points(body: ConvexBodySpec, frame: Frame, axis: int, y,
                    cfg: GeometryConfig = DEFAULT_GEOMETRY):
    """Fiber endpoints (x_plus, x_minus) over interior reduced coordinates,
    ordered by their component along the axis direction."""
    y = _check_reduced(body, y)
    bases, (status, tn, tp, tm, _) = _fiber_solve(body, frame, axis, y, cfg)
    cls = classify_status(int(status[0]), float(tn[0]), float(tp[0]), cfg)
    if cls.kind != "interior":
        raise FiberDegenerateError(
            f"fiber over {y} is {cls.kind}, not a proper chord")
    v = frame.axes[axis]
    return bases[0] + float(tp[0]) * v, bases[0] + float(tn[0]) * v


def median_height(body: ConvexBodySpec, frame: Frame, axis: int, y,
                  cfg: GeometryConfig = DEFAULT_GEOMETRY) -> float:
    """Axis-direction coordinate of the chord midpoint (tangent point on the
    shadow boundary); raises OutsideShadowError beyond the shadow."""
    y = _check_reduced(body, y)
    _, (status, tn, tp, tm, _) = _fiber_solve(body, frame, axis, y, cfg)
    st = int(status[0])
    if st == kernels.EMPTY:
        raise OutsideShadowError(f"reduced coordinates {y} lie outside the shadow")
    if st == kernels.BRACKET_ERROR:
        raise ContractError("fiber bracket failed")
    if st == kernels.CHORD:
        return 0.5 * (float(tn[0]) + float(tp[0]))
    return float(tm[0])


def median_heights_extended_batch(body: ConvexBodySpec, frame: Frame,
                                  axis: int, Y,
                                  cfg: GeometryConfig = DEFAULT_GEOMETRY,
                                  hint=None) -> np.ndarray:
    """Extended median heights for a batch of reduced coordinates (rows of Y)."""
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    _, (status, tn, tp, tm, _) = _fiber_solve(body, frame, axis, Y, cfg, hint)
    if np.any(status == kernels.BRACKET_ERROR):
        raise ContractError("fiber bracket failed")
    h = np.where(status == kernels.CHORD, 0.5 * (tn + tp), tm)
    outside = status == kernels.EMPTY
    if np.any(outside):
        y0 = project_coords(frame, body.interior_point, axis)
        _, t_at = _clamp_batch(body, frame, axis, Y[outside], y0, cfg)
        h[outside] = t_at
    return h


def median_height_extended(body: ConvexBodySpec, frame: Frame, axis: int, y,
                           cfg: GeometryConfig = DEFAULT_GEOMETRY) -> float:
    """median_height on the shadow, extended continuously (constant along
    clamp rays) to the whole reduced plane."""
    y = _check_reduced(body, y)
    return float(median_heights_extended_batch(body, frame, axis, y[None, :], cfg)[0])


def median_offset(body: ConvexBodySpec, frame: Frame, axis: int, x,
                  cfg: GeometryConfig = DEFAULT_GEOMETRY) -> float:
    """Signed offset of x from the median graph along the axis direction:
    zero exactly on the (extended) median, positive on the upper side."""
    x = _as_vec(x, body.dim, "point")
    return float(median_offsets_batch(body, frame, axis, x[None, :], cfg)[0])


def median_offsets_batch(body: ConvexBodySpec, frame: Frame, axis: int, X,
                         cfg: GeometryConfig = DEFAULT_GEOMETRY) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    C = frame.coords(X)
    keep = frame.reduced_indices(axis)
    h = median_heights_extended_batch(body, frame, axis, C[:, keep], cfg,
                                      hint=C[:, axis])
    return C[:, axis] - h


@dataclass(frozen=True)
class MedianEvaluator:
    """Median of one axis as a height function over reduced coordinates."""
    body: ConvexBodySpec
    frame: Frame
    axis: int

    def __post_init__(self):
        if not (0 <= self.axis < self.frame.dim):
            raise ContractError("axis out of range")
        if self.frame.dim != self.body.dim:
            raise ContractError("frame and body dimensions differ")

    def height(self, y, cfg=DEFAULT_GEOMETRY):
        return median_height(self.body, self.frame, self.axis, y, cfg)

    def height_extended(self, y, cfg=DEFAULT_GEOMETRY):
        return median_height_extended(self.body, self.frame, self.axis, y, cfg)

    def offset(self, x, cfg=DEFAULT_GEOMETRY):
        return median_offset(self.body, self.frame, self.axis, x, cfg)

    def envelope(self, y, cfg=DEFAULT_GEOMETRY):
        return envelope_points(self.body, self.frame, self.axis, y, cfg)


@dataclass(frozen=True)
class MedianSample:
    y: np.ndarray
    point: Optional[np.ndarray]  # None outside the shadow
    classification: ShadowClass


@dataclass(frozen=True)
class MedianSampleSet:
    axis: int
    resolution: int
    samples: Tuple[MedianSample, ...]


def median_mesh(body: ConvexBodySpec, frame: Frame, axis: int,
                resolution: int,
                cfg: GeometryConfig = DEFAULT_GEOMETRY) -> MedianSampleSet:
    """Regular grid of median samples over the bounding rectangle of the
    shadow (centred at the body translation, half-width the circumradius)."""
    if resolution < 2:
        raise ContractError("resolution must be at least 2")
    n = body.dim - 1
    yc = project_coords(frame, body.translation, axis)
    rc = body.circumradius_bound()
    axes_1d = [np.linspace(yc[j] - rc, yc[j] + rc, resolution) for j in range(n)]
    grid = np.stack(np.meshgrid(*axes_1d, indexing="ij"), axis=-1).reshape(-1, n)
    _, (status, tn, tp, tm, _) = _fiber_solve(body, frame, axis, grid, cfg)
    v = frame.axes[axis]
    bases = frame.point(frame.embed(grid, axis, 0.0))
    samples = []
    for i in range(grid.shape[0]):
        cls = classify_status(int(status[i]), float(tn[i]), float(tp[i]), cfg)
        if cls.kind == "outside":
            pt = None
        elif int(status[i]) == kernels.CHORD:
            pt = bases[i] + 0.5 * (float(tn[i]) + float(tp[i])) * v
        else:
            pt = bases[i] + float(tm[i]) * v
        samples.append(MedianSample(grid[i], pt, cls))
    return MedianSampleSet(axis=axis, resolution=resolution,
                           samples=tuple(samples))


def _reduced_directions(n, count, seed):
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        ang = 2.0 * np.pi * np.arange(count) / count
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((count, n))
    norms = np.linalg.norm(U, axis=1)
    while np.any(norms < 1e-12):
        U[norms < 1e-12] = rng.standard_normal((int(np.sum(norms < 1e-12)), n))
        norms = np.linalg.norm(U, axis=1)
    return U / norms[:, None]


def boundary_sphere_sample(body: ConvexBodySpec, frame: Frame, axis: int,
                           resolution: int,
                           cfg: GeometryConfig = DEFAULT_GEOMETRY,
                           seed: int = 0) -> List[np.ndarray]:
    """Sample the silhouette: boundary-sphere points whose fiber along the
    axis is tangent.  Directions on the reduced unit sphere (regular grid in
    one and two reduced dimensions, seeded uniform above), silhouette located
    radially from the interior point."""
    if resolution < 1:
        raise ContractError("resolution must be at least 1")
    n = body.dim - 1
    count = resolution * 2 * n
    dirs = _reduced_directions(n, count, seed)
    y0 = project_coords(frame, body.interior_point, axis)
    yt = project_coords(frame, body.translation, axis)
    rc = body.circumradius_bound()
    L = rc + np.linalg.norm(y0 - yt) + 1.0
    Y_far = y0[None, :] + L * dirs
    lam, t_at = _clamp_batch(body, frame, axis, Y_far, y0, cfg)
    ys = y0[None, :] + lam[:, None] * (Y_far - y0[None, :])
    pts = frame.point(frame.embed(ys, axis, 0.0)) + t_at[:, None] * frame.axes[axis]
    return [pts[i] for i in range(pts.shape[0])]
