"""Strictly convex bodies as gauge sublevel sets, and the geometric
primitives built on them: chords along directions, shadow classification,
support points, orthonormal frames and projections.

A body is ``{x : F(x) <= 1}`` for a gauge ``F`` assembled from strictly
convex leaves (balls, ellipsoids, superellipsoids) under an affine pose,
combined by max for intersections.  Working with analytic gauges keeps the
tangent/chord dichotomy exact, which everything downstream relies on.

All operations are pure functions of immutable inputs and are safe to call
concurrently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .errors import (ContractError, ConvergenceFailureError,
                     DegenerateFrameError, NumericError)

__all__ = [
    "GeometryConfig", "DEFAULT_GEOMETRY", "Ball", "Ellipsoid",
    "Superellipsoid", "Intersection", "ConvexBodySpec", "Frame",
    "FiberChord", "ChordResult", "ShadowClass", "Box",
    "gauge_eval", "gauge_eval_many", "boundary_scale", "chord_solve",
    "frame_orthonormalize", "project_coords", "shadow_classify",
    "radial_clamp_shadow", "support_point", "cube_to_crosspolytope",
    "body_from_json", "body_to_json", "load_body",
]


@dataclass(frozen=True)
class GeometryConfig:
    """Global classification tolerances.

    boundary_tol bounds |gauge - 1| for a point to count as on the sphere
    (the tangent band of chord classification); gap_tol bounds the chord
    length below which a fiber counts as silhouette-touching.
    """
    boundary_tol: float = 1e-8
    gap_tol: float = 1e-6


DEFAULT_GEOMETRY = GeometryConfig()


def _as_vec(x, dim=None, name="vector"):
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ContractError(f"{name} must be one-dimensional, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ContractError(f"{name} has dimension {v.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise ContractError(f"{name} has non-finite entries")
    return v


# ---------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class Ball:
    radius: float

    def validate(self, dim):
        if not (self.radius > 0):
            raise ContractError("ball radius must be positive")


@dataclass(frozen=True)
class Ellipsoid:
    semi_axes: tuple

    def validate(self, dim):
        a = np.asarray(self.semi_axes, dtype=np.float64)
        if a.shape != (dim,):
            raise ContractError("semi_axes length must match dimension")
        if not np.all(a > 0):
            raise ContractError("semi_axes must be positive")


@dataclass(frozen=True)
class Superellipsoid:
    exponent: float
    semi_axes: tuple

    def validate(self, dim):
        if not (1.0 < self.exponent < np.inf):
            raise ContractError("superellipsoid exponent must lie in (1, inf)")
        Ellipsoid(self.semi_axes).validate(dim)


@dataclass(frozen=True)
class Intersection:
    members: tuple

    def validate(self, dim):
        if len(self.members) < 1:
            raise ContractError("intersection needs at least one member")
        for m in self.members:
            if m.dim != dim:
                raise ContractError("intersection members must share the ambient dimension")


Shape = Union[Ball, Ellipsoid, Superellipsoid, Intersection]


class _KernelBody:
    """Flattened leaves: gauge(x) = max_k sum_i |(mats_k (x-trans_k))_i|^exps_k."""

    __slots__ = ("exps", "mats", "trans", "radii")

    def __init__(self, exps, mats, trans, radii):
        self.exps = np.ascontiguousarray(exps, dtype=np.float64)
        self.mats = np.ascontiguousarray(mats, dtype=np.float64)
        self.trans = np.ascontiguousarray(trans, dtype=np.float64)
        self.radii = np.asarray(radii, dtype=np.float64)  # per-leaf circumradius


def _leaf_radius(q, axes):
    # |y_i| <= a_i on the leaf; tighter power-mean bound for q >= 2
    a = np.asarray(axes, dtype=np.float64)
    d = a.shape[0]
    bound = float(np.linalg.norm(a))
    if q >= 2.0:
        bound = min(bound, float(a.max()) * d ** (0.5 - 1.0 / q))
    else:
        bound = min(bound, float(a.max()) * np.sqrt(d))
    return bound


@dataclass(frozen=True)
class ConvexBodySpec:
    """A strictly convex body with an affine pose.

    ``rotation`` and ``translation`` place the shape in ambient space:
    gauge(x) = F(R^T (x - t)).  ``interior_point`` must satisfy gauge < 1;
    when omitted it defaults to the translation, with a fallback search for
    intersections whose pose origin lies outside the overlap.
    """
    dim: int
    shape: Shape
    rotation: Optional[np.ndarray] = None
    translation: Optional[np.ndarray] = None
    interior_point: Optional[np.ndarray] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.dim < 2:
            raise ContractError("ambient dimension must be at least 2")
        R = (np.eye(self.dim) if self.rotation is None
             else np.asarray(self.rotation, dtype=np.float64))
        if R.shape != (self.dim, self.dim):
            raise ContractError("rotation must be a dim x dim matrix")
        if np.max(np.abs(R @ R.T - np.eye(self.dim))) > 1e-10:
            raise ContractError("rotation must be orthogonal")
        t = (np.zeros(self.dim) if self.translation is None
             else _as_vec(self.translation, self.dim, "translation"))
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)
        self.shape.validate(self.dim)
        ip = self.interior_point
        if ip is not None:
            ip = _as_vec(ip, self.dim, "interior_point")
            object.__setattr__(self, "interior_point", ip)
        kb = self._flatten()
        self._cache["kernel"] = kb
        object.__setattr__(self, "interior_point", self._resolve_interior(kb))
        if gauge_eval(self, self.interior_point) >= 1.0:
            raise ContractError("interior_point does not lie strictly inside the body")

    # -- flattening ---------------------------------------------------------

    def _flatten(self):
        exps, mats, trans, radii = [], [], [], []
        self._collect(np.eye(self.dim), np.zeros(self.dim), exps, mats, trans, radii)
        return _KernelBody(np.array(exps), np.array(mats), np.array(trans),
                           np.array(radii))

    def _collect(self, R_out, t_out, exps, mats, trans, radii):
        R = R_out @ self.rotation
        t = t_out + R_out @ self.translation
        s = self.shape
        if isinstance(s, Ball):
            q, axes = 2.0, np.full(self.dim, s.radius)
        elif isinstance(s, Ellipsoid):
            q, axes = 2.0, np.asarray(s.semi_axes, dtype=np.float64)
        elif isinstance(s, Superellipsoid):
            q, axes = float(s.exponent), np.asarray(s.semi_axes, dtype=np.float64)
        else:
            for m in s.members:
                m._collect(R, t, exps, mats, trans, radii)
            return
        exps.append(q)
        mats.append(np.diag(1.0 / axes) @ R.T)
        trans.append(t)
        radii.append(_leaf_radius(q, axes) if not isinstance(s, Ball) else s.radius)

    @property
    def kernel(self):
        return self._cache["kernel"]

    # -- derived data -------------------------------------------------------

    def _resolve_interior(self, kb):
        if self.interior_point is not None:
            return self.interior_point
        cands = [self.translation]
        if isinstance(self.shape, Intersection):
            mean = np.mean([m.interior_point for m in self.shape.members], axis=0)
            cands.append(self.rotation @ mean + self.translation)
        cands.sort(key=lambda p: float(kernels.gauge_many(kb.exps, kb.mats, kb.trans, p)[0]))
        p = cands[0]
        g = float(kernels.gauge_many(kb.exps, kb.mats, kb.trans, p)[0])
        if g < 1.0:
            return p
        # shrinking-step descent on the gauge; coordinate steps alone can
        # stall in the wedge of an intersection, so probe diagonals and the
        # summed leaf gradient as well
        d = self.dim
        dirs = [e for i in range(d) for e in (np.eye(d)[i], -np.eye(d)[i])]
        for i in range(d):
            for j in range(i + 1, d):
                for si in (1.0, -1.0):
                    for sj in (1.0, -1.0):
                        v = si * np.eye(d)[i] + sj * np.eye(d)[j]
                        dirs.append(v / np.sqrt(2.0))
        step = max(1.0, float(np.max(kb.radii)))
        while step > 1e-9 and g >= 1.0:
            probes = [p + step * v for v in dirs]
            grad = np.zeros(d)
            for k in range(kb.exps.shape[0]):
                z = kb.mats[k] @ (p - kb.trans[k])
                q = kb.exps[k]
                grad += kb.mats[k].T @ (q * np.sign(z) * np.abs(z) ** (q - 1.0))
            gn = np.linalg.norm(grad)
            if gn > 1e-14:
                probes.append(p - step * grad / gn)
            gp = kernels.gauge_many(kb.exps, kb.mats, kb.trans, np.array(probes))
            b = int(np.argmin(gp))
            if gp[b] < g:
                p, g = probes[b], float(gp[b])
            else:
                step *= 0.5
        if g >= 1.0:
            raise ContractError(
                "could not locate an interior point; provide interior_point explicitly")
        return p

    def circumradius_bound(self, about=None):
        """Radius of a ball around ``about`` (default: translation) that is
        guaranteed to contain the body."""
        kb = self.kernel
        c = self.translation if about is None else _as_vec(about, self.dim)
        return float(np.min(np.linalg.norm(kb.trans - c, axis=1) + kb.radii))

    # -- pose helpers -------------------------------------------------------

    def posed(self, R, c):
        """The body transformed by x -> R x + c."""
        R = np.asarray(R, dtype=np.float64)
        c = _as_vec(c, self.dim, "offset")
        return ConvexBodySpec(
            dim=self.dim, shape=self.shape,
            rotation=R @ self.rotation,
            translation=R @ self.translation + c,
            interior_point=R @ self.interior_point + c)

    def scaled(self, s):
        """The body scaled uniformly by s > 0 about the origin."""
        if not (s > 0):
            raise ContractError("scale must be positive")

        def scale_shape(shape):
            if isinstance(shape, Ball):
                return Ball(shape.radius * s)
            if isinstance(shape, Ellipsoid):
                return Ellipsoid(tuple(a * s for a in shape.semi_axes))
            if isinstance(shape, Superellipsoid):
                return Superellipsoid(shape.exponent,
                                      tuple(a * s for a in shape.semi_axes))
            return Intersection(tuple(
                replace(m, shape=scale_shape(m.shape),
                        translation=m.translation * s,
                        interior_point=m.interior_point * s,
                        _cache={})
                for m in shape.members))

        return ConvexBodySpec(
            dim=self.dim, shape=scale_shape(self.shape),
            rotation=self.rotation, translation=self.translation * s,
            interior_point=self.interior_point * s)


# ---------------------------------------------------------------------------
# frames


@dataclass(frozen=True)
class Frame:
    """An orthonormal basis; row i of ``axes`` is the i-th direction."""
    axes: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.axes, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ContractError("frame must be a square matrix of rows")
        object.__setattr__(self, "axes", A)
        if np.max(np.abs(A @ A.T - np.eye(A.shape[0]))) > 1e-12:
            raise ContractError("frame rows are not orthonormal within 1e-12")
        if abs(abs(np.linalg.det(A)) - 1.0) > 1e-10:
            raise ContractError("frame determinant magnitude differs from 1")

    @property
    def dim(self):
        return self.axes.shape[0]

    @staticmethod
    def identity(dim):
        return Frame(np.eye(dim))

    def coords(self, x):
        """Frame coordinates of ambient point(s) x."""
        return np.asarray(x, dtype=np.float64) @ self.axes.T

    def point(self, c):
        """Ambient point from frame coordinates."""
        return np.asarray(c, dtype=np.float64) @ self.axes

    def reduced_indices(self, axis):
        return [j for j in range(self.dim) if j != axis]

    def embed(self, y, axis, t=0.0):
        """Frame coordinates with value t inserted at position ``axis``."""
        y = np.atleast_2d(np.asarray(y, dtype=np.float64))
        c = np.empty((y.shape[0], self.dim))
        c[:, self.reduced_indices(axis)] = y
        c[:, axis] = t
        return c


def frame_orthonormalize(rows) -> Frame:
    """Gram-Schmidt with renormalisation; identity on already-orthonormal input."""
    A = np.asarray(rows, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractError("need a square matrix of rows")
    if np.max(np.abs(A @ A.T - np.eye(A.shape[0]))) <= 1e-12:
        return Frame(A.copy())
    Q = A.copy()
    for i in range(A.shape[0]):
        for j in range(i):
            Q[i] -= (Q[i] @ Q[j]) * Q[j]
        piv = np.linalg.norm(Q[i])
        if piv <= 1e-10:
            raise DegenerateFrameError(f"row {i} is linearly dependent on earlier rows")
        Q[i] /= piv
    # second pass tightens orthogonality to the frame tolerance
    for i in range(A.shape[0]):
        for j in range(i):
            Q[i] -= (Q[i] @ Q[j]) * Q[j]
        Q[i] /= np.linalg.norm(Q[i])
    return Frame(Q)


def project_coords(frame: Frame, x, drop) -> np.ndarray:
    """Frame coordinates of x with the axes in ``drop`` removed (0-based),
    remaining coordinates in ascending axis order."""
    if isinstance(drop, (int, np.integer)):
        drop = {int(drop)}
    drop = {int(i) for i in drop}
    if not drop <= set(range(frame.dim)):
        raise ContractError("drop indices out of range")
    if len(drop) > frame.dim - 1:
        raise ContractError("cannot drop every axis")
    keep = [j for j in range(frame.dim) if j not in drop]
    return frame.coords(_as_vec(x, frame.dim, "point"))[keep]


# ---------------------------------------------------------------------------
# chords and classification


@dataclass(frozen=True)
class FiberChord:
    base: np.ndarray
    direction: np.ndarray
    t_minus: float
    t_plus: float
    x_minus: np.ndarray
    x_plus: np.ndarray

    @property
    def gap(self):
        return self.t_plus - self.t_minus

    @property
    def midpoint(self):
        return 0.5 * (self.x_minus + self.x_plus)


@dataclass(frozen=True)
class ChordResult:
    kind: str  # "empty" | "tangent" | "chord"
    gauge_min: float
    point: Optional[np.ndarray] = None  # tangent point / line minimiser
    fiber: Optional[FiberChord] = None

    @property
    def gap(self):
        return self.fiber.gap if self.fiber is not None else 0.0


@dataclass(frozen=True)
class ShadowClass:
    kind: str  # "interior" | "boundary" | "outside"
    gap: float


@dataclass(frozen=True)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=np.float64)
        hi = np.asarray(self.hi, dtype=np.float64)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ContractError("box bounds must be matching vectors")
        if not np.all(lo < hi):
            raise ContractError("box must satisfy lo < hi on every axis")

    @property
    def dim(self):
        return self.lo.shape[0]

    @property
    def diameter(self):
        return float(np.max(self.hi - self.lo))

    @property
    def centroid(self):
        return 0.5 * (self.lo + self.hi)


def gauge_eval(body: ConvexBodySpec, x) -> float:
    """Gauge value; < 1 inside, 1 on the boundary sphere, > 1 outside."""
    x = _as_vec(x, body.dim, "point")
    kb = body.kernel
    return float(kernels.gauge_many(kb.exps, kb.mats, kb.trans, x)[0])


def gauge_eval_many(body: ConvexBodySpec, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != body.dim:
        raise ContractError("points have wrong dimension")
    kb = body.kernel
    return kernels.gauge_many(kb.exps, kb.mats, kb.trans, X)


def _bracket(body, bases):
    """Symmetric t-bracket guaranteed to contain the body along any line."""
    bases = np.atleast_2d(bases)
    rc = body.circumradius_bound()
    dist = np.linalg.norm(bases - body.translation, axis=1)
    return rc + dist + 1.0


def chord_solve(body: ConvexBodySpec, base, direction,
                cfg: GeometryConfig = DEFAULT_GEOMETRY) -> ChordResult:
    """Intersect the line base + t*direction with the body.

    Strict convexity of the gauge along the line gives the trichotomy:
    empty, a single tangent point, or a proper chord with two boundary
    points ordered by their component along ``direction``.
    """
    base = _as_vec(base, body.dim, "base")
    direction = _as_vec(direction, body.dim, "direction")
    if abs(np.linalg.norm(direction) - 1.0) > 1e-12:
        raise ContractError("direction must be a unit vector")
    kb = body.kernel
    R = _bracket(body, base)
    hint = np.array([(body.interior_point - base) @ direction])
    status, t_neg, t_pos, t_min, g_min = kernels.chord_many(
        kb.exps, kb.mats, kb.trans, base[None, :], direction[None, :],
        -R, R, cfg.boundary_tol, hint)
    return _pack_chord(body, base, direction, int(status[0]), float(t_neg[0]),
                       float(t_pos[0]), float(t_min[0]), float(g_min[0]))


def _pack_chord(body, base, direction, status, t_neg, t_pos, t_min, g_min):
    if status == kernels.BRACKET_ERROR:
        raise ContractError("chord bracket does not enclose the body (non-finite spec?)")
    if not np.isfinite(g_min):
        raise NumericError("gauge evaluated to a non-finite value along the line")
    if status == kernels.EMPTY:
        return ChordResult("empty", g_min, point=base + t_min * direction)
    if status == kernels.TANGENT:
        return ChordResult("tangent", g_min, point=base + t_min * direction)
    fiber = FiberChord(base=base, direction=direction, t_minus=t_neg,
                       t_plus=t_pos, x_minus=base + t_neg * direction,
                       x_plus=base + t_pos * direction)
    return ChordResult("chord", g_min, fiber=fiber)


def boundary_scale(body: ConvexBodySpec, z0, u) -> np.ndarray:
    """Boundary point z0 + r*u, r > 0, from an interior point z0."""
    z0 = _as_vec(z0, body.dim, "z0")
    u = _as_vec(u, body.dim, "direction")
    if gauge_eval(body, z0) >= 1.0:
        raise ContractError("z0 must lie strictly inside the body")
    kb = body.kernel
    R = _bracket(body, z0)
    r = kernels.ray_many(kb.exps, kb.mats, kb.trans, z0[None, :], u[None, :], R)
    if not np.isfinite(r[0]):
        raise NumericError("boundary ray solve failed")
    return z0 + float(r[0]) * u


def _fiber_solve(body, frame, axis, Y, cfg, hint=None):
    """Batched chord solve for the axis fibers over reduced coordinates Y."""
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    bases = frame.point(frame.embed(Y, axis, 0.0))
    dirs = np.broadcast_to(frame.axes[axis], bases.shape)
    kb = body.kernel
    R = _bracket(body, bases)
    if hint is None:
        hint = np.full(Y.shape[0], (body.interior_point @ frame.axes[axis]))
    return bases, kernels.chord_many(kb.exps, kb.mats, kb.trans, bases,
                                     np.ascontiguousarray(dirs), -R, R,
                                     cfg.boundary_tol, hint)


def classify_status(status, t_neg, t_pos, cfg):
    """Map kernel chord output to shadow classes ('interior'/'boundary'/'outside')."""
    gap = t_pos - t_neg
    if status == kernels.EMPTY:
        return ShadowClass("outside", 0.0)
    if status == kernels.TANGENT:
        return ShadowClass("boundary", 0.0)
    if gap <= cfg.gap_tol:
        return ShadowClass("boundary", float(gap))
    return ShadowClass("interior", float(gap))


def shadow_classify(body: ConvexBodySpec, frame: Frame, axis: int, y,
                    cfg: GeometryConfig = DEFAULT_GEOMETRY) -> ShadowClass:
    """Classify reduced coordinates against the shadow of the body along
    ``axis``: interior (proper chord), boundary (tangent or gap below the
    gap tolerance), or outside (empty fiber)."""
    y = _as_vec(y, body.dim - 1, "reduced coordinates")
    _, (status, t_neg, t_pos, _, _) = _fiber_solve(body, frame, axis, y, cfg)
    return classify_status(int(status[0]), float(t_neg[0]), float(t_pos[0]), cfg)


def radial_clamp_shadow(body: ConvexBodySpec, frame: Frame, axis: int, y,
                        cfg: GeometryConfig = DEFAULT_GEOMETRY) -> np.ndarray:
    """Continuous retraction of the reduced-coordinate plane onto the shadow:
    identity on the shadow, radial clamp toward the interior point outside."""
    y = _as_vec(y, body.dim - 1, "reduced coordinates")
    cls = shadow_classify(body, frame, axis, y, cfg)
    if cls.kind != "outside":
        return y.copy()
    y0 = project_coords(frame, body.interior_point, axis)
    lam, _ = _clamp_batch(body, frame, axis, y[None, :], y0, cfg)
    return y0 + float(lam[0]) * (y - y0)


def _clamp_batch(body, frame, axis, Y, y0, cfg):
    """Silhouette parameters for outside points Y along segments from y0."""
    Y = np.atleast_2d(Y)
    n = Y.shape[0]
    p0 = frame.point(frame.embed(np.broadcast_to(y0, Y.shape), axis, 0.0))
    e = frame.point(frame.embed(Y - y0, axis, 0.0))
    f = np.broadcast_to(frame.axes[axis], p0.shape)
    kb = body.kernel
    # bracket must cover the fiber at every lam in [0, 1]
    R = np.maximum(_bracket(body, p0), _bracket(body, p0 + e))
    return kernels.clamp_many(kb.exps, kb.mats, kb.trans, p0, e,
                              np.ascontiguousarray(f), -R, R, cfg.boundary_tol)


def support_point(body: ConvexBodySpec, w, objective_tol=1e-7,
                  max_iters=800) -> np.ndarray:
    """Boundary point maximising x . w (unique by strict convexity).

    Multi-start shrinking-step ascent over the sphere of ray directions from
    the interior point; antipodal coordinate starts plus w itself.
    """
    w = _as_vec(w, body.dim, "direction")
    if abs(np.linalg.norm(w) - 1.0) > 1e-10:
        raise ContractError("w must be a unit vector")
    d = body.dim
    z0 = body.interior_point
    kb = body.kernel

    starts = [w] + [e for i in range(d) for e in (np.eye(d)[i], -np.eye(d)[i])]
    U = np.array(starts)
    S = U.shape[0]

    def heights(dirs):
        R = _bracket(body, np.broadcast_to(z0, dirs.shape))
        r = kernels.ray_many(kb.exps, kb.mats, kb.trans,
                             np.broadcast_to(z0, dirs.shape).copy(), dirs, R)
        if not np.all(np.isfinite(r)):
            raise NumericError("support ray solve failed")
        return (z0 + r[:, None] * dirs) @ w, r

    fU, _ = heights(U)
    step = np.full(S, 0.4)
    it = 0
    eye = np.eye(d)
    while np.any(step > 1e-9) and it < max_iters:
        it += 1
        # 2d tangent-ish candidates per start, renormalised onto the sphere
        cand = (U[:, None, :] +
                step[:, None, None] * np.concatenate([eye, -eye])[None, :, :])
        cand = cand.reshape(S * 2 * d, d)
        norms = np.linalg.norm(cand, axis=1)
        cand = cand / norms[:, None]
        fc, _ = heights(cand)
        fc = fc.reshape(S, 2 * d)
        best = np.argmax(fc, axis=1)
        fbest = fc[np.arange(S), best]
        improved = fbest > fU
        U[improved] = cand.reshape(S, 2 * d, d)[np.arange(S), best][improved]
        fU = np.where(improved, fbest, fU)
        step = np.where(improved, np.minimum(step * 1.4, 0.4), step * 0.5)
    i = int(np.argmax(fU))
    if it >= max_iters and np.all(step > np.sqrt(objective_tol)):
        r = heights(U[i:i + 1])[1]
        raise ConvergenceFailureError("support ascent stagnated",
                                      best=z0 + r[0] * U[i], value=float(fU[i]))
    _, r = heights(U[i:i + 1])
    return z0 + float(r[0]) * U[i]


def cube_to_crosspolytope(x) -> np.ndarray:
    """Scale by max-norm over 1-norm; maps the max-norm unit sphere onto the
    1-norm unit sphere, preserving coordinate signs; 0 maps to 0."""
    x = np.asarray(x, dtype=np.float64)
    n1 = float(np.sum(np.abs(x)))
    if n1 == 0.0:
        return np.zeros_like(x)
    ninf = float(np.max(np.abs(x)))
    return (ninf / n1) * x


# ---------------------------------------------------------------------------
# JSON interchange


_SHAPE_TAGS = {"ball", "ellipsoid", "superellipsoid", "intersection"}


def _shape_from_json(obj, dim):
    tag = obj.get("type")
    if tag not in _SHAPE_TAGS:
        raise ContractError(f"unknown shape type {tag!r}")
    if tag == "ball":
        return Ball(float(obj["radius"]))
    if tag == "ellipsoid":
        return Ellipsoid(tuple(float(a) for a in obj["semi_axes"]))
    if tag == "superellipsoid":
        return Superellipsoid(float(obj["exponent"]),
                              tuple(float(a) for a in obj["semi_axes"]))
    return Intersection(tuple(_member_from_json(m, dim) for m in obj["members"]))


def _member_from_json(obj, dim):
    return ConvexBodySpec(
        dim=dim,
        shape=_shape_from_json(obj["shape"], dim),
        rotation=obj.get("rotation"),
        translation=obj.get("translation"),
        interior_point=obj.get("interior_point"))


def body_from_json(obj) -> ConvexBodySpec:
    """Build a body from its JSON object form (see README for the schema)."""
    if "dim" not in obj:
        raise ContractError("body JSON must carry 'dim'")
    return _member_from_json(obj, int(obj["dim"]))


def _shape_to_json(shape):
    if isinstance(shape, Ball):
        return {"type": "ball", "radius": shape.radius}
    if isinstance(shape, Ellipsoid):
        return {"type": "ellipsoid", "semi_axes": list(shape.semi_axes)}
    if isinstance(shape, Superellipsoid):
        return {"type": "superellipsoid", "exponent": shape.exponent,
                "semi_axes": list(shape.semi_axes)}
    return {"type": "intersection",
            "members": [_member_to_json(m) for m in shape.members]}


def _member_to_json(body):
    return {"shape": _shape_to_json(body.shape),
            "rotation": body.rotation.tolist(),
            "translation": body.translation.tolist(),
            "interior_point": body.interior_point.tolist()}


def body_to_json(body: ConvexBodySpec) -> dict:
    obj = _member_to_json(body)
    obj["dim"] = body.dim
    return obj


def load_body(path) -> ConvexBodySpec:
    with open(path, "r", encoding="utf-8") as fh:
        return body_from_json(json.load(fh))
