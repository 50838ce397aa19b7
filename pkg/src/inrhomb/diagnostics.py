"""Numerical probes of the inscribing hypotheses.

Everything here is sampled falsification or confirmation, never proof: the
conditions probed (special corners, regularity with respect to the basis,
the sphere-arrangement conclusions) are topological, so reports carry the
resolutions, seeds and tolerances they were computed at.

A special corner is a boundary point whose fiber along every basis
direction meets the body only at that point, i.e. all chord gaps vanish.
Regularity asks that whenever the fibers along each axis in a subset I are
tangent at a point, the joint |I|-dimensional fiber meets the body only
there as well (the probe reads the boundary-of-projection conditions
through the equivalent single-preimage formulation).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Tuple

import numpy as np

from . import kernels
from .bodies import (DEFAULT_GEOMETRY, ConvexBodySpec, Frame, GeometryConfig,
                     gauge_eval_many, support_point)
from .errors import ContractError

__all__ = [
    "SpecialCornerHit", "RegularityViolation", "PoleCheckResult",
    "SubsetCertificate", "DiagnosticsReport", "special_corner_scan",
    "regularity_probe", "pole_check", "crosspolytope_condition_report",
]


@dataclass(frozen=True)
class SpecialCornerHit:
    point: np.ndarray
    gaps: np.ndarray

    @property
    def max_gap(self):
        return float(np.max(self.gaps))


@dataclass(frozen=True)
class RegularityViolation:
    point: np.ndarray
    subset: Tuple[int, ...]
    witness: np.ndarray
    witness_gauge: float
    witness_distance: float


@dataclass(frozen=True)
class PoleCheckResult:
    axis: int
    x_plus: np.ndarray
    x_minus: np.ndarray
    max_gap: float
    separated: bool
    tol: float

    @property
    def passed(self):
        return self.separated and self.max_gap <= self.tol


@dataclass(frozen=True)
class SubsetCertificate:
    subset: Tuple[int, ...]
    required: int
    points: Tuple[np.ndarray, ...]

    @property
    def passed(self):
        return len(self.points) >= self.required


@dataclass(frozen=True)
class DiagnosticsReport:
    special_corners: Tuple[SpecialCornerHit, ...]
    regularity_violations: Tuple[RegularityViolation, ...]
    pole_checks: Tuple[PoleCheckResult, ...]
    certificates: Tuple[SubsetCertificate, ...]
    total_intersection_empty: bool
    min_max_gap: float
    resolution: int
    tol: float
    seed: int

    @property
    def passed(self):
        return (not self.special_corners and not self.regularity_violations
                and all(p.passed for p in self.pole_checks)
                and all(c.passed for c in self.certificates))

    def to_json(self):
        return {
            "passed": self.passed,
            "special_corners": [{"point": h.point.tolist(),
                                 "gaps": h.gaps.tolist()}
                                for h in self.special_corners],
            "regularity_violations": [
                {"point": v.point.tolist(), "subset": list(v.subset),
                 "witness": v.witness.tolist(),
                 "witness_gauge": v.witness_gauge,
                 "witness_distance": v.witness_distance}
                for v in self.regularity_violations],
            "pole_checks": [{"axis": p.axis, "passed": p.passed,
                             "max_gap": p.max_gap,
                             "x_plus": p.x_plus.tolist(),
                             "x_minus": p.x_minus.tolist()}
                            for p in self.pole_checks],
            "certificates": [{"subset": list(c.subset),
                              "required": c.required,
                              "found": len(c.points),
                              "passed": c.passed}
                             for c in self.certificates],
            "total_intersection_empty": self.total_intersection_empty,
            "min_max_gap": self.min_max_gap,
            "resolution": self.resolution,
            "tol": self.tol,
            "seed": self.seed,
        }


# ---------------------------------------------------------------------------
# shared machinery


def _axis_gaps(body, frame, X, axes=None, cfg=DEFAULT_GEOMETRY):
    """Chord gaps (M, len(axes)) through points X along the frame axes."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    axes = range(frame.dim) if axes is None else axes
    kb = body.kernel
    rc = body.circumradius_bound()
    R = rc + np.linalg.norm(X - body.translation, axis=1) + 1.0
    cols = []
    for i in axes:
        dirs = np.broadcast_to(frame.axes[i], X.shape)
        status, tn, tp, _, _ = kernels.chord_many(
            kb.exps, kb.mats, kb.trans, X, np.ascontiguousarray(dirs),
            -R, R, cfg.boundary_tol, np.zeros(X.shape[0]))
        gap = np.where(status == kernels.CHORD, tp - tn, 0.0)
        cols.append(gap)
    return np.stack(cols, axis=1)


def _surface_directions(d, count, seed):
    if d == 2:
        ang = 2.0 * np.pi * np.arange(count) / count
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((count, d))
    norms = np.linalg.norm(U, axis=1)
    while np.any(norms < 1e-12):
        U[norms < 1e-12] = rng.standard_normal((int(np.sum(norms < 1e-12)), d))
        norms = np.linalg.norm(U, axis=1)
    return U / norms[:, None]


def _surface_points(body, dirs):
    kb = body.kernel
    z0 = body.interior_point
    Z = np.broadcast_to(z0, dirs.shape).copy()
    R = body.circumradius_bound() + np.linalg.norm(z0 - body.translation) + 1.0
    r = kernels.ray_many(kb.exps, kb.mats, kb.trans, Z, dirs,
                         np.full(dirs.shape[0], R))
    return z0 + r[:, None] * dirs


def _local_min_seeds(dirs, values, k=6, cap=24):
    """Directions whose value is minimal among their angular neighbours."""
    M = dirs.shape[0]
    if M <= k + 1:
        order = np.argsort(values)
        return order[:cap]
    dots = dirs @ dirs.T
    np.fill_diagonal(dots, -np.inf)
    seeds = []
    for i in range(M):
        nbr = np.argpartition(-dots[i], k)[:k]
        if values[i] <= np.min(values[nbr]):
            seeds.append(i)
    seeds.sort(key=lambda i: values[i])
    return np.array(seeds[:cap], dtype=int)


def _probe_directions(d):
    # coordinate and pairwise-diagonal steps; gaps have diagonal valleys
    # that axis-only probes stall in
    dirs = [e for i in range(d) for e in (np.eye(d)[i], -np.eye(d)[i])]
    for i in range(d):
        for j in range(i + 1, d):
            for si in (1.0, -1.0):
                for sj in (1.0, -1.0):
                    dirs.append((si * np.eye(d)[i] + sj * np.eye(d)[j])
                                / np.sqrt(2.0))
    return np.array(dirs)


def _descend_dirs(body, U0, value_fn, step0=0.3, step_min=1e-7,
                  max_iters=220):
    """Shrinking-step descent of value_fn(surface point) over ray directions.

    value_fn maps a batch of surface points to values; gaps are non-smooth
    at the minimisers of interest, hence the derivative-free scheme.
    """
    U = np.array(U0, dtype=np.float64, copy=True)
    S, d = U.shape
    vals = value_fn(_surface_points(body, U))
    step = np.full(S, step0)
    probes = _probe_directions(d)
    P = probes.shape[0]
    it = 0
    while np.any(step > step_min) and it < max_iters:
        it += 1
        cand = U[:, None, :] + step[:, None, None] * probes[None, :, :]
        cand = cand.reshape(S * P, d)
        cand /= np.linalg.norm(cand, axis=1)[:, None]
        cvals = value_fn(_surface_points(body, cand)).reshape(S, P)
        best = np.argmin(cvals, axis=1)
        vbest = cvals[np.arange(S), best]
        improved = vbest < vals
        U[improved] = cand.reshape(S, P, d)[np.arange(S), best][improved]
        vals = np.where(improved, vbest, vals)
        step = np.where(improved, np.minimum(step * 1.4, step0), step * 0.5)
    return U


def _descend_on_sphere(body, U0, value_fn, **kw):
    U = _descend_dirs(body, U0, value_fn, **kw)
    pts = _surface_points(body, U)
    return pts, value_fn(pts)


def _dedupe(points, radius):
    kept = []
    for p in points:
        if all(np.linalg.norm(p - q) > radius for q in kept):
            kept.append(p)
    return kept


def _tangent_basis(u):
    d = u.shape[0]
    M = np.eye(d) - np.outer(u, u)
    q, _ = np.linalg.qr(M)
    cols = [q[:, j] for j in range(d) if abs(q[:, j] @ u) < 0.5]
    return np.array(cols[:d - 1])


def _march_zero_set(body, U, value_fn, tol, ring=0.08, n_theta=36,
                    cap=48, max_nodes=40):
    """Cover the zero set of value_fn by marching: around each known zero
    direction, probe a small angular ring, locally polish the lowest probes
    and keep those reaching value <= tol near the ring.  Isolated zeros
    gain nothing; positive-dimensional sets get walked."""
    d = U.shape[1]
    known = [u for u in U]
    frontier = list(U)
    nodes = 0
    while frontier and len(known) < cap and nodes < max_nodes:
        nodes += 1
        u = frontier.pop(0)
        T = _tangent_basis(u)
        if T.shape[0] == 0:
            continue
        theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
        if d == 2:
            ringpts = np.stack([np.cos(ring) * u + s * np.sin(ring) * T[0]
                                for s in (1.0, -1.0)])
        else:
            mix = (np.cos(theta)[:, None] * T[0] +
                   np.sin(theta)[:, None] * (T[1] if T.shape[0] > 1 else T[0]))
            ringpts = np.cos(ring) * u[None, :] + np.sin(ring) * mix
        ringpts /= np.linalg.norm(ringpts, axis=1)[:, None]
        vals = value_fn(_surface_points(body, ringpts))
        order = np.argsort(vals)[:max(4, d + 1)]
        probe = _descend_dirs(body, ringpts[order], value_fn,
                              step0=ring / 4.0, step_min=1e-7, max_iters=50)
        pvals = value_fn(_surface_points(body, probe))
        for j in range(probe.shape[0]):
            w = probe[j]
            if pvals[j] > tol:
                continue
            if np.linalg.norm(w - ringpts[order[j]]) > 1.5 * ring:
                continue  # polish slid away; not a local continuation
            if all(np.linalg.norm(w - v) > 0.5 * ring for v in known):
                known.append(w)
                frontier.append(w)
            if len(known) >= cap:
                break
    return np.array(known)


# ---------------------------------------------------------------------------
# probes


def special_corner_scan(body: ConvexBodySpec, frame: Frame, resolution: int,
                        tol: float, cfg: GeometryConfig = DEFAULT_GEOMETRY,
                        seed: int = 0) -> List[SpecialCornerHit]:
    """Boundary points whose chord gap vanishes along every frame axis.

    Surface samples seed a shrinking-step descent on the max-gap; refined
    points below ``tol`` are deduplicated within 10*tol.
    """
    hits, _ = _corner_scan_impl(body, frame, resolution, tol, cfg, seed)
    return hits


def _corner_scan_impl(body, frame, resolution, tol, cfg, seed):
    if resolution < 8:
        raise ContractError("resolution must be at least 8")
    d = body.dim
    count = resolution ** (d - 1)
    dirs = _surface_directions(d, count, seed)
    pts = _surface_points(body, dirs)

    def value_fn(P):
        return np.max(_axis_gaps(body, frame, P, None, cfg), axis=1)

    vals = value_fn(pts)
    seeds = _local_min_seeds(dirs, vals)
    if len(seeds) == 0:
        return [], float(np.min(vals))
    refined, rvals = _descend_on_sphere(body, dirs[seeds], value_fn)
    stat = float(min(np.min(vals), np.min(rvals)))
    cand = [refined[i] for i in range(refined.shape[0]) if rvals[i] <= tol]
    hits = []
    for p in _dedupe(cand, 10.0 * tol):
        gaps = _axis_gaps(body, frame, p[None, :], None, cfg)[0]
        hits.append(SpecialCornerHit(point=p, gaps=gaps))
    return hits, stat


def _span_witness(body, frame, point, subset, tol, resolution, seed, cfg):
    """Search the |I|-plane fiber through ``point`` for a second body point."""
    k = len(subset)
    rc = body.circumradius_bound()
    n_grid = max(2 * resolution + 1, 17)
    rng = np.random.default_rng((seed, 17))
    axes_1d = [np.linspace(-rc - 0.5, rc + 0.5, n_grid) for _ in range(k)]
    S = np.stack(np.meshgrid(*axes_1d, indexing="ij"), axis=-1).reshape(-1, k)
    S = S + (rng.random(S.shape) - 0.5) * (axes_1d[0][1] - axes_1d[0][0]) * 0.25
    V = frame.axes[list(subset)]
    P = point[None, :] + S @ V
    g = gauge_eval_many(body, P)
    dist = np.linalg.norm(S, axis=1)
    ok = (g <= 1.0 - 10.0 * cfg.boundary_tol) & (dist > 10.0 * tol)
    if not np.any(ok):
        return None
    j = int(np.argmin(np.where(ok, g, np.inf)))
    return P[j], float(g[j]), float(dist[j])


def regularity_probe(body: ConvexBodySpec, frame: Frame, resolution: int,
                     tol: float, cfg: GeometryConfig = DEFAULT_GEOMETRY,
                     seed: int = 0) -> List[RegularityViolation]:
    """For every axis subset I (2 <= |I| <= dim-1), find boundary points with
    all axis-I gaps below ``tol`` and test whether the I-plane fiber through
    them meets the body at a second point (distance > 10*tol): any such
    second point witnesses a regularity violation."""
    if resolution < 8:
        raise ContractError("resolution must be at least 8")
    d = body.dim
    count = resolution ** (d - 1)
    dirs = _surface_directions(d, count, seed)
    pts = _surface_points(body, dirs)
    violations = []
    for size in range(2, d):
        for subset in combinations(range(d), size):
            def value_fn(P, subset=subset):
                return np.max(_axis_gaps(body, frame, P, subset, cfg), axis=1)

            cand = _zero_set_points(body, dirs, pts, value_fn, tol)
            for p in _dedupe(cand, 10.0 * tol):
                w = _span_witness(body, frame, p, subset, tol, resolution,
                                  seed, cfg)
                if w is not None:
                    violations.append(RegularityViolation(
                        point=p, subset=subset, witness=w[0],
                        witness_gauge=w[1], witness_distance=w[2]))
    return violations


def _zero_set_points(body, dirs, pts, value_fn, tol):
    """Surface points with value <= tol: local-minimum seeds, descent, and
    spreading along any zero continuum."""
    vals = value_fn(pts)
    seeds_idx = _local_min_seeds(dirs, vals)
    if len(seeds_idx) == 0:
        return []
    U = _descend_dirs(body, dirs[seeds_idx], value_fn)
    refined = _surface_points(body, U)
    rvals = value_fn(refined)
    zero = U[rvals <= tol]
    if zero.shape[0] == 0:
        return []
    spread = _march_zero_set(body, zero, value_fn, tol)
    P = _surface_points(body, spread)
    v = value_fn(P)
    return [P[i] for i in range(P.shape[0]) if v[i] <= tol]


def pole_check(body: ConvexBodySpec, frame: Frame, axis: int, tol: float,
               cfg: GeometryConfig = DEFAULT_GEOMETRY) -> PoleCheckResult:
    """The two support points along the axis direction must have vanishing
    chord gaps along every other axis and be separated along the axis."""
    if not (0 <= axis < frame.dim):
        raise ContractError("axis out of range")
    v = frame.axes[axis]
    x_plus = support_point(body, v)
    x_minus = support_point(body, -v)
    others = [i for i in range(frame.dim) if i != axis]
    gaps = _axis_gaps(body, frame, np.stack([x_plus, x_minus]), others, cfg)
    return PoleCheckResult(axis=axis, x_plus=x_plus, x_minus=x_minus,
                           max_gap=float(np.max(gaps)),
                           separated=bool(x_plus @ v > x_minus @ v),
                           tol=tol)


def _subset_certificate(body, frame, subset, required, resolution, tol, cfg,
                        seed, dirs, pts):
    def value_fn(P, subset=subset):
        return np.max(_axis_gaps(body, frame, P, subset, cfg), axis=1)

    vals = value_fn(pts)
    order = np.argsort(vals)[:max(4 * required, 16)]
    U = _descend_dirs(body, dirs[order], value_fn)
    refined = _surface_points(body, U)
    rvals = value_fn(refined)
    zero = U[rvals <= tol]
    if zero.shape[0]:
        spread = _march_zero_set(body, zero, value_fn, tol)
        P = _surface_points(body, spread)
        v = value_fn(P)
        good = [P[i] for i in range(P.shape[0]) if v[i] <= tol]
    else:
        good = []
    distinct = _dedupe(good, 10.0 * tol)
    return SubsetCertificate(subset=tuple(subset), required=required,
                             points=tuple(distinct))


def crosspolytope_condition_report(body: ConvexBodySpec, frame: Frame,
                                   resolution: int, tol: float,
                                   cfg: GeometryConfig = DEFAULT_GEOMETRY,
                                   seed: int = 0) -> DiagnosticsReport:
    """Aggregate hypothesis report: special-corner scan (whose emptiness is
    the sampled proxy for the empty total intersection), per-axis pole
    checks, regularity probe, and sampled non-emptiness certificates for the
    silhouette-sphere intersections of every proper axis subset.  Counting
    and separation only; homeomorphism types are not certified."""
    if resolution < 8:
        raise ContractError("resolution must be at least 8")
    d = body.dim
    corners, stat = _corner_scan_impl(body, frame, resolution, tol, cfg, seed)
    violations = regularity_probe(body, frame, resolution, tol, cfg, seed)
    poles = [pole_check(body, frame, j, tol, cfg) for j in range(d)]
    count = resolution ** (d - 1)
    dirs = _surface_directions(d, count, seed)
    pts = _surface_points(body, dirs)
    certs = []
    for size in range(1, d):
        for subset in combinations(range(d), size):
            required = 2 * (d - size)
            certs.append(_subset_certificate(body, frame, subset, required,
                                             resolution, tol, cfg, seed,
                                             dirs, pts))
    return DiagnosticsReport(
        special_corners=tuple(corners),
        regularity_violations=tuple(violations),
        pole_checks=tuple(poles),
        certificates=tuple(certs),
        total_intersection_empty=not corners,
        min_max_gap=stat,
        resolution=resolution, tol=tol, seed=seed)
