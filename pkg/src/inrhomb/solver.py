"""Common zeros of median-offset fields and rhomb extraction.

The inscribing pipeline locates a point lying on every median simultaneously
(a common zero of the per-axis offset fields), then re-solves the fibers
through that point to obtain the half-diagonals.  Two root finders are
combined: a damped Jacobi fixed-point iteration exploiting that each median
is a graph over the remaining frame coordinates, and a generalized bisection
backed by sampled face sign tests on boxes, used as the fallback.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .bodies import (DEFAULT_GEOMETRY, Box, ConvexBodySpec, Frame,
                     GeometryConfig, chord_solve, gauge_eval_many)
from .errors import (ContractError, DegenerateIntersectionError,
                     InscriptionError, MirandaPreconditionError,
                     SearchExhaustedError)
from .median import median_heights_extended_batch, _clamp_batch
from .bodies import project_coords

__all__ = [
    "SolverConfig", "SolverReport", "SignField", "Rhomb",
    "VerificationReport", "median_sign_fields", "miranda_root",
    "fixed_point_solve", "inscribe_rhomb", "verify_rhomb",
]


@dataclass(frozen=True)
class SolverConfig:
    root_tol: float = 1e-9
    max_depth: int = 60
    face_samples: int = 5
    damping: float = 0.7
    max_iters: int = 500

    def __post_init__(self):
        if not (self.root_tol > 0):
            raise ContractError("root_tol must be positive")
        if self.face_samples < 2:
            raise ContractError("face_samples must be at least 2")
        if not (0.0 < self.damping <= 1.0):
            raise ContractError("damping must lie in (0, 1]")


@dataclass
class SolverReport:
    method: str  # "FixedPoint" | "MirandaBisection" | "Hybrid"
    iterations: int
    final_residual: float
    boxes_explored: int
    converged: bool

    def to_json(self):
        return {"method": self.method, "iterations": self.iterations,
                "final_residual": self.final_residual,
                "boxes_explored": self.boxes_explored,
                "converged": self.converged}


@dataclass(frozen=True)
class SignField:
    """Continuous scalar field with the box-face sign convention: on the box
    searched for axis i the field must be <= 0 on the low face and >= 0 on
    the high face."""
    fn: Callable[[np.ndarray], float]
    batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __call__(self, x):
        return float(self.fn(np.asarray(x, dtype=np.float64)))

    def many(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.batch is not None:
            return np.asarray(self.batch(X), dtype=np.float64)
        return np.array([self.fn(x) for x in X], dtype=np.float64)


def _as_fields(fields) -> List[SignField]:
    out = []
    for i, f in enumerate(fields):
        if isinstance(f, SignField):
            out.append(f)
        else:
            out.append(SignField(fn=f, name=f"field_{i}"))
    return out


def median_sign_fields(body: ConvexBodySpec, frame: Frame,
                       cfg: GeometryConfig = DEFAULT_GEOMETRY) -> List[SignField]:
    """One offset field per axis, evaluated in frame coordinates; zero set is
    the extended median graph, sign the side along the axis direction."""
    fields = []
    for axis in range(frame.dim):
        keep = frame.reduced_indices(axis)

        def batch(C, axis=axis, keep=tuple(keep)):
            C = np.atleast_2d(C)
            h = median_heights_extended_batch(body, frame, axis,
                                              C[:, list(keep)], cfg,
                                              hint=C[:, axis])
            return C[:, axis] - h

        fields.append(SignField(fn=lambda c, b=batch: float(b(c[None, :])[0]),
                                batch=batch, name=f"median_offset_{axis}"))
    return fields


# ---------------------------------------------------------------------------
# generalized bisection


def _face_grid(box: Box, axis: int, value: float, ns: int) -> np.ndarray:
    d = box.dim
    axes_1d = [np.linspace(box.lo[j], box.hi[j], ns) for j in range(d) if j != axis]
    if axes_1d:
        grid = np.stack(np.meshgrid(*axes_1d, indexing="ij"), axis=-1)
        grid = grid.reshape(-1, d - 1)
    else:
        grid = np.zeros((1, 0))
    out = np.empty((grid.shape[0], d))
    out[:, [j for j in range(d) if j != axis]] = grid
    out[:, axis] = value
    return out


def _all_faces(box: Box, ns: int) -> np.ndarray:
    parts = []
    for axis in range(box.dim):
        parts.append(_face_grid(box, axis, box.lo[axis], ns))
        parts.append(_face_grid(box, axis, box.hi[axis], ns))
    return np.concatenate(parts, axis=0)


def _check_precondition(fields, box, ns):
    for i, f in enumerate(fields):
        for side, value, bad_sign in (("low", box.lo[i], 1.0),
                                      ("high", box.hi[i], -1.0)):
            G = _face_grid(box, i, value, ns)
            v = f.many(G)
            viol = v * bad_sign > 0.0  # low face needs <= 0, high face >= 0
            if np.any(viol):
                j = int(np.argmax(np.abs(v) * viol))
                raise MirandaPreconditionError(i, side, G[j].tolist(), float(v[j]))


def _sign_span_ok(fields, box, ns):
    G = _all_faces(box, ns)
    for f in fields:
        v = f.many(G)
        if not (np.min(v) <= 0.0 <= np.max(v)):
            return False
    return True


def _residual_at(fields, x):
    return max(abs(f(x)) for f in fields)


def miranda_root(fields: Sequence, box: Box,
                 config: SolverConfig = SolverConfig()) -> Tuple[np.ndarray, SolverReport]:
    """Zero of a vector field on a box by recursive longest-axis bisection.

    Precondition (checked by sampling a face_samples^(d-1) grid per face):
    field i is <= 0 on the low face and >= 0 on the high face of axis i.
    A sub-box is retained while every field still attains both signs on its
    sampled faces; subdivision stops at box diameter <= root_tol or at
    max_depth.  Deterministic: children are explored smaller-residual first.
    Raises MirandaPreconditionError (naming the axis) on an initial sign
    violation and SearchExhaustedError when every sub-box is rejected before
    the diameter target is reached.
    """
    fields = _as_fields(fields)
    if len(fields) != box.dim:
        raise ContractError("need one field per box axis")
    ns = config.face_samples
    _check_precondition(fields, box, ns)

    budget = max(config.max_iters, 64)
    stack = [(box, 0)]
    best = None  # (diameter, residual, box)
    boxes = 0
    depth_limited = False
    while stack and boxes < budget:
        bx, depth = stack.pop()
        boxes += 1
        diam = bx.diameter
        resid = _residual_at(fields, bx.centroid)
        if best is None or (diam, resid) < (best[0], best[1]):
            best = (diam, resid, bx)
        if diam <= config.root_tol:
            break
        if depth >= config.max_depth:
            depth_limited = True
            continue
        k = int(np.argmax(bx.hi - bx.lo))
        mid = 0.5 * (bx.lo[k] + bx.hi[k])
        lo_child = Box(bx.lo.copy(), np.where(np.arange(bx.dim) == k, mid, bx.hi))
        hi_child = Box(np.where(np.arange(bx.dim) == k, mid, bx.lo), bx.hi.copy())
        kept = [c for c in (lo_child, hi_child) if _sign_span_ok(fields, c, ns)]
        if len(kept) == 2:
            r = [_residual_at(fields, c.centroid) for c in kept]
            if r[0] < r[1]:  # push worse first so the better child pops first
                kept = [kept[1], kept[0]]
        for c in kept:
            stack.append((c, depth + 1))

    if best is None:
        raise SearchExhaustedError("no box survived", None, None)
    diam, resid, bx = best
    x = bx.centroid
    if diam > config.root_tol and not depth_limited and not stack and boxes < budget:
        raise SearchExhaustedError(
            "all sub-boxes rejected by the sampled sign test "
            f"(best diameter {diam:.3e})", x, resid)
    report = SolverReport(method="MirandaBisection", iterations=boxes,
                          final_residual=resid, boxes_explored=boxes,
                          converged=resid <= config.root_tol)
    return x, report


# ---------------------------------------------------------------------------
# fixed point


def _heights_at(body, frame, C, cfg):
    """Extended median heights of every axis at frame coordinates C (d,)."""
    d = frame.dim
    x = frame.point(C)
    bases = x[None, :] - C[:, None] * frame.axes
    kb = body.kernel
    rc = body.circumradius_bound()
    R = rc + np.linalg.norm(bases - body.translation, axis=1) + 1.0
    status, tn, tp, tm, _ = kernels.chord_many(
        kb.exps, kb.mats, kb.trans, bases, frame.axes.copy(), -R, R,
        cfg.boundary_tol, C.copy())
    if np.any(status == kernels.BRACKET_ERROR):
        raise ContractError("fiber bracket failed")
    h = np.where(status == kernels.CHORD, 0.5 * (tn + tp), tm)
    for axis in np.nonzero(status == kernels.EMPTY)[0]:
        keep = frame.reduced_indices(int(axis))
        y0 = project_coords(frame, body.interior_point, int(axis))
        _, t_at = _clamp_batch(body, frame, int(axis), C[list(keep)][None, :],
                               y0, cfg)
        h[axis] = float(t_at[0])
    return h


def fixed_point_solve(body: ConvexBodySpec, frame: Frame, start,
                      config: SolverConfig = SolverConfig(),
                      cfg: GeometryConfig = DEFAULT_GEOMETRY
                      ) -> Tuple[np.ndarray, SolverReport]:
    """Damped Jacobi iteration on frame coordinates: each coordinate moves
    toward the median height over the others.  Non-convergence is reported,
    not raised; the residual is the undamped step size, which coincides with
    the maximal median-offset magnitude at the iterate."""
    start = np.asarray(start, dtype=np.float64)
    C = frame.coords(start)
    resid = np.inf
    it = 0
    for it in range(config.max_iters):
        h = _heights_at(body, frame, C, cfg)
        delta = h - C
        resid = float(np.max(np.abs(delta)))
        if resid <= config.root_tol:
            break
        C = C + config.damping * delta
    report = SolverReport(method="FixedPoint", iterations=it + 1,
                          final_residual=resid, boxes_explored=0,
                          converged=resid <= config.root_tol)
    return frame.point(C), report


# ---------------------------------------------------------------------------
# rhombs


@dataclass(frozen=True)
class Rhomb:
    center: np.ndarray
    directions: Frame
    half_diagonals: np.ndarray
    vertices: np.ndarray  # rows [axis0+, axis0-, axis1+, axis1-, ...]

    @staticmethod
    def build(center, directions: Frame, half_diagonals):
        center = np.asarray(center, dtype=np.float64)
        lam = np.asarray(half_diagonals, dtype=np.float64)
        if np.any(lam <= 0):
            raise ContractError("half-diagonals must be positive")
        verts = np.empty((2 * directions.dim, directions.dim))
        for i in range(directions.dim):
            verts[2 * i] = center + lam[i] * directions.axes[i]
            verts[2 * i + 1] = center - lam[i] * directions.axes[i]
        return Rhomb(center=center, directions=directions,
                     half_diagonals=lam, vertices=verts)

    def to_json(self, residuals=None, report=None):
        obj = {"center": self.center.tolist(),
               "directions": self.directions.axes.tolist(),
               "half_diagonals": self.half_diagonals.tolist(),
               "vertices": self.vertices.tolist()}
        if residuals is not None:
            obj["residuals"] = residuals
        if report is not None:
            obj["report"] = report.to_json() if hasattr(report, "to_json") else report
        return obj


@dataclass(frozen=True)
class VerificationReport:
    inscription: float      # max |gauge(vertex) - 1|
    orthonormality: float   # max |v_i . v_j - delta_ij|
    midpoint: float         # max ||(v_i^+ + v_i^-)/2 - center||
    min_half_diagonal: float
    tol: float
    passed: bool

    def residuals_json(self):
        return {"inscription": self.inscription, "midpoint": self.midpoint,
                "orthonormality": self.orthonormality}


def verify_rhomb(body: ConvexBodySpec, rhomb: Rhomb,
                 tol: float = 1e-6) -> VerificationReport:
    """Check inscription, direction orthonormality, common midpoint and
    positive half-diagonals of a rhomb against a body."""
    if rhomb.center.shape[0] != body.dim:
        raise ContractError("rhomb and body dimensions differ")
    g = gauge_eval_many(body, rhomb.vertices)
    inscription = float(np.max(np.abs(g - 1.0)))
    A = rhomb.directions.axes
    orthonormality = float(np.max(np.abs(A @ A.T - np.eye(A.shape[0]))))
    mids = 0.5 * (rhomb.vertices[0::2] + rhomb.vertices[1::2])
    midpoint = float(np.max(np.linalg.norm(mids - rhomb.center, axis=1)))
    min_lam = float(np.min(rhomb.half_diagonals))
    passed = (inscription <= tol and orthonormality <= 1e-10
              and midpoint <= tol and min_lam > tol)
    return VerificationReport(inscription=inscription,
                              orthonormality=orthonormality,
                              midpoint=midpoint, min_half_diagonal=min_lam,
                              tol=tol, passed=passed)


def _search_box(body, frame):
    c0 = frame.coords(body.interior_point)
    half = body.circumradius_bound(about=body.interior_point) + 1.0
    return Box(c0 - half, c0 + half)


def inscribe_rhomb(body: ConvexBodySpec, frame: Frame,
                   config: SolverConfig = SolverConfig(),
                   cfg: GeometryConfig = DEFAULT_GEOMETRY,
                   verify_tol: float = 1e-6) -> Tuple[Rhomb, SolverReport]:
    """Inscribe a rhomb with the given direction frame.

    Pipeline: damped fixed point from the interior point; on
    non-convergence, generalized bisection on the median-offset fields over
    the circumradius box (reported as Hybrid), then a fixed-point polish.
    The fibers through the located intersection provide the half-diagonals;
    the result is re-verified at ``verify_tol``.

    Failures raise subclasses of HypothesisViolationError: a body satisfying
    the inscribing hypotheses cannot reach them.
    """
    if frame.dim != body.dim:
        raise ContractError("frame and body dimensions differ")
    x_star, report = fixed_point_solve(body, frame, body.interior_point,
                                       config, cfg)
    if not report.converged:
        box = _search_box(body, frame)
        d = body.dim
        # depth/budget sufficient to reach the diameter target
        need = d * (int(np.ceil(np.log2(box.diameter / config.root_tol))) + 1)
        mir_cfg = replace(config, max_depth=max(config.max_depth, need),
                          max_iters=max(config.max_iters, 8 * need + 256))
        fields = median_sign_fields(body, frame, cfg)
        x_mir, rep_mir = miranda_root(fields, box, mir_cfg)
        x_mir_w = frame.point(x_mir)
        x_pol, rep_pol = fixed_point_solve(body, frame, x_mir_w, config, cfg)
        resid_mir = rep_mir.final_residual
        if rep_pol.final_residual <= resid_mir:
            x_star, final_resid = x_pol, rep_pol.final_residual
        else:
            x_star, final_resid = x_mir_w, resid_mir
        report = SolverReport(
            method="Hybrid",
            iterations=report.iterations + rep_mir.iterations + rep_pol.iterations,
            final_residual=final_resid,
            boxes_explored=rep_mir.boxes_explored,
            converged=final_resid <= config.root_tol)

    lam = np.empty(body.dim)
    for axis in range(body.dim):
        res = chord_solve(body, x_star, frame.axes[axis], cfg)
        if res.kind != "chord":
            raise DegenerateIntersectionError(
                f"fiber through the intersection point is {res.kind} along "
                f"axis {axis}; the point lies on the boundary sphere")
        lam[axis] = 0.5 * res.fiber.gap
    rhomb = Rhomb.build(x_star, frame, lam)
    verification = verify_rhomb(body, rhomb, verify_tol)
    if not verification.passed:
        raise InscriptionError(
            "extracted rhomb failed verification "
            f"(inscription {verification.inscription:.3e}, midpoint "
            f"{verification.midpoint:.3e}, min half-diagonal "
            f"{verification.min_half_diagonal:.3e}); run diagnostics to "
            "probe the body's hypotheses", report=verification)
    return rhomb, report
