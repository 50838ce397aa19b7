"""Direction sweeps: sample frames, inscribe, record half-diagonal profiles.

The sweep treats a direction basis and its negation as distinct, matching
the sampling convention of random_frame (each row is sign-fixed so its
first nonzero entry is positive).  equalize_diagonals is an exploratory
extension: it searches nearby frames for one whose rhomb has equal
half-diagonals, and non-convergence is a first-class result.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .bodies import ConvexBodySpec, Frame, frame_orthonormalize
from .errors import DegenerateFrameError, InrhombError
from .solver import Rhomb, SolverConfig, inscribe_rhomb, verify_rhomb

__all__ = [
    "SweepRecord", "SweepSummary", "EqualizeResult", "random_frame",
    "givens_frame", "direction_sweep", "sweep_summary", "equalize_diagonals",
]


@dataclass(frozen=True)
class SweepRecord:
    seed: int
    frame: Frame
    half_diagonals: np.ndarray
    center: np.ndarray
    residual: float
    converged: bool
    error: Optional[str] = None

    @property
    def spread(self):
        if not np.all(np.isfinite(self.half_diagonals)):
            return float("inf")
        return float(np.max(self.half_diagonals) - np.min(self.half_diagonals))


@dataclass(frozen=True)
class SweepSummary:
    count: int
    success_fraction: float
    spread_quartiles: Tuple[float, float, float]


def random_frame(dim: int, seed: int) -> Frame:
    """Orthonormalised standard-normal rows, rows sign-fixed so the first
    nonzero entry is positive; deterministic in the seed."""
    if dim < 2:
        raise DegenerateFrameError("dimension must be at least 2")
    for attempt in range(9):
        rng = np.random.default_rng((seed, attempt))
        rows = rng.standard_normal((dim, dim))
        try:
            fr = frame_orthonormalize(rows)
        except DegenerateFrameError:
            continue
        A = fr.axes.copy()
        for i in range(dim):
            nz = np.nonzero(np.abs(A[i]) > 1e-12)[0]
            if nz.size and A[i, nz[0]] < 0:
                A[i] = -A[i]
        return Frame(A)
    raise DegenerateFrameError(f"degenerate random frame for seed {seed}")


def _plane_rotation(dim, i, j, angle):
    R = np.eye(dim)
    c, s = np.cos(angle), np.sin(angle)
    R[i, i] = c
    R[j, j] = c
    R[i, j] = -s
    R[j, i] = s
    return R


def givens_frame(dim: int, angles, base: Optional[Frame] = None) -> Frame:
    """Frame from plane-rotation angles applied to ``base`` (default the
    identity), planes taken in lexicographic pair order (0,1), (0,2), ..."""
    base_axes = np.eye(dim) if base is None else base.axes
    pairs = [(i, j) for i in range(dim) for j in range(i + 1, dim)]
    angles = list(angles)
    if len(angles) > len(pairs):
        raise DegenerateFrameError("more angles than rotation planes")
    R = np.eye(dim)
    for (i, j), a in zip(pairs, angles):
        R = _plane_rotation(dim, i, j, float(a)) @ R
    return Frame(R @ base_axes)




def _run_one(body, seed, config) -> SweepRecord:
    frame = random_frame(body.dim, seed)
    d = body.dim
    try:
        rhomb, report = inscribe_rhomb(body, frame, config)
    except InrhombError as exc:
        return SweepRecord(seed=seed, frame=frame,
                           half_diagonals=np.full(d, np.nan),
                           center=np.full(d, np.nan), residual=float("inf"),
                           converged=False, error=type(exc).__name__)
    ver = verify_rhomb(body, rhomb, 1e-6)
    residual = max(ver.inscription, ver.midpoint)
    return SweepRecord(seed=seed, frame=frame,
                       half_diagonals=rhomb.half_diagonals,
                       center=rhomb.center, residual=residual,
                       converged=bool(report.converged and ver.passed))


def direction_sweep(body: ConvexBodySpec, count: int, base_seed: int,
                    config: SolverConfig = SolverConfig(),
                    threads: int = 1) -> List[SweepRecord]:
    """Inscribe for ``count`` seeded random frames (seeds base_seed + k).

    Per-frame failures are recorded, not raised.  Results are merged in seed
    order, so the output is identical for any thread count.
    """
    if count < 1:
        raise InrhombError("count must be at least 1")
    seeds = [base_seed + k for k in range(count)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda s: _run_one(body, s, config), seeds))
    else:
        records = [_run_one(body, s, config) for s in seeds]
    return records


def sweep_summary(records: List[SweepRecord]) -> SweepSummary:
    ok = [r for r in records if r.converged]
    spreads = sorted(r.spread for r in ok)
    if spreads:
        q = tuple(float(np.percentile(spreads, p)) for p in (25, 50, 75))
    else:
        q = (float("nan"),) * 3
    return SweepSummary(count=len(records),
                        success_fraction=len(ok) / len(records),
                        spread_quartiles=q)


@dataclass(frozen=True)
class EqualizeResult:
    converged: bool
    frame: Frame
    rhomb: Optional[Rhomb]
    spread: float
    iterations: int
    message: str = ""


def equalize_diagonals(body: ConvexBodySpec, frame0: Frame,
                       config: SolverConfig = SolverConfig()) -> EqualizeResult:
    """Search for a nearby frame whose rhomb has equal half-diagonals.

    Frames are parametrised by plane-rotation angles applied to frame0 (all
    lexicographic axis pairs); a damped coordinate secant drives the
    residuals lambda_{k+1} - lambda_0 to zero, cycling each angle against a
    residual.  Convergence target: spread below sqrt(root_tol).
    Non-convergence returns the best frame found.
    """
    d = body.dim
    n = d - 1
    n_angles = d * (d - 1) // 2
    tol = float(np.sqrt(config.root_tol))

    def residuals(angles):
        fr = givens_frame(d, angles, base=frame0)
        rhomb, _ = inscribe_rhomb(body, fr, config)
        lam = rhomb.half_diagonals
        return lam[1:] - lam[0], fr, rhomb

    theta = np.zeros(n_angles)
    r, fr, rhomb = residuals(theta)  # frame0 must inscribe
    best = (float(np.max(np.abs(r))), theta.copy(), fr, rhomb)
    if best[0] <= tol:
        return EqualizeResult(True, frame0, rhomb, best[0], 0)

    h = np.full(n_angles, 0.05)
    max_sweeps = 60
    it = 0
    for sweep in range(max_sweeps):
        for k in range(n_angles):
            it += 1
            tgt = k % n  # residual this angle chases
            trial = theta.copy()
            trial[k] += h[k]
            try:
                r2, fr2, rh2 = residuals(trial)
            except InrhombError:
                h[k] *= 0.5
                continue
            denom = r2[tgt] - r[tgt]
            if abs(denom) < 1e-15:
                h[k] *= 0.5
                continue
            step = -r[tgt] * h[k] / denom
            step = float(np.clip(step, -np.pi / 6, np.pi / 6))
            cand = theta.copy()
            cand[k] += step
            try:
                r3, fr3, rh3 = residuals(cand)
            except InrhombError:
                h[k] *= 0.5
                continue
            took = None
            if np.max(np.abs(r3)) < np.max(np.abs(r)):
                theta, r, fr, rhomb = cand, r3, fr3, rh3
                h[k] = min(max(abs(step) * 0.5, 1e-6), 0.05)
                took = r3
            elif np.max(np.abs(r2)) < np.max(np.abs(r)):
                theta, r, fr, rhomb = trial, r2, fr2, rh2
                took = r2
            else:
                h[k] *= 0.5
            if np.max(np.abs(r)) < best[0]:
                best = (float(np.max(np.abs(r))), theta.copy(), fr, rhomb)
            if best[0] <= tol:
                return EqualizeResult(True, fr, rhomb, best[0], it)
        if np.all(h < 1e-10):
            break
    spread, _, fr, rhomb = best
    return EqualizeResult(False, fr, rhomb, spread, it,
                          message="coordinate secant stalled")
