"""Pure-numpy kernel backend.

Vectorised over lanes with fixed iteration counts so the control flow stays
branch-free; the compiled backend implements the same maths per lane with
early exits.  Gauge restricted to a line is strictly convex, which is what
the golden-section / bisection combination relies on.
"""

import numpy as np

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0

N_GOLDEN = 72
N_BISECT = 64
N_CLAMP_OUTER = 54
N_CLAMP_INNER = 42

EMPTY, TANGENT, CHORD, BRACKET_ERROR = 0, 1, 2, 3


def _leaf_sum(z, q):
    # z: (m, d) scaled leaf coordinates
    if q == 2.0:
        return np.einsum("md,md->m", z, z)
    if q == 4.0:
        z2 = z * z
        return np.einsum("md,md->m", z2, z2)
    return np.sum(np.abs(z) ** q, axis=1)


def gauge_many(exps, mats, trans, X):
    """Gauge values for points X (M, d); max over leaves of scaled power sums."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    g = None
    for k in range(exps.shape[0]):
        z = (X - trans[k]) @ mats[k].T
        s = _leaf_sum(z, exps[k])
        g = s if g is None else np.maximum(g, s)
    return g


class _Lines:
    """Per-leaf affine caches for a family of lines base + t*dir."""

    def __init__(self, exps, mats, trans, bases, dirs):
        self.exps = exps
        self.y0 = [(bases - trans[k]) @ mats[k].T for k in range(exps.shape[0])]
        self.u = [dirs @ mats[k].T for k in range(exps.shape[0])]

    def psi(self, T, idx=None):
        # gauge(base + T*dir) - 1 for lanes idx (None = all)
        g = None
        for k in range(self.exps.shape[0]):
            y0 = self.y0[k] if idx is None else self.y0[k][idx]
            u = self.u[k] if idx is None else self.u[k][idx]
            s = _leaf_sum(y0 + T[:, None] * u, self.exps[k])
            g = s if g is None else np.maximum(g, s)
        return g - 1.0


def _golden_min(psi, a, b, idx, n_iter):
    """Vectorised golden-section minimisation; returns (t_min, f_min)."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = psi(c, idx)
    fd = psi(d, idx)
    for _ in range(n_iter):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        old_c, old_fc, old_d, old_fd = c, fc, d, fd
        c_left = b - _INVPHI * (b - a)
        d_right = a + _INVPHI * (b - a)
        probe = np.where(left, c_left, d_right)
        fp = psi(probe, idx)
        c = np.where(left, c_left, old_d)
        d = np.where(left, old_c, d_right)
        fc = np.where(left, fp, old_fd)
        fd = np.where(left, old_fc, fp)
    tm = np.where(fc < fd, c, d)
    fm = np.minimum(fc, fd)
    return tm, fm


def _bisect_root(psi, lo, hi, idx, increasing):
    """Root of psi on [lo, hi]; sign(psi(lo)) != sign(psi(hi)) assumed."""
    for _ in range(N_BISECT):
        mid = 0.5 * (lo + hi)
        pos = psi(mid, idx) > 0.0
        take_hi = pos if increasing else ~pos
        hi = np.where(take_hi, mid, hi)
        lo = np.where(take_hi, lo, mid)
    return 0.5 * (lo + hi)


def chord_many(exps, mats, trans, bases, dirs, t_lo, t_hi, tangent_tol,
               t_hint=None):
    """Intersect lines base + t*dir with the body.

    Returns (status, t_neg, t_pos, t_min, g_min); statuses EMPTY / TANGENT /
    CHORD / BRACKET_ERROR.  The bracket [t_lo, t_hi] must have gauge > 1 at
    both ends (BRACKET_ERROR otherwise).  For CHORD lanes t_neg < t_pos are
    the two gauge=1 roots; for TANGENT/EMPTY both equal the line minimiser.
    """
    bases = np.atleast_2d(np.asarray(bases, dtype=np.float64))
    dirs = np.atleast_2d(np.asarray(dirs, dtype=np.float64))
    M = bases.shape[0]
    t_lo = np.broadcast_to(np.asarray(t_lo, dtype=np.float64), (M,)).copy()
    t_hi = np.broadcast_to(np.asarray(t_hi, dtype=np.float64), (M,)).copy()
    lines = _Lines(exps, mats, trans, bases, dirs)

    f_lo = lines.psi(t_lo)
    f_hi = lines.psi(t_hi)
    bad = (f_lo <= 0.0) | (f_hi <= 0.0)

    t0 = (np.broadcast_to(np.asarray(t_hint, dtype=np.float64), (M,)).copy()
          if t_hint is not None else 0.5 * (t_lo + t_hi))
    t0 = np.clip(t0, t_lo, t_hi)
    f0 = lines.psi(t0)
    interior = (f0 < -tangent_tol) & ~bad

    t_split = t0.copy()
    f_split = f0.copy()
    need = ~interior & ~bad
    if np.any(need):
        idx = np.nonzero(need)[0]
        tm, fm = _golden_min(lines.psi, t_lo[idx], t_hi[idx], idx, N_GOLDEN)
        t_split[idx] = tm
        f_split[idx] = fm

    status = np.full(M, EMPTY, dtype=np.uint8)
    status[np.abs(f_split) <= tangent_tol] = TANGENT
    status[f_split < -tangent_tol] = CHORD
    status[bad] = BRACKET_ERROR

    t_neg = t_split.copy()
    t_pos = t_split.copy()
    ch = status == CHORD
    if np.any(ch):
        idx = np.nonzero(ch)[0]
        t_neg[idx] = _bisect_root(lines.psi, t_lo[idx], t_split[idx], idx,
                                  increasing=False)
        t_pos[idx] = _bisect_root(lines.psi, t_split[idx], t_hi[idx], idx,
                                  increasing=True)
    # tangent minimisers: golden section localises a flat argmin only to
    # ~eps^(1/q); the midpoint of a slightly raised sublevel slice is far
    # more accurate and brackets regardless of the minimum's rounded sign
    tg = status == TANGENT
    if np.any(tg):
        idx = np.nonzero(tg)[0]
        level = f_split[idx] + np.maximum(1e-12, np.abs(f_split[idx]))

        def psi_lvl(T, sub):
            return lines.psi(T, idx[sub]) - level[sub]

        sub = np.arange(idx.shape[0])
        a = _bisect_root(psi_lvl, t_lo[idx], t_split[idx], sub,
                         increasing=False)
        b = _bisect_root(psi_lvl, t_split[idx], t_hi[idx], sub,
                         increasing=True)
        t_split[idx] = 0.5 * (a + b)
        t_neg[idx] = t_split[idx]
        t_pos[idx] = t_split[idx]
    return status, t_neg, t_pos, t_split, f_split + 1.0


def ray_many(exps, mats, trans, origins, dirs, t_hi):
    """Boundary crossing parameter along rays from interior origins.

    gauge(origin) < 1 and gauge(origin + t_hi*dir) > 1 required; lanes
    violating either give nan.
    """
    origins = np.atleast_2d(np.asarray(origins, dtype=np.float64))
    dirs = np.atleast_2d(np.asarray(dirs, dtype=np.float64))
    M = origins.shape[0]
    t_hi = np.broadcast_to(np.asarray(t_hi, dtype=np.float64), (M,)).copy()
    lines = _Lines(exps, mats, trans, origins, dirs)
    f0 = lines.psi(np.zeros(M))
    f1 = lines.psi(t_hi)
    bad = (f0 >= 0.0) | (f1 <= 0.0)
    lo = np.zeros(M)
    hi = t_hi
    for _ in range(N_BISECT):
        mid = 0.5 * (lo + hi)
        pos = lines.psi(mid) > 0.0
        hi = np.where(pos, mid, hi)
        lo = np.where(pos, lo, mid)
    r = 0.5 * (lo + hi)
    r[bad] = np.nan
    return r


def clamp_many(exps, mats, trans, p0, e, f, t_lo, t_hi, tangent_tol):
    """Silhouette parameter along a pencil of fibers.

    Lane geometry: points x(lam, t) = p0 + lam*e + t*f.  The fiber at lam=0
    meets the body, the fiber at lam=1 misses it.  Returns (lam, t_at): the
    largest lam in [0, 1] (within bisection resolution) whose fiber still
    meets the body, and the fiber parameter of its near-tangent point.
    """
    p0 = np.atleast_2d(np.asarray(p0, dtype=np.float64))
    e = np.atleast_2d(np.asarray(e, dtype=np.float64))
    f = np.atleast_2d(np.asarray(f, dtype=np.float64))
    M = p0.shape[0]
    t_lo = np.broadcast_to(np.asarray(t_lo, dtype=np.float64), (M,)).copy()
    t_hi = np.broadcast_to(np.asarray(t_hi, dtype=np.float64), (M,)).copy()
    K = exps.shape[0]
    z0 = [(p0 - trans[k]) @ mats[k].T for k in range(K)]
    ze = [e @ mats[k].T for k in range(K)]
    zf = [f @ mats[k].T for k in range(K)]

    def inner_min(lam):
        # min over t of gauge(x(lam, t)) - 1, via golden section
        def psi(T, idx):
            g = None
            for k in range(K):
                base = z0[k] + lam[:, None] * ze[k]
                s = _leaf_sum(base + T[:, None] * zf[k], exps[k])
                g = s if g is None else np.maximum(g, s)
            return g - 1.0
        return _golden_min(psi, t_lo, t_hi, None, N_CLAMP_INNER)

    lo = np.zeros(M)
    hi = np.ones(M)
    for _ in range(N_CLAMP_OUTER):
        mid = 0.5 * (lo + hi)
        tm, fm = inner_min(mid)
        meets = fm <= 0.0
        lo = np.where(meets, mid, lo)
        hi = np.where(~meets, mid, hi)
    tm, fm = inner_min(lo)

    # midpoint of a slightly raised sublevel slice beats the golden argmin
    # positionally (see chord_many); refine every lane
    level = fm + np.maximum(1e-12, np.abs(fm))

    def psi_lvl(T, idx):
        g = None
        for k in range(K):
            base = z0[k][idx] + lo[idx, None] * ze[k][idx]
            s = _leaf_sum(base + T[:, None] * zf[k][idx], exps[k])
            g = s if g is None else np.maximum(g, s)
        return g - 1.0 - level[idx]

    idx = np.arange(M)
    t1 = _bisect_root(psi_lvl, t_lo, tm, idx, increasing=False)
    t2 = _bisect_root(psi_lvl, tm, t_hi, idx, increasing=True)
    return lo, 0.5 * (t1 + t2)
