"""Independent reference computations used to freeze expected test values.

Everything here is deliberately brute force (bisection, dense grids,
closed-form Lagrange conditions) and shares no code path with the package's
solvers.
"""

import numpy as np

from inrhomb import gauge_eval
from inrhomb.median import median_heights_extended_batch


def bisect(f, lo, hi, iters=100):
    flo = f(lo)
    assert flo * f(hi) <= 0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) * flo > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ellipsoid_support(semi_axes, w):
    a = np.asarray(semi_axes, dtype=float)
    w = np.asarray(w, dtype=float)
    return a ** 2 * w / np.sqrt(np.sum(a ** 2 * w ** 2))


def superellipsoid_support(q, semi_axes, w):
    # stationarity of x.w on sum |x_i/a_i|^q = 1 (conjugate exponent form)
    a = np.asarray(semi_axes, dtype=float)
    w = np.asarray(w, dtype=float)
    qc = q / (q - 1.0)
    t = (a * np.abs(w)) ** qc
    scale = np.sum(t) ** (1.0 / q)
    x = np.sign(w) * a * (a * np.abs(w)) ** (qc - 1.0)
    return x / scale


def quadratic_chord(semi_axes, base, direction):
    # roots of sum ((b_i + t d_i)/a_i)^2 = 1
    a = np.asarray(semi_axes, dtype=float)
    b = np.asarray(base, dtype=float) / a
    d = np.asarray(direction, dtype=float) / a
    A = d @ d
    B = 2.0 * b @ d
    C = b @ b - 1.0
    disc = B * B - 4 * A * C
    if disc < 0:
        return None
    r = np.sqrt(disc)
    return ((-B - r) / (2 * A), (-B + r) / (2 * A))


def center_oracle(body, frame, grid_step, polish_iters=400):
    """Dense-grid argmin of the max median-offset magnitude, refined by
    damped cyclic coordinate iteration (each offset has unit slope along its
    own axis, so the coordinate root is the median height itself)."""
    d = body.dim
    c0 = frame.coords(body.interior_point)
    half = body.circumradius_bound(about=body.interior_point) + 0.2
    n = int(np.ceil(2 * half / grid_step)) + 1
    axes_1d = [np.linspace(c0[i] - half, c0[i] + half, n) for i in range(d)]

    keeps = [[j for j in range(d) if j != i] for i in range(d)]
    tables = []
    for i in range(d):
        red = np.stack(np.meshgrid(*[axes_1d[j] for j in keeps[i]],
                                   indexing="ij"), axis=-1).reshape(-1, d - 1)
        h = median_heights_extended_batch(body, frame, i, red)
        tables.append(h.reshape([n] * (d - 1)))

    best_val = np.inf
    best_idx = None
    if d == 2:
        R0 = np.abs(axes_1d[0][:, None] - tables[0][None, :])
        R1 = np.abs(axes_1d[1][None, :] - tables[1][:, None])
        R = np.maximum(R0, R1)
        best_idx = np.unravel_index(np.argmin(R), R.shape)
        best_val = R[best_idx]
    else:
        # slab over the last coordinate; within a slab the residual of each
        # axis broadcasts over the remaining d-1 coordinates
        for k in range(n):
            R = None
            for i in range(d):
                if i == d - 1:
                    r = np.abs(axes_1d[i][k] - tables[i])
                else:
                    sl = [slice(None)] * (d - 1)
                    sl[d - 2] = k  # coordinate d-1 sits last in keeps[i]
                    t_exp = np.expand_dims(tables[i][tuple(sl)], i)
                    shape_i = [1] * (d - 1)
                    shape_i[i] = n
                    r = np.abs(axes_1d[i].reshape(shape_i) - t_exp)
                R = r if R is None else np.maximum(R, r)
            idx = np.unravel_index(np.argmin(R), R.shape)
            if R[idx] < best_val:
                best_val = R[idx]
                best_idx = tuple(idx) + (k,)
    c = np.array([axes_1d[i][best_idx[i]] for i in range(d)])

    # damped cyclic polish toward the common graph point
    best = (np.inf, c.copy())
    for _ in range(polish_iters):
        moved = 0.0
        for i in range(d):
            y = c[keeps[i]]
            h = float(median_heights_extended_batch(body, frame, i, y[None, :],
                                                    hint=np.array([c[i]]))[0])
            delta = h - c[i]
            c[i] += 0.5 * delta
            moved = max(moved, abs(delta))
        if moved < best[0]:
            best = (moved, c.copy())
        if moved < 1e-11:
            break
    return frame.point(best[1])


def max_offset_residual(body, frame, x):
    from inrhomb.median import median_offset
    return max(abs(median_offset(body, frame, i, x)) for i in range(body.dim))
