# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel backend; see kernels.pure for the reference semantics."""

import numpy as np

cimport numpy as cnp
from libc.math cimport NAN, fabs, pow, sqrt
from libc.stdlib cimport free, malloc

cnp.import_array()

cdef double INVPHI = (sqrt(5.0) - 1.0) / 2.0
cdef int N_GOLDEN = 72
cdef int N_BISECT = 64
cdef int N_CLAMP_OUTER = 54
cdef int N_CLAMP_INNER = 42

cdef int EMPTY = 0
cdef int TANGENT = 1
cdef int CHORD = 2
cdef int BRACKET_ERROR = 3


cdef inline double _psi_line(const double* y0, const double* u,
                             const double* exps, Py_ssize_t K, Py_ssize_t d,
                             double t) nogil:
    cdef Py_ssize_t k, i, off
    cdef double g = -2.0, s, z, z2, q
    for k in range(K):
        q = exps[k]
        s = 0.0
        off = k * d
        if q == 2.0:
            for i in range(d):
                z = y0[off + i] + t * u[off + i]
                s += z * z
        elif q == 4.0:
            for i in range(d):
                z = y0[off + i] + t * u[off + i]
                z2 = z * z
                s += z2 * z2
        else:
            for i in range(d):
                z = y0[off + i] + t * u[off + i]
                s += pow(fabs(z), q)
        if s > g:
            g = s
    return g - 1.0


cdef inline void _line_cache(const double* mats, const double* trans,
                             const double* base, const double* direc,
                             Py_ssize_t K, Py_ssize_t d,
                             double* y0, double* u) nogil:
    cdef Py_ssize_t k, i, j
    cdef double sy, su
    for k in range(K):
        for i in range(d):
            sy = 0.0
            su = 0.0
            for j in range(d):
                sy += mats[(k * d + i) * d + j] * (base[j] - trans[k * d + j])
                su += mats[(k * d + i) * d + j] * direc[j]
            y0[k * d + i] = sy
            u[k * d + i] = su


cdef int _chord_one(const double* y0, const double* u, const double* exps,
                    Py_ssize_t K, Py_ssize_t d, double t_lo, double t_hi,
                    double tangent_tol, double t_hint,
                    double* t_neg, double* t_pos, double* t_min,
                    double* g_min) nogil:
    cdef double f_lo, f_hi, f0, a, b, c, dd, fc, fd, tm, fm, lo, hi, mid, fmid, level
    cdef double t0
    cdef int it

    f_lo = _psi_line(y0, u, exps, K, d, t_lo)
    f_hi = _psi_line(y0, u, exps, K, d, t_hi)
    if f_lo <= 0.0 or f_hi <= 0.0:
        t_neg[0] = t_lo
        t_pos[0] = t_hi
        t_min[0] = t_lo
        g_min[0] = f_lo + 1.0
        return BRACKET_ERROR

    t0 = t_hint
    if t0 < t_lo:
        t0 = t_lo
    if t0 > t_hi:
        t0 = t_hi
    f0 = _psi_line(y0, u, exps, K, d, t0)

    tm = t0
    fm = f0
    if f0 >= -tangent_tol:
        # golden section with early exit once strictly inside
        a = t_lo
        b = t_hi
        c = b - INVPHI * (b - a)
        dd = a + INVPHI * (b - a)
        fc = _psi_line(y0, u, exps, K, d, c)
        fd = _psi_line(y0, u, exps, K, d, dd)
        for it in range(N_GOLDEN):
            if fc < -tangent_tol:
                break
            if fd < -tangent_tol:
                break
            if fc < fd:
                b = dd
                dd = c
                fd = fc
                c = b - INVPHI * (b - a)
                fc = _psi_line(y0, u, exps, K, d, c)
            else:
                a = c
                c = dd
                fc = fd
                dd = a + INVPHI * (b - a)
                fd = _psi_line(y0, u, exps, K, d, dd)
        if fc < fd:
            tm = c
            fm = fc
        else:
            tm = dd
            fm = fd

    t_min[0] = tm
    g_min[0] = fm + 1.0
    if fm > tangent_tol:
        t_neg[0] = tm
        t_pos[0] = tm
        return EMPTY
    if fm >= -tangent_tol:
        # midpoint of a slightly raised sublevel slice localises a flat
        # tangent point far better than the golden argmin
        level = fm + (1e-12 if fabs(fm) < 1e-12 else fabs(fm))
        lo = t_lo
        hi = tm
        for it in range(N_BISECT):
            mid = 0.5 * (lo + hi)
            if _psi_line(y0, u, exps, K, d, mid) > level:
                lo = mid
            else:
                hi = mid
        a = 0.5 * (lo + hi)
        lo = tm
        hi = t_hi
        for it in range(N_BISECT):
            mid = 0.5 * (lo + hi)
            if _psi_line(y0, u, exps, K, d, mid) > level:
                hi = mid
            else:
                lo = mid
        tm = 0.5 * (a + 0.5 * (lo + hi))
        t_min[0] = tm
        t_neg[0] = tm
        t_pos[0] = tm
        return TANGENT

    # left root: psi decreasing from f(t_lo) > 0 to fm < 0
    lo = t_lo
    hi = tm
    for it in range(N_BISECT):
        mid = 0.5 * (lo + hi)
        fmid = _psi_line(y0, u, exps, K, d, mid)
        if fmid > 0.0:
            lo = mid
        else:
            hi = mid
    t_neg[0] = 0.5 * (lo + hi)

    # right root: psi increasing from fm < 0 to f(t_hi) > 0
    lo = tm
    hi = t_hi
    for it in range(N_BISECT):
        mid = 0.5 * (lo + hi)
        fmid = _psi_line(y0, u, exps, K, d, mid)
        if fmid > 0.0:
            hi = mid
        else:
            lo = mid
    t_pos[0] = 0.5 * (lo + hi)
    return CHORD


def gauge_many(cnp.ndarray exps_a, cnp.ndarray mats_a, cnp.ndarray trans_a, X):
    cdef cnp.ndarray[double, ndim=1] exps = np.ascontiguousarray(exps_a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=3] mats = np.ascontiguousarray(mats_a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] trans = np.ascontiguousarray(trans_a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] Xa = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
    cdef Py_ssize_t M = Xa.shape[0], d = Xa.shape[1], K = exps.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(M, dtype=np.float64)
    cdef Py_ssize_t m, k, i, j
    cdef double g, s, z, z2, q
    with nogil:
        for m in range(M):
            g = -1.0
            for k in range(K):
                q = exps[k]
                s = 0.0
                for i in range(d):
                    z = 0.0
                    for j in range(d):
                        z += mats[k, i, j] * (Xa[m, j] - trans[k, j])
                    if q == 2.0:
                        s += z * z
                    elif q == 4.0:
                        z2 = z * z
                        s += z2 * z2
                    else:
                        s += pow(fabs(z), q)
                if s > g:
                    g = s
            out[m] = g
    return out


def chord_many(cnp.ndarray exps_a, cnp.ndarray mats_a, cnp.ndarray trans_a,
               bases, dirs, t_lo, t_hi, double tangent_tol, t_hint=None):
    cdef cnp.ndarray[double, ndim=1] exps = np.ascontiguousarray(exps_a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=3] mats = np.ascontiguousarray(mats_a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] trans = np.ascontiguousarray(trans_a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] B = np.ascontiguousarray(np.atleast_2d(bases), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] D = np.ascontiguousarray(np.atleast_2d(dirs), dtype=np.float64)
    cdef Py_ssize_t M = B.shape[0], d = B.shape[1], K = exps.shape[0]
    cdef cnp.ndarray[double, ndim=1] tlo = np.ascontiguousarray(
        np.broadcast_to(np.asarray(t_lo, dtype=np.float64), (M,)))
    cdef cnp.ndarray[double, ndim=1] thi = np.ascontiguousarray(
        np.broadcast_to(np.asarray(t_hi, dtype=np.float64), (M,)))
    cdef cnp.ndarray[double, ndim=1] hint
    if t_hint is None:
        hint = 0.5 * (tlo + thi)
    else:
        hint = np.ascontiguousarray(
            np.broadcast_to(np.asarray(t_hint, dtype=np.float64), (M,)))
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] status = np.empty(M, dtype=np.uint8)
    cdef cnp.ndarray[double, ndim=1] t_neg = np.empty(M, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] t_pos = np.empty(M, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] t_min = np.empty(M, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] g_min = np.empty(M, dtype=np.float64)
    cdef double* y0 = <double*> malloc(K * d * sizeof(double))
    cdef double* u = <double*> malloc(K * d * sizeof(double))
    if y0 == NULL or u == NULL:
        free(y0); free(u)
        raise MemoryError()
    cdef Py_ssize_t m
    cdef int st
    try:
        with nogil:
            for m in range(M):
                _line_cache(&mats[0, 0, 0], &trans[0, 0], &B[m, 0], &D[m, 0],
                            K, d, y0, u)
                st = _chord_one(y0, u, &exps[0], K, d, tlo[m], thi[m],
                                tangent_tol, hint[m],
                                &t_neg[m], &t_pos[m], &t_min[m], &g_min[m])
                status[m] = <cnp.uint8_t> st
    finally:
        free(y0)
        free(u)
    return status, t_neg, t_pos, t_min, g_min


def ray_many(cnp.ndarray exps_a, cnp.ndarray mats_a, cnp.ndarray trans_a,
             origins, dirs, t_hi):
    cdef cnp.ndarray[double, ndim=1] exps = np.ascontiguousarray(exps_a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=3] mats = np.ascontiguousarray(mats_a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] trans = np.ascontiguousarray(trans_a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] O = np.ascontiguousarray(np.atleast_2d(origins), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] D = np.ascontiguousarray(np.atleast_2d(dirs), dtype=np.float64)
    cdef Py_ssize_t M = O.shape[0], d = O.shape[1], K = exps.shape[0]
    cdef cnp.ndarray[double, ndim=1] thi = np.ascontiguousarray(
        np.broadcast_to(np.asarray(t_hi, dtype=np.float64), (M,)))
    cdef cnp.ndarray[double, ndim=1] out = np.empty(M, dtype=np.float64)
    cdef double* y0 = <double*> malloc(K * d * sizeof(double))
    cdef double* u = <double*> malloc(K * d * sizeof(double))
    if y0 == NULL or u == NULL:
        free(y0); free(u)
        raise MemoryError()
    cdef Py_ssize_t m
    cdef int it
    cdef double lo, hi, mid
    try:
        with nogil:
            for m in range(M):
                _line_cache(&mats[0, 0, 0], &trans[0, 0], &O[m, 0], &D[m, 0],
                            K, d, y0, u)
                if (_psi_line(y0, u, &exps[0], K, d, 0.0) >= 0.0 or
                        _psi_line(y0, u, &exps[0], K, d, thi[m]) <= 0.0):
                    out[m] = NAN
                    continue
                lo = 0.0
                hi = thi[m]
                for it in range(N_BISECT):
                    mid = 0.5 * (lo + hi)
                    if _psi_line(y0, u, &exps[0], K, d, mid) > 0.0:
                        hi = mid
                    else:
                        lo = mid
                out[m] = 0.5 * (lo + hi)
    finally:
        free(y0)
        free(u)
    return out


cdef void _inner_min(const double* comb, const double* zf, const double* exps,
                     Py_ssize_t K, Py_ssize_t d, double t_lo, double t_hi,
                     double* tm, double* fm) nogil:
    cdef double a = t_lo, b = t_hi, c, dd, fc, fd
    cdef int it
    c = b - INVPHI * (b - a)
    dd = a + INVPHI * (b - a)
    fc = _psi_line(comb, zf, exps, K, d, c)
    fd = _psi_line(comb, zf, exps, K, d, dd)
    for it in range(N_CLAMP_INNER):
        if fc < fd:
            b = dd
            dd = c
            fd = fc
            c = b - INVPHI * (b - a)
            fc = _psi_line(comb, zf, exps, K, d, c)
        else:
            a = c
            c = dd
            fc = fd
            dd = a + INVPHI * (b - a)
            fd = _psi_line(comb, zf, exps, K, d, dd)
    if fc < fd:
        tm[0] = c
        fm[0] = fc
    else:
        tm[0] = dd
        fm[0] = fd


def clamp_many(cnp.ndarray exps_a, cnp.ndarray mats_a, cnp.ndarray trans_a,
               p0, e, f, t_lo, t_hi, double tangent_tol):
    cdef cnp.ndarray[double, ndim=1] exps = np.ascontiguousarray(exps_a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=3] mats = np.ascontiguousarray(mats_a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] trans = np.ascontiguousarray(trans_a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] P = np.ascontiguousarray(np.atleast_2d(p0), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] E = np.ascontiguousarray(np.atleast_2d(e), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] F = np.ascontiguousarray(np.atleast_2d(f), dtype=np.float64)
    cdef Py_ssize_t M = P.shape[0], d = P.shape[1], K = exps.shape[0]
    cdef cnp.ndarray[double, ndim=1] tlo = np.ascontiguousarray(
        np.broadcast_to(np.asarray(t_lo, dtype=np.float64), (M,)))
    cdef cnp.ndarray[double, ndim=1] thi = np.ascontiguousarray(
        np.broadcast_to(np.asarray(t_hi, dtype=np.float64), (M,)))
    cdef cnp.ndarray[double, ndim=1] lam = np.empty(M, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] t_at = np.empty(M, dtype=np.float64)
    cdef double* z0 = <double*> malloc(K * d * sizeof(double))
    cdef double* ze = <double*> malloc(K * d * sizeof(double))
    cdef double* zf = <double*> malloc(K * d * sizeof(double))
    cdef double* comb = <double*> malloc(K * d * sizeof(double))
    if z0 == NULL or ze == NULL or zf == NULL or comb == NULL:
        free(z0); free(ze); free(zf); free(comb)
        raise MemoryError()
    cdef Py_ssize_t m, i
    cdef int it
    cdef double lo, hi, mid, tm, fm, t1, t2, t_left, level
    try:
        with nogil:
            for m in range(M):
                _line_cache(&mats[0, 0, 0], &trans[0, 0], &P[m, 0], &E[m, 0],
                            K, d, z0, ze)
                _line_cache(&mats[0, 0, 0], &trans[0, 0], &P[m, 0], &F[m, 0],
                            K, d, comb, zf)
                lo = 0.0
                hi = 1.0
                for it in range(N_CLAMP_OUTER):
                    mid = 0.5 * (lo + hi)
                    for i in range(K * d):
                        comb[i] = z0[i] + mid * ze[i]
                    _inner_min(comb, zf, &exps[0], K, d, tlo[m], thi[m],
                               &tm, &fm)
                    if fm <= 0.0:
                        lo = mid
                    else:
                        hi = mid
                for i in range(K * d):
                    comb[i] = z0[i] + lo * ze[i]
                _inner_min(comb, zf, &exps[0], K, d, tlo[m], thi[m], &tm, &fm)
                # midpoint of a slightly raised sublevel slice beats the
                # golden argmin positionally (see _chord_one)
                level = fm + (1e-12 if fabs(fm) < 1e-12 else fabs(fm))
                t1 = tlo[m]
                t2 = tm
                for it in range(N_BISECT):
                    mid = 0.5 * (t1 + t2)
                    if _psi_line(comb, zf, &exps[0], K, d, mid) > level:
                        t1 = mid
                    else:
                        t2 = mid
                t_left = 0.5 * (t1 + t2)
                t1 = tm
                t2 = thi[m]
                for it in range(N_BISECT):
                    mid = 0.5 * (t1 + t2)
                    if _psi_line(comb, zf, &exps[0], K, d, mid) > level:
                        t2 = mid
                    else:
                        t1 = mid
                tm = 0.5 * (t_left + 0.5 * (t1 + t2))
                lam[m] = lo
                t_at[m] = tm
    finally:
        free(z0)
        free(ze)
        free(zf)
        free(comb)
    return lam, t_at
