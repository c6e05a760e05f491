# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled spectrum hot kernel; same contract as ``_kernels_py``."""

import numpy as np


ctypedef double complex cplx

DEF MAXN = 8


cdef inline double _mag2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef int _solve_inplace(cplx* a, cplx* x, int n) nogil:
    """Pivoted Gaussian elimination on row-major ``a`` with rhs ``x``."""
    cdef int i, j, k, piv
    cdef double best, mag
    cdef cplx f, tmp
    for k in range(n):
        piv = k
        best = _mag2(a[k * n + k])
        for i in range(k + 1, n):
            mag = _mag2(a[i * n + k])
            if mag > best:
                best = mag
                piv = i
        if best == 0.0:
            return -1
        if piv != k:
            for j in range(k, n):
                tmp = a[k * n + j]
                a[k * n + j] = a[piv * n + j]
                a[piv * n + j] = tmp
            tmp = x[k]
            x[k] = x[piv]
            x[piv] = tmp
        for i in range(k + 1, n):
            f = a[i * n + k] / a[k * n + k]
            if f != 0:
                for j in range(k + 1, n):
                    a[i * n + j] = a[i * n + j] - f * a[k * n + j]
                x[i] = x[i] - f * x[k]
    for k in range(n - 1, -1, -1):
        f = x[k]
        for j in range(k + 1, n):
            f = f - a[k * n + j] * x[j]
        x[k] = f / a[k * n + k]
    return 0


def spectrum_batch(M, D, omega, int bdag_row, int b_row):
    """Spectral density at every frequency in ``omega`` (complex values)."""
    cdef const cplx[:, :] Mv = np.ascontiguousarray(M, dtype=complex)
    cdef const cplx[:, :] Dv = np.ascontiguousarray(D, dtype=complex)
    cdef const double[:] wv = np.ascontiguousarray(
        np.atleast_1d(omega), dtype=float)
    cdef int n = Mv.shape[0]
    if n > MAXN:
        raise ValueError(f"kernel supports matrices up to {MAXN}x{MAXN}")
    if not (0 <= bdag_row < n and 0 <= b_row < n):
        raise ValueError("row index out of range")
    out = np.empty(wv.shape[0], dtype=complex)
    cdef cplx[:] ov = out
    cdef cplx a[MAXN * MAXN]
    cdef cplx u[MAXN]
    cdef cplx v[MAXN]
    cdef cplx iw, acc, rowacc
    cdef int t, i, j, k, bad = 0
    with nogil:
        for t in range(wv.shape[0]):
            iw = 1j * wv[t]
            # (i*w*I - M)^T u = e_bdag  ->  u_k = chi(-w)[bdag_row, k]
            for j in range(n):
                for i in range(n):
                    a[j * n + i] = (iw if i == j else 0) - Mv[i, j]
                u[j] = 1.0 if j == bdag_row else 0.0
            if _solve_inplace(a, u, n) != 0:
                bad = 1
                break
            # (-i*w*I - M)^T v = e_b  ->  v_l = chi(w)[b_row, l]
            for j in range(n):
                for i in range(n):
                    a[j * n + i] = (-iw if i == j else 0) - Mv[i, j]
                v[j] = 1.0 if j == b_row else 0.0
            if _solve_inplace(a, v, n) != 0:
                bad = 1
                break
            acc = 0
            for k in range(n):
                rowacc = 0
                for j in range(n):
                    rowacc = rowacc + Dv[k, j] * v[j]
                acc = acc + u[k] * rowacc
            ov[t] = acc
    if bad:
        raise np.linalg.LinAlgError(
            "frequency coincides with an undamped resonance")
    return out
