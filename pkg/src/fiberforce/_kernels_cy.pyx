# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython batched 4x4 complex solver (hot kernel).

Mirrors the NumPy fallback operation-for-operation (same pivoting rule,
same complex multiply/divide formulas) so both backends produce bitwise
identical results.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


cdef inline void _cdiv(double ar, double ai, double br, double bi,
                       double *xr, double *xi) noexcept nogil:
    cdef double t, den
    if (br if br >= 0 else -br) >= (bi if bi >= 0 else -bi):
        t = bi / br
        den = br + bi * t
        xr[0] = (ar + ai * t) / den
        xi[0] = (ai - ar * t) / den
    else:
        t = br / bi
        den = bi + br * t
        xr[0] = (ar * t + ai) / den
        xi[0] = (ai * t - ar) / den


def solve_4x2(a, b):
    """Solve ``a @ x = b`` for stacks of 4x4 systems with 2 RHS columns."""
    cdef cnp.ndarray[cnp.float64_t, ndim=3] ar = np.ascontiguousarray(a.real, dtype=np.float64).copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=3] ai = np.ascontiguousarray(a.imag, dtype=np.float64).copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=3] br = np.ascontiguousarray(b.real, dtype=np.float64).copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=3] bi = np.ascontiguousarray(b.imag, dtype=np.float64).copy()
    cdef Py_ssize_t n = ar.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=3] xr = np.empty((n, 4, 2), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=3] xi = np.empty((n, 4, 2), dtype=np.float64)

    cdef Py_ssize_t s, k, i, j, col, piv
    cdef double mag, best, tmp, fr, fi, pr, pi, sr, si

    with nogil:
        for s in range(n):
            for k in range(4):
                best = ar[s, k, k] * ar[s, k, k] + ai[s, k, k] * ai[s, k, k]
                piv = k
                for i in range(k + 1, 4):
                    mag = ar[s, i, k] * ar[s, i, k] + ai[s, i, k] * ai[s, i, k]
                    if mag > best:
                        best = mag
                        piv = i
                if piv != k:
                    for j in range(4):
                        tmp = ar[s, k, j]; ar[s, k, j] = ar[s, piv, j]; ar[s, piv, j] = tmp
                        tmp = ai[s, k, j]; ai[s, k, j] = ai[s, piv, j]; ai[s, piv, j] = tmp
                    for j in range(2):
                        tmp = br[s, k, j]; br[s, k, j] = br[s, piv, j]; br[s, piv, j] = tmp
                        tmp = bi[s, k, j]; bi[s, k, j] = bi[s, piv, j]; bi[s, piv, j] = tmp
                for i in range(k + 1, 4):
                    _cdiv(ar[s, i, k], ai[s, i, k], ar[s, k, k], ai[s, k, k], &fr, &fi)
                    for j in range(k + 1, 4):
                        pr = fr * ar[s, k, j] - fi * ai[s, k, j]
                        pi = fr * ai[s, k, j] + fi * ar[s, k, j]
                        ar[s, i, j] = ar[s, i, j] - pr
                        ai[s, i, j] = ai[s, i, j] - pi
                    for j in range(2):
                        pr = fr * br[s, k, j] - fi * bi[s, k, j]
                        pi = fr * bi[s, k, j] + fi * br[s, k, j]
                        br[s, i, j] = br[s, i, j] - pr
                        bi[s, i, j] = bi[s, i, j] - pi
            for k in range(3, -1, -1):
                for col in range(2):
                    sr = br[s, k, col]
                    si = bi[s, k, col]
                    for j in range(k + 1, 4):
                        pr = ar[s, k, j] * xr[s, j, col] - ai[s, k, j] * xi[s, j, col]
                        pi = ar[s, k, j] * xi[s, j, col] + ai[s, k, j] * xr[s, j, col]
                        sr = sr - pr
                        si = si - pi
                    _cdiv(sr, si, ar[s, k, k], ai[s, k, k],
                          &xr[s, k, col], &xi[s, k, col])

    return xr + 1j * xi
