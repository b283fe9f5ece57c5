"""Pure-NumPy batched 4x4 complex solver (fallback kernel).

Solves many independent 4x4 complex systems with two right-hand sides,
as needed per axial-wavenumber node when matching boundary conditions on
the cylinder surface.

The arithmetic is written out on separate real/imaginary float64 arrays,
with Smith's algorithm for complex division, so that results are bitwise
identical to the Cython kernel (same operation ordering, no FMA).
"""

import numpy as np

BACKEND = "numpy"


def _cmul(ar, ai, br, bi):
    return ar * br - ai * bi, ar * bi + ai * br


def _cdiv(ar, ai, br, bi):
    # Smith's algorithm, branch chosen per element.
    big_r = np.abs(br) >= np.abs(bi)
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = bi / br
        den1 = br + bi * t1
        x1 = (ar + ai * t1) / den1
        y1 = (ai - ar * t1) / den1
        t2 = br / bi
        den2 = bi + br * t2
        x2 = (ar * t2 + ai) / den2
        y2 = (ai * t2 - ar) / den2
    return np.where(big_r, x1, x2), np.where(big_r, y1, y2)


def solve_4x2(a, b):
    """Solve ``a @ x = b`` for stacks of 4x4 systems with 2 RHS columns.

    Parameters
    ----------
    a : (n, 4, 4) complex ndarray
    b : (n, 4, 2) complex ndarray

    Returns
    -------
    (n, 4, 2) complex ndarray
    """
    ar = np.ascontiguousarray(a.real, dtype=np.float64).copy()
    ai = np.ascontiguousarray(a.imag, dtype=np.float64).copy()
    br = np.ascontiguousarray(b.real, dtype=np.float64).copy()
    bi = np.ascontiguousarray(b.imag, dtype=np.float64).copy()
    n = ar.shape[0]
    idx = np.arange(n)

    for k in range(4):
        # Partial pivoting on squared magnitude (first maximal row wins).
        mag = ar[:, k:, k] ** 2 + ai[:, k:, k] ** 2
        piv = k + np.argmax(mag, axis=1)
        swap = piv != k
        if np.any(swap):
            rows = idx[swap]
            prows = piv[swap]
            for arr in (ar, ai):
                tmp = arr[rows, k, :].copy()
                arr[rows, k, :] = arr[rows, prows, :]
                arr[rows, prows, :] = tmp
            for arr in (br, bi):
                tmp = arr[rows, k, :].copy()
                arr[rows, k, :] = arr[rows, prows, :]
                arr[rows, prows, :] = tmp
        for i in range(k + 1, 4):
            fr, fi = _cdiv(ar[:, i, k], ai[:, i, k], ar[:, k, k], ai[:, k, k])
            for j in range(k + 1, 4):
                pr, pi = _cmul(fr, fi, ar[:, k, j], ai[:, k, j])
                ar[:, i, j] = ar[:, i, j] - pr
                ai[:, i, j] = ai[:, i, j] - pi
            for j in range(2):
                pr, pi = _cmul(fr, fi, br[:, k, j], bi[:, k, j])
                br[:, i, j] = br[:, i, j] - pr
                bi[:, i, j] = bi[:, i, j] - pi

    xr = np.empty_like(br)
    xi = np.empty_like(bi)
    for k in range(3, -1, -1):
        sr = br[:, k, :].copy()
        si = bi[:, k, :].copy()
        for j in range(k + 1, 4):
            for col in range(2):
                pr, pi = _cmul(ar[:, k, j], ai[:, k, j], xr[:, j, col], xi[:, j, col])
                sr[:, col] = sr[:, col] - pr
                si[:, col] = si[:, col] - pi
        for col in range(2):
            xr[:, k, col], xi[:, k, col] = _cdiv(
                sr[:, col], si[:, col], ar[:, k, k], ai[:, k, k]
            )
    return xr + 1j * xi
