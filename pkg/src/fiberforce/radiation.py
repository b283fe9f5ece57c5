"""Radiation modes of the fiber: the non-guided continuum.

For an axial wavenumber beta with ``|beta| < k n2`` the field oscillates
radially everywhere: Bessel J inside the core, a standing-wave mix of J
and Y outside.  Matching the four tangential components at the surface
leaves a two-parameter family per (omega, beta, l); it is organized here
into two orthogonal channels normalized to a delta function in beta.

The exterior solve uses the (J, Y) basis rather than outgoing/incoming
Hankel amplitudes: the two Hankel columns are numerically parallel
whenever Y dominates (small q a or large |l|), while J and Y stay
independent.  With C1 = (C_J - i C_Y)/2 and C2 = (C_J + i C_Y)/2 the
continuum normalization derived from the large-radius Hankel
asymptotics,

    n2^2 (|C1|^2 + |C2|^2) + Z0^2 (|D1|^2 + |D2|^2) = q^2 / (4 pi omega),

becomes a plain Euclidean constraint on ``v = (n2 C_J, n2 C_Y, Z0 D_J,
Z0 D_Y)``:  ``|v|^2 = q^2 / (2 pi omega)``; the channel inner product
reduces the same way, so orthogonalization happens directly on v.  The
boundary solve is batched over beta nodes through the 4x4 kernel.
"""

from __future__ import annotations

import numpy as np
from scipy.special import jv, jvp, yv, yvp

from .constants import C_LIGHT, EPS0, MU0
from .errors import EvanescentBeta
from .kernels import solve_4x2
from .modes import FiberSpec

_Z0 = np.sqrt(MU0 / EPS0)


class RadiationChannels:
    """Delta-normalized radiation channels at fixed (omega, l).

    Vectorized over an array of axial wavenumbers ``beta``; exposes the
    matched coefficients and field evaluators for both channels p = 1, 2.

    Attributes
    ----------
    ab : (n, 2, 2) complex ndarray
        Interior axial coefficients (A, B) per beta node and channel.
    cd : (n, 2, 4) complex ndarray
        Exterior coefficients (C_J, C_Y, D_J, D_Y) in the J/Y basis.
    """

    def __init__(self, fiber: FiberSpec, omega: float, beta, l: int):
        beta = np.atleast_1d(np.asarray(beta, dtype=float))
        k = omega / C_LIGHT
        if np.any(np.abs(beta) >= k * fiber.n2):
            raise EvanescentBeta(
                "radiation modes require |beta| < k n2; "
                f"max |beta|/k = {np.max(np.abs(beta)) / k:.6g}")
        self.fiber = fiber
        self.omega = float(omega)
        self.beta = beta
        self.l = int(l)
        self.h = np.sqrt(k**2 * fiber.n1**2 - beta**2)
        self.q = np.sqrt(k**2 * fiber.n2**2 - beta**2)
        self._match()

    def _match(self):
        fiber, omega, l = self.fiber, self.omega, self.l
        a = fiber.radius_a
        beta, h, q = self.beta, self.h, self.q
        n = beta.size
        u, w = h * a, q * a
        ju, dju = jv(l, u), jvp(l, u)
        jw, djw = jv(l, w), jvp(l, w)
        yw, dyw = yv(l, w), yvp(l, w)

        # Deep inside the centrifugal barrier (|l| >> q a) the surface Y
        # values grow without bound; once they threaten the float range
        # of the boundary solve, the physical channel amplitude anywhere
        # near the fiber is negligible beyond any tolerance used here,
        # so those nodes are matched on a dummy system and zeroed.
        with np.errstate(invalid="ignore", over="ignore"):
            ymag = np.abs(yw) + np.abs(dyw)
        dead = ~np.isfinite(ymag) | (ymag > 1e120)
        if np.any(dead):
            ju = np.where(dead, 1.0, ju)
            dju = np.where(dead, 0.0, dju)
            jw = np.where(dead, 1.0, jw)
            djw = np.where(dead, 0.0, djw)
            yw = np.where(dead, 1.0, yw)
            dyw = np.where(dead, 1.0, dyw)
        self._dead = dead

        we_mu = omega * MU0
        we1 = omega * EPS0 * fiber.n1**2
        we2 = omega * EPS0 * fiber.n2**2
        bl_o = beta * l / (a * q**2)
        bl_i = beta * l / (a * h**2)

        # rows: Ez, Hz, Ephi, Hphi; columns: C_J, C_Y, D_J, D_Y
        mat = np.zeros((n, 4, 4), dtype=complex)
        rhs = np.zeros((n, 4, 2), dtype=complex)
        mat[:, 0, 0], mat[:, 0, 1] = jw, yw
        mat[:, 1, 2], mat[:, 1, 3] = jw, yw
        mat[:, 2, 0], mat[:, 2, 1] = -bl_o * jw, -bl_o * yw
        mat[:, 2, 2], mat[:, 2, 3] = -1j * we_mu * djw / q, -1j * we_mu * dyw / q
        mat[:, 3, 0], mat[:, 3, 1] = 1j * we2 * djw / q, 1j * we2 * dyw / q
        mat[:, 3, 2], mat[:, 3, 3] = -bl_o * jw, -bl_o * yw
        # RHS columns: basis excitations (A, B) = (1, 0) and (0, 1)
        rhs[:, 0, 0] = ju
        rhs[:, 1, 1] = ju
        rhs[:, 2, 0] = -bl_i * ju
        rhs[:, 2, 1] = -1j * we_mu * dju / h
        rhs[:, 3, 0] = 1j * we1 * dju / h
        rhs[:, 3, 1] = -bl_i * ju

        x = solve_4x2(mat, rhs)  # (n, 4, 2): exterior coeffs per basis

        scale = np.array([fiber.n2, fiber.n2, _Z0, _Z0])
        v = x * scale[None, :, None]
        ip11 = np.sum(np.abs(v[:, :, 0]) ** 2, axis=1)
        ip12 = np.sum(np.conj(v[:, :, 0]) * v[:, :, 1], axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            proj = ip12 / ip11
            v2 = v[:, :, 1] - proj[:, None] * v[:, :, 0]
            ip22 = np.sum(np.abs(v2) ** 2, axis=1)

            target = q**2 / (2.0 * np.pi * omega)
            s1 = np.sqrt(target / ip11)
            s2 = np.sqrt(target / ip22)

            # Interior (A, B) and exterior (C, D) per channel.
            self.ab = np.zeros((n, 2, 2), dtype=complex)
            self.ab[:, 0, 0] = s1
            self.ab[:, 1, 0] = -s2 * proj
            self.ab[:, 1, 1] = s2
            self.cd = np.zeros((n, 2, 4), dtype=complex)
            self.cd[:, 0, :] = s1[:, None] * x[:, :, 0]
            self.cd[:, 1, :] = s2[:, None] * (x[:, :, 1]
                                              - proj[:, None] * x[:, :, 0])

        bad = self._dead | ~np.all(np.isfinite(self.ab), axis=(1, 2)) \
            | ~np.all(np.isfinite(self.cd), axis=(1, 2))
        if np.any(bad):
            self.ab[bad] = 0.0
            self.cd[bad] = 0.0

    # -- field evaluation -----------------------------------------------

    def exterior_field(self, r: float):
        """Electric components (e_r, e_phi, e_z) at exterior radius r.

        Returns three arrays of shape (n_beta, 2), the trailing axis
        being the channel index.
        """
        if r < self.fiber.radius_a:
            raise ValueError("exterior_field requires r >= fiber radius")
        omega, l = self.omega, self.l
        beta, q = self.beta[:, None], self.q[:, None]
        x = q * r
        with np.errstate(invalid="ignore", over="ignore"):
            zs = np.stack([jv(l, x), yv(l, x)], axis=-1)  # (n, 1, 2)
            dzs = np.stack([jvp(l, x), yvp(l, x)], axis=-1)
            fin = np.all(np.isfinite(zs) & np.isfinite(dzs), axis=2)
        zs = np.where(fin[..., None], zs, 0.0)
        dzs = np.where(fin[..., None], dzs, 0.0)
        c = self.cd[:, :, 0:2]  # (n, 2ch, 2basis)
        d = self.cd[:, :, 2:4]
        ez = np.sum(c * zs, axis=2)
        dez = np.sum(c * q[..., None] * dzs, axis=2)
        hz = np.sum(d * zs, axis=2)
        dhz = np.sum(d * q[..., None] * dzs, axis=2)
        we_mu = omega * MU0
        er = (1j / q**2) * (beta * dez + 1j * we_mu * l * hz / r)
        ephi = (1j / q**2) * (1j * beta * l * ez / r - we_mu * dhz)
        return er, ephi, ez

    def interior_field(self, r: float):
        """Electric components (e_r, e_phi, e_z) at interior radius r."""
        if r > self.fiber.radius_a:
            raise ValueError("interior_field requires r <= fiber radius")
        omega, l = self.omega, self.l
        beta, h = self.beta[:, None], self.h[:, None]
        x = h * r
        z, dz = jv(l, x), jvp(l, x)
        A = self.ab[:, :, 0]
        B = self.ab[:, :, 1]
        ez = A * z
        dez = A * h * dz
        hz = B * z
        dhz = B * h * dz
        we_mu = omega * MU0
        er = (1j / h**2) * (beta * dez + 1j * we_mu * l * hz / r)
        ephi = (1j / h**2) * (1j * beta * l * ez / r - we_mu * dhz)
        return er, ephi, ez

    def field(self, r: float):
        """Electric components at any radius (interior or exterior)."""
        if r < self.fiber.radius_a:
            return self.interior_field(r)
        return self.exterior_field(r)
