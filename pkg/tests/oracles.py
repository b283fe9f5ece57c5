"""Independent reference results used to pin down the main code paths.

Everything here is computed through routes that share no code with the
package internals: plane-wave Fresnel reflection for the half-space
Casimir-Polder potential, and closed-form free-space results.
"""

import numpy as np
from numpy.polynomial.legendre import leggauss

from scipy.constants import c as C_LIGHT
from scipy.constants import epsilon_0 as EPS0
from scipy.constants import hbar as HBAR


def _gl(n, lo, hi):
    x, w = leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def half_space_green_iu(eps, u, ell, n_kt=200):
    """Scattered Green tensor of a dielectric half space at omega = i u.

    Coincident points a height ``ell`` above the surface.  Returns
    ``(g_tang, g_norm)``, the tangential and surface-normal diagonal
    elements in the same convention as the package (static limit:
    ``g_tang = - (eps-1)/(eps+1) c^2/(32 pi u^2 ell^3)``,
    ``g_norm = 2 g_tang``; both negative, which makes the off-resonant
    excited-state potential positive and the ground-state potential
    negative).
    """
    t, wt = _gl(n_kt, 0.0, np.pi / 2)
    kt = np.tan(t) / (2.0 * ell)
    wk = wt / (np.cos(t) ** 2 * (2.0 * ell))
    k1 = np.sqrt(kt**2 + (u / C_LIGHT) ** 2)
    k2 = np.sqrt(kt**2 + eps * (u / C_LIGHT) ** 2)
    r_s = (k1 - k2) / (k1 + k2)
    r_p = (eps * k1 - k2) / (eps * k1 + k2)
    damp = np.exp(-2.0 * k1 * ell)
    g_tang = (1.0 / (8.0 * np.pi)) * np.sum(
        wk * kt * damp * (r_s / k1 - (k1 * C_LIGHT**2 / u**2) * r_p))
    g_norm = -(C_LIGHT**2 / (4.0 * np.pi * u**2)) * np.sum(
        wk * (kt**3 / k1) * r_p * damp)
    return g_tang, g_norm


def half_space_ground_potential(eps, omega0, d_tang_sq, d_norm_sq, ell,
                                n_u=80, n_kt=200):
    """Ground-state Casimir-Polder potential near a dielectric half space.

    ``d_tang_sq``/``d_norm_sq`` are |d|^2 projections onto the surface
    plane and normal.  Uses the imaginary-frequency integral with the
    two-level susceptibility omega0 / (omega0^2 + u^2).
    """
    th, wth = _gl(n_u, 0.0, np.pi / 2)
    total = 0.0
    for t, w in zip(th, wth):
        u = omega0 * np.tan(t)
        g_tang, g_norm = half_space_green_iu(eps, u, ell, n_kt)
        total += w * omega0 * np.tan(t) ** 2 * (
            d_tang_sq * g_tang + d_norm_sq * g_norm)
    # U_g = -U_e_off with U_e_off = -(omega0/pi eps0 c^2) * integral
    return (omega0 / (np.pi * EPS0 * C_LIGHT**2)) * total


def half_space_static_constant(eps, d_sq, d_norm_sq):
    """Nonretarded limit: U = const / ell^3 with this constant."""
    return -((eps - 1.0) / (eps + 1.0)) * (d_sq + d_norm_sq) / (
        64.0 * np.pi * EPS0)


def free_space_rate(omega, d_sq):
    """Free-space spontaneous-emission rate for |d|^2 = d_sq."""
    return d_sq * omega**3 / (3.0 * np.pi * EPS0 * HBAR * C_LIGHT**3)
