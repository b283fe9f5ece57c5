"""Spontaneous-emission rates near the fiber.

The decay rate splits into a discrete guided part (sum over guided
modes, directions and circulation indices) and a continuum radiation
part (integral over the axial wavenumber, summed over azimuthal orders
and the two channels).  Couplings are

    G_guided = sqrt(omega beta' / 4 pi eps0 hbar) (d . e),
    G_rad    = sqrt(omega / 4 pi eps0 hbar)       (d . e),

with the mode functions normalized as in :mod:`fiberforce.modes` and
:mod:`fiberforce.radiation`; rates are ``2 pi sum |G|^2`` (discrete sum
and/or beta integral as appropriate).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .constants import C_LIGHT, EPS0, HBAR
from .drive import mode_components
from .errors import InsideFiber
from .modes import FiberSpec, GuidedMode, list_guided_modes, solve_mode
from .radiation import RadiationChannels


def gamma_free(omega: float, dipole) -> float:
    """Free-space decay rate for dipole matrix element ``dipole``."""
    d2 = float(np.sum(np.abs(np.asarray(dipole)) ** 2))
    return omega**3 * d2 / (3.0 * np.pi * EPS0 * HBAR * C_LIGHT**3)


def dipole_from_linewidth(omega: float, gamma0: float) -> float:
    """Reduced dipole matrix element giving free-space rate ``gamma0``."""
    return np.sqrt(3.0 * np.pi * EPS0 * HBAR * C_LIGHT**3 * gamma0 / omega**3)


@dataclass
class GuidedRateEntry:
    """Decay rate into one guided mode and direction (summed over p)."""

    label: str
    family: str
    l: int
    m: int
    f: int
    beta: float
    gamma: float


@dataclass
class RateResult:
    """Decay-rate breakdown at one position."""

    guided: List[GuidedRateEntry]
    gamma_guided: float
    gamma_rad: float

    @property
    def total(self) -> float:
        return self.gamma_guided + self.gamma_rad


def _check_exterior(fiber: FiberSpec, r: float):
    if r < fiber.radius_a:
        raise InsideFiber(f"atom radius {r:.4g} m is inside the fiber")


def guided_rates(fiber: FiberSpec, omega: float, dipole, r: float
                 ) -> List[GuidedRateEntry]:
    """Directional decay rates into every guided mode at ``omega``.

    ``dipole`` holds the cylindrical components (d_r, d_phi, d_z) of the
    transition dipole at the atom position.  The rate is independent of
    the atom azimuth once the dipole is expressed this way.
    """
    _check_exterior(fiber, r)
    d = np.asarray(dipole, dtype=complex)
    entries = []
    for mid in list_guided_modes(fiber, omega, include_directions=False):
        mode = solve_mode(fiber, omega, mid.family, mid.l, mid.m)
        pref = omega * mode.beta_prime / (4.0 * np.pi * EPS0 * HBAR)
        ps = (+1, -1) if mid.family in ("HE", "EH") else (0,)
        for f in (+1, -1):
            g2 = 0.0
            for p in ps:
                e = np.array(mode_components(mode, f, p, r))
                g2 += pref * abs(np.dot(d, e)) ** 2
            entries.append(GuidedRateEntry(
                mid.label, mid.family, mid.l, mid.m, f,
                mode.beta, 2.0 * np.pi * g2))
    return entries


def _auto_lmax(fiber: FiberSpec, omega: float, r: float) -> int:
    krn = omega / C_LIGHT * fiber.n2 * r
    return int(np.ceil(krn + 12 + 0.1 * krn))


def radiation_beta_grid(fiber: FiberSpec, omega: float, n_nodes: int = 200):
    """Quadrature nodes and weights covering |beta| < k n2.

    Uses the substitution beta = k n2 sin(theta), which resolves the
    square-root edge behavior of the continuum at the light line.
    """
    k2 = omega / C_LIGHT * fiber.n2
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    th = 0.5 * np.pi * x
    return k2 * np.sin(th), 0.5 * np.pi * k2 * np.cos(th) * w


def radiation_beta_density(fiber: FiberSpec, omega: float, dipole, r: float,
                           lmax: Optional[int] = None, n_nodes: int = 200):
    """Beta-resolved radiative decay density and its quadrature grid.

    Returns ``(beta, weights, density)``; ``gamma_rad`` is
    ``sum(weights * density)`` and the axial recoil integrand follows by
    inserting ``hbar * beta``.
    """
    _check_exterior(fiber, r)
    d = np.asarray(dipole, dtype=complex)
    if lmax is None:
        lmax = _auto_lmax(fiber, omega, r)
    beta, wts = radiation_beta_grid(fiber, omega, n_nodes)
    pref = 2.0 * np.pi * omega / (4.0 * np.pi * EPS0 * HBAR)
    density = np.zeros_like(beta)
    for l in range(-lmax, lmax + 1):
        rc = RadiationChannels(fiber, omega, beta, l)
        er, ephi, ez = rc.exterior_field(r)
        de = d[0] * er + d[1] * ephi + d[2] * ez  # (n, 2)
        density += pref * np.sum(np.abs(de) ** 2, axis=1)
    return beta, wts, density


def radiation_rate(fiber: FiberSpec, omega: float, dipole, r: float,
                   lmax: Optional[int] = None, n_nodes: int = 200) -> float:
    """Total decay rate into radiation modes."""
    beta, wts, density = radiation_beta_density(
        fiber, omega, dipole, r, lmax=lmax, n_nodes=n_nodes)
    return float(np.sum(wts * density))


def decay_rates(fiber: FiberSpec, omega: float, dipole, r: float,
                lmax: Optional[int] = None, n_nodes: int = 200) -> RateResult:
    """Full guided + radiation decay-rate breakdown at radius ``r``."""
    guided = guided_rates(fiber, omega, dipole, r)
    g_sum = sum(e.gamma for e in guided)
    g_rad = radiation_rate(fiber, omega, dipole, r, lmax=lmax, n_nodes=n_nodes)
    return RateResult(guided, g_sum, g_rad)
