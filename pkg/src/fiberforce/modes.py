"""Guided modes of a vacuum-clad step-index fiber.

Solves the exact two-layer eigenvalue problem for HE/EH/TE/TM modes and
evaluates the normalized vector profile functions (electric and magnetic)
built from Bessel J inside the core and modified Bessel K outside.

Conventions
-----------
Profile functions refer to the reference mode with forward propagation
(f = +1) and counterclockwise circulation (p = +1); the components of the
(f, p) mode are ``(e_r, p*e_phi, f*e_z)`` with phase factor
``exp(i(f*beta*z + p*l*phi))``.  The overall phase is fixed by making
``e_r`` real and positive just outside the surface, which puts ``e_phi``
and ``e_z`` in quadrature with ``e_r`` for hybrid and TM modes.

The azimuthal-profile normalization is
``2*pi * int n_ref^2 |e|^2 r dr = 1``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np
from scipy import integrate, optimize
from scipy.special import jv, jvp, kv, kvp

from .constants import C_LIGHT, EPS0, MU0
from .errors import ModeBelowCutoff, NoConvergence

Family = Literal["HE", "EH", "TE", "TM"]

_BRACKET_POINTS = 10_000
_EDGE = 1e-9  # relative clearance from the light lines


@dataclass(frozen=True)
class FiberSpec:
    """Step-index fiber geometry: radius and core/cladding indices."""

    radius_a: float
    n1: float
    n2: float = 1.0

    def __post_init__(self):
        if not self.radius_a > 0:
            raise ValueError("radius_a must be positive")
        if not (self.n1 > self.n2 >= 1.0):
            raise ValueError("indices must satisfy n1 > n2 >= 1")

    def v_number(self, omega: float) -> float:
        """Normalized frequency V = k a sqrt(n1^2 - n2^2)."""
        k = omega / C_LIGHT
        return k * self.radius_a * np.sqrt(self.n1**2 - self.n2**2)

    def n_ref(self, r):
        """Refractive index profile n(r)."""
        return np.where(np.asarray(r) < self.radius_a, self.n1, self.n2)


@dataclass(frozen=True)
class GuidedModeId:
    """Discrete guided-mode label (family, azimuthal and radial orders,
    propagation direction f, polarization/circulation index p)."""

    family: Family
    l: int
    m: int
    f: int = +1
    p: int = +1

    def __post_init__(self):
        if self.family in ("TE", "TM"):
            if self.l != 0 or self.p != 0:
                raise ValueError(f"{self.family} modes require l = 0 and p = 0")
        else:
            if self.l < 1 or self.p not in (+1, -1):
                raise ValueError("hybrid modes require l >= 1 and p = +/-1")
        if self.m < 1:
            raise ValueError("radial order m starts at 1")
        if self.f not in (+1, -1):
            raise ValueError("propagation direction f must be +/-1")

    @property
    def label(self) -> str:
        return f"{self.family}{self.l}{self.m}"


# ----------------------------------------------------------------------
# Characteristic equations
# ----------------------------------------------------------------------

def _char_terms(fiber: FiberSpec, omega: float, l: int, beta: float):
    """Common ingredients of the eigenvalue equations at this beta."""
    k = omega / C_LIGHT
    a = fiber.radius_a
    h = np.sqrt(k**2 * fiber.n1**2 - beta**2)
    q = np.sqrt(beta**2 - k**2 * fiber.n2**2)
    u = h * a
    w = q * a
    # jv zeros are poles of the characteristic function; the resulting
    # infinities just flip the sign seen by the bracketing scan
    with np.errstate(divide="ignore"):
        a1 = jvp(l, u) / (u * jv(l, u))
        b1 = kvp(l, w) / (w * kv(l, w))
    return u, w, a1, b1


def characteristic(fiber: FiberSpec, omega: float, family: Family, l: int,
                   beta) -> Tuple[float, float]:
    """Characteristic function and its magnitude scale at ``beta``.

    Returns ``(value, scale)``; a guided mode corresponds to a zero of
    ``value`` and ``abs(value)/scale`` is the relative residual.
    Accepts scalar or array ``beta``.
    """
    n1sq, n2sq = fiber.n1**2, fiber.n2**2
    k = omega / C_LIGHT
    if family == "TE":
        u, w, a1, b1 = _char_terms(fiber, omega, 0, beta)
        val = a1 + b1
        scale = np.maximum(np.abs(a1), np.abs(b1))
    elif family == "TM":
        u, w, a1, b1 = _char_terms(fiber, omega, 0, beta)
        val = n1sq * a1 + n2sq * b1
        scale = np.maximum(np.abs(n1sq * a1), np.abs(n2sq * b1))
    else:
        u, w, a1, b1 = _char_terms(fiber, omega, l, beta)
        rhs = l**2 * (np.asarray(beta) / k) ** 2 * (1.0 / u**2 + 1.0 / w**2) ** 2
        disc = np.sqrt(((n1sq - n2sq) * b1) ** 2 + 4.0 * n1sq * rhs)
        sign = +1.0 if family == "EH" else -1.0
        branch = (-(n1sq + n2sq) * b1 + sign * disc) / (2.0 * n1sq)
        val = a1 - branch
        scale = np.maximum(np.maximum(np.abs(a1), np.abs(branch)), 1e-300)
    return val, scale


def _family_roots(fiber: FiberSpec, omega: float, family: Family, l: int):
    """All propagation constants of one (family, l), sorted by descending
    beta (i.e. by radial order m = 1, 2, ...)."""
    k = omega / C_LIGHT
    lo = k * fiber.n2 * (1.0 + _EDGE)
    hi = k * fiber.n1 * (1.0 - _EDGE)
    grid = np.linspace(lo, hi, _BRACKET_POINTS)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = characteristic(fiber, omega, family, l, grid)[0]
    roots = []
    sign = np.sign(vals)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        try:
            root = optimize.brentq(
                lambda b: characteristic(fiber, omega, family, l, b)[0],
                grid[i], grid[i + 1], xtol=1e-13 * k, rtol=8.9e-16, maxiter=200,
            )
        except (ValueError, RuntimeError) as exc:  # pragma: no cover
            raise NoConvergence(f"root refinement failed for {family}{l}") from exc
        val, scale = characteristic(fiber, omega, family, l, root)
        if abs(val) < 1e-8 * scale:  # rejects sign flips at J_l poles
            roots.append(root)
    return sorted(roots, reverse=True)


def solve_dispersion(fiber: FiberSpec, omega: float, family: Family, l: int,
                     m: int) -> float:
    """Propagation constant beta of the requested guided mode.

    Raises
    ------
    ModeBelowCutoff
        If fewer than ``m`` roots exist for this family and order.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    roots = _cached_roots(fiber, omega, family, l)
    if len(roots) < m:
        raise ModeBelowCutoff(
            f"{family}{l}{m} not guided at omega={omega:.6g} rad/s "
            f"(V={fiber.v_number(omega):.4g})"
        )
    return roots[m - 1]


@functools.lru_cache(maxsize=4096)
def _cached_roots_key(fiber: FiberSpec, omega: float, family: Family, l: int):
    return tuple(_family_roots(fiber, omega, family, l))


def _cached_roots(fiber, omega, family, l):
    return _cached_roots_key(fiber, float(omega), family, int(l))


def list_guided_modes(fiber: FiberSpec, omega: float, include_directions=True):
    """Every guided mode supported at ``omega``.

    Returns GuidedModeId entries ordered by (family, l, m, f, p); with
    ``include_directions=False`` only the (family, l, m) triples with
    f=+1 and a single polarization entry are listed.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    triples = []
    for family in ("HE", "EH"):
        l = 1
        while True:
            roots = _cached_roots(fiber, omega, family, l)
            if not roots:
                break
            triples.extend((family, l, m) for m in range(1, len(roots) + 1))
            l += 1
    for family in ("TE", "TM"):
        roots = _cached_roots(fiber, omega, family, 0)
        triples.extend((family, 0, m) for m in range(1, len(roots) + 1))

    order = {"HE": 0, "EH": 1, "TE": 2, "TM": 3}
    triples.sort(key=lambda t: (order[t[0]], t[1], t[2]))
    out = []
    for family, l, m in triples:
        ps = (+1, -1) if family in ("HE", "EH") else (0,)
        fs = (+1, -1) if include_directions else (+1,)
        for f in fs:
            for p in (ps if include_directions else ps[:1]):
                out.append(GuidedModeId(family, l, m, f, p))
    return out


# ----------------------------------------------------------------------
# Mode profiles
# ----------------------------------------------------------------------

def _zsecond(kind, l, x, z, dz):
    """Second derivative of J_l or K_l from the Bessel ODE."""
    if kind == "J":
        return -dz / x - (1.0 - l**2 / x**2) * z
    return -dz / x + (1.0 + l**2 / x**2) * z


class GuidedMode:
    """A solved guided mode: dispersion data plus profile evaluators.

    Immutable after construction; profile methods are pure functions of r
    and return the reference-mode (f=+1, p=+1) cylindrical components.
    """

    def __init__(self, fiber: FiberSpec, family: Family, l: int, m: int,
                 omega: float):
        self.fiber = fiber
        self.family = family
        self.l = l
        self.m = m
        self.omega = float(omega)
        self.beta = solve_dispersion(fiber, omega, family, l, m)
        k = omega / C_LIGHT
        self.h = np.sqrt(k**2 * fiber.n1**2 - self.beta**2)
        self.q = np.sqrt(self.beta**2 - k**2 * fiber.n2**2)
        self._coeffs = self._boundary_coefficients()
        self._apply_normalization()
        self._beta_prime = None

    # -- construction ---------------------------------------------------

    def _boundary_matrix(self):
        fiber, l, beta, omega = self.fiber, self.l, self.beta, self.omega
        a = fiber.radius_a
        u, w = self.h * a, self.q * a
        ju, dju = jv(l, u), jvp(l, u)
        kw, dkw = kv(l, w), kvp(l, w)
        ki2, ko2 = self.h**2, -self.q**2
        we_mu = omega * MU0
        we1 = omega * EPS0 * fiber.n1**2
        we2 = omega * EPS0 * fiber.n2**2
        # columns: A (Ez in), B (Hz in), C (Ez out), D (Hz out)
        rows = np.zeros((4, 4), dtype=complex)
        rows[0] = [ju, 0.0, -kw, 0.0]                      # Ez continuity
        rows[1] = [0.0, ju, 0.0, -kw]                      # Hz continuity
        rows[2] = [                                         # Ephi continuity
            (1j / ki2) * (1j * beta * l * ju / a),
            (1j / ki2) * (-we_mu * self.h * dju),
            -(1j / ko2) * (1j * beta * l * kw / a),
            -(1j / ko2) * (-we_mu * self.q * dkw),
        ]
        rows[3] = [                                         # Hphi continuity
            (1j / ki2) * (we1 * self.h * dju),
            (1j / ki2) * (1j * beta * l * ju / a),
            -(1j / ko2) * (we2 * self.q * dkw),
            -(1j / ko2) * (1j * beta * l * kw / a),
        ]
        return rows

    def _boundary_coefficients(self):
        a = self.fiber.radius_a
        u, w = self.h * a, self.q * a
        if self.family == "TE":
            vec = np.array([0.0, 1.0, 0.0, jv(0, u) / kv(0, w)], dtype=complex)
        elif self.family == "TM":
            vec = np.array([1.0, 0.0, jv(0, u) / kv(0, w), 0.0], dtype=complex)
        else:
            mat = self._boundary_matrix()
            _, s, vh = np.linalg.svd(mat)
            if s[-1] > 1e-6 * s[0]:  # pragma: no cover - guarded by residual
                raise NoConvergence(
                    f"boundary system not singular for {self.family}"
                    f"{self.l}{self.m} (s_min/s_max={s[-1] / s[0]:.2e})"
                )
            vec = vh[-1].conj()
        # Phase convention: e_r real and positive at r = a+; TE modes have
        # no radial field, so there e_phi is pinned to the positive
        # imaginary axis instead (matching the hybrid-mode quadrature).
        fields = self._raw_fields(np.array([a * (1 + 1e-12)]), vec)
        ref = fields[0][0] if self.family != "TE" else fields[1][0] / 1j
        vec = vec * (abs(ref) / ref)
        return vec

    def _raw_fields(self, r, coeffs):
        """Unnormalized (e_r, e_phi, e_z, h_r, h_phi, h_z) at radii r."""
        r = np.asarray(r, dtype=float)
        fiber, l, beta, omega = self.fiber, self.l, self.beta, self.omega
        A, B, Cc, D = coeffs
        inside = r < fiber.radius_a
        out = np.zeros((6,) + r.shape, dtype=complex)

        def fill(mask, kind, krad, cE, cH, kappa2, nsq):
            if not np.any(mask):
                return
            rr = r[mask]
            x = krad * rr
            if kind == "J":
                z, dz = jv(l, x), jvp(l, x)
            else:
                z, dz = kv(l, x), kvp(l, x)
            ez = cE * z
            dez = cE * krad * dz
            hz = cH * z
            dhz = cH * krad * dz
            we_mu = omega * MU0
            we_eps = omega * EPS0 * nsq
            out[0][mask] = (1j / kappa2) * (beta * dez + 1j * we_mu * l * hz / rr)
            out[1][mask] = (1j / kappa2) * (1j * beta * l * ez / rr - we_mu * dhz)
            out[2][mask] = ez
            out[3][mask] = (1j / kappa2) * (beta * dhz - 1j * we_eps * l * ez / rr)
            out[4][mask] = (1j / kappa2) * (1j * beta * l * hz / rr + we_eps * dez)
            out[5][mask] = hz

        fill(inside, "J", self.h, A, B, self.h**2, fiber.n1**2)
        fill(~inside, "K", self.q, Cc, D, -self.q**2, fiber.n2**2)
        return out

    def _apply_normalization(self):
        """Scale coefficients so 2*pi*int n^2 |e|^2 r dr = 1."""
        a = self.fiber.radius_a

        def dens(r):
            e = self._raw_fields(np.array([r]), self._coeffs)[:3]
            n = self.fiber.n_ref(r)
            return float(n**2 * (abs(e[0][0]) ** 2 + abs(e[1][0]) ** 2
                                 + abs(e[2][0]) ** 2) * r)

        tail = a + 45.0 / self.q
        inner, _ = integrate.quad(dens, 0.0, a, epsabs=0.0, epsrel=1e-11, limit=200)
        outer, _ = integrate.quad(dens, a, tail, epsabs=0.0, epsrel=1e-11, limit=200)
        norm = 2.0 * np.pi * (inner + outer)
        self._coeffs = self._coeffs / np.sqrt(norm)
        self.norm_integral = 1.0

    # -- public surface -------------------------------------------------

    @property
    def id(self) -> GuidedModeId:
        p = 0 if self.family in ("TE", "TM") else +1
        return GuidedModeId(self.family, self.l, self.m, +1, p)

    @property
    def beta_prime(self) -> float:
        """d(beta)/d(omega) by 5-point central differences."""
        if self._beta_prime is None:
            d = 1e-6 * self.omega
            vals = [
                solve_dispersion(self.fiber, self.omega + s * d,
                                 self.family, self.l, self.m)
                for s in (-2, -1, 1, 2)
            ]
            self._beta_prime = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * d)
        return self._beta_prime

    def profile(self, r):
        """Electric profile components (e_r, e_phi, e_z) at radius r."""
        fields = self._raw_fields(np.atleast_1d(np.asarray(r, dtype=float)),
                                  self._coeffs)
        er, ephi, ez = fields[0], fields[1], fields[2]
        if np.isscalar(r) or np.asarray(r).ndim == 0:
            return er[0], ephi[0], ez[0]
        return er, ephi, ez

    def h_profile(self, r):
        """Magnetic profile components (h_r, h_phi, h_z) at radius r."""
        fields = self._raw_fields(np.atleast_1d(np.asarray(r, dtype=float)),
                                  self._coeffs)
        hr, hphi, hz = fields[3], fields[4], fields[5]
        if np.isscalar(r) or np.asarray(r).ndim == 0:
            return hr[0], hphi[0], hz[0]
        return hr, hphi, hz

    def profile_derivative(self, r):
        """Radial derivatives (de_r/dr, de_phi/dr, de_z/dr) at radius r."""
        scalar = np.isscalar(r) or np.asarray(r).ndim == 0
        r = np.atleast_1d(np.asarray(r, dtype=float))
        fiber, l, beta, omega = self.fiber, self.l, self.beta, self.omega
        A, B, Cc, D = self._coeffs
        out = np.zeros((3,) + r.shape, dtype=complex)
        inside = r < fiber.radius_a

        def fill(mask, kind, krad, cE, cH, kappa2, nsq):
            if not np.any(mask):
                return
            rr = r[mask]
            x = krad * rr
            if kind == "J":
                z, dz = jv(l, x), jvp(l, x)
            else:
                z, dz = kv(l, x), kvp(l, x)
            d2z = _zsecond(kind, l, x, z, dz)
            ez, dez, d2ez = cE * z, cE * krad * dz, cE * krad**2 * d2z
            hz, dhz, d2hz = cH * z, cH * krad * dz, cH * krad**2 * d2z
            we_mu = omega * MU0
            out[0][mask] = (1j / kappa2) * (
                beta * d2ez + 1j * we_mu * l * (dhz / rr - hz / rr**2))
            out[1][mask] = (1j / kappa2) * (
                1j * beta * l * (dez / rr - ez / rr**2) - we_mu * d2hz)
            out[2][mask] = dez

        fill(inside, "J", self.h, A, B, self.h**2, fiber.n1**2)
        fill(~inside, "K", self.q, Cc, D, -self.q**2, fiber.n2**2)
        if scalar:
            return out[0][0], out[1][0], out[2][0]
        return out[0], out[1], out[2]

    def normalization_residual(self, rtol_tail=1e-10):
        """Recompute the profile normalization integral (should be 1)."""
        a = self.fiber.radius_a

        def dens(r):
            e = self._raw_fields(np.array([r]), self._coeffs)[:3]
            n = self.fiber.n_ref(r)
            return float(n**2 * (abs(e[0][0]) ** 2 + abs(e[1][0]) ** 2
                                 + abs(e[2][0]) ** 2) * r)

        tail = a + 45.0 / self.q
        inner, _ = integrate.quad(dens, 0.0, a, epsabs=0.0, epsrel=1e-11, limit=200)
        outer, _ = integrate.quad(dens, a, tail, epsabs=0.0, epsrel=1e-11, limit=200)
        return 2.0 * np.pi * (inner + outer)

    def axial_flux(self):
        """Time-averaged axial Poynting flux of the normalized profile,
        split as (inside, outside) contributions (W per |amplitude|^2)."""
        a = self.fiber.radius_a

        def dens(r):
            f = self._raw_fields(np.array([r]), self._coeffs)
            sz = 0.5 * np.real(f[0][0] * np.conj(f[4][0])
                               - f[1][0] * np.conj(f[3][0]))
            return sz * r

        tail = a + 45.0 / self.q
        inner, _ = integrate.quad(dens, 0.0, a, epsabs=0.0, epsrel=1e-10, limit=200)
        outer, _ = integrate.quad(dens, a, tail, epsabs=0.0, epsrel=1e-10, limit=200)
        return 2.0 * np.pi * inner, 2.0 * np.pi * outer


@functools.lru_cache(maxsize=512)
def _solve_mode_cached(fiber, family, l, m, omega):
    return GuidedMode(fiber, family, l, m, omega)


def solve_mode(fiber: FiberSpec, omega: float, family: Family, l: int,
               m: int) -> GuidedMode:
    """Solve and cache the guided mode (family, l, m) at ``omega``."""
    return _solve_mode_cached(fiber, family, int(l), int(m), float(omega))
