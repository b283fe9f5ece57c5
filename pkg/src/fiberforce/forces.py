"""Potentials and radiation-force components for the driven atom.

The total force splits into

    F = F_drv + rho_ee F_spon + rho_ee F_vdw_e + rho_gg F_vdw_g,

with the driving-field force built from the gradient of the Rabi
frequency, the spontaneous-emission recoil force from the directional
asymmetry of the decay channels, and the van der Waals forces from the
gradients of the body-induced potentials.

The ground-state potential and the off-resonant part of the
excited-state potential come from an imaginary-frequency quadrature of
the scattered Green tensor at coincidence,

    U_e_off = -U_g
            = -(omega0 / pi eps0 c^2)
              * int_0^inf du u^2/(omega0^2 + u^2) d . G_R(iu) . d*,

mapped onto a finite interval by u = omega0 tan(theta) and evaluated by
Gauss-Legendre node doubling; the resonant part is read off the real
part of the coincidence tensor at the transition frequency.  The heavy
Green-tensor tables depend only on (fiber, frequency, radius) and are
cached, so scans over dipole orientation or azimuth reuse them.

The recoil force is computed by two independent routes: a mode sum over
the directional guided rates and the beta-resolved radiation continuum,
and the gradient of the imaginary part of the coincidence Green tensor.
They are kept separate deliberately and cross-checked in the test
suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .atom import AtomSpec
from .bloch import (BlochSteadyState, effective_detuning, rabi_frequency,
                    steady_state)
from .constants import C_LIGHT, EPS0, HBAR, MU0
from .drive import DriveField
from .emission import (_auto_lmax, decay_rates, guided_rates,
                       radiation_beta_grid)
from .errors import InsideFiber, NoConvergence, SaturationTooHigh
from .green import (coincidence_green_gradient, coincidence_green_iu_gradient)
from .modes import FiberSpec, list_guided_modes, solve_mode
from .radiation import RadiationChannels


# ----------------------------------------------------------------------
# Van der Waals potentials
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class VdwPotentials:
    """Body-induced level shifts at one position (J).

    ``u_g`` is the ground-state potential, ``u_e`` the excited-state
    one; the latter splits into off-resonant and resonant parts with
    ``u_g = -u_e_off`` exactly.
    """

    u_g: float
    u_e: float
    u_e_off: float
    u_e_res: float


@lru_cache(maxsize=512)
def _iu_table(fiber: FiberSpec, omega0: float, r: float, tol: float,
              n_h: int):
    """Imaginary-frequency quadrature table at one radius.

    Returns ``(T, Tr)`` where ``T = int du u^2/(omega0^2+u^2) G_R(iu)``
    and ``Tr`` is the same integral of the first-argument radial
    derivative.  Gauss-Legendre nodes in theta are doubled until the
    tensor integral is stable to ``tol`` relative.
    """
    if r < fiber.radius_a:
        raise InsideFiber(f"atom radius {r:.4g} m inside fiber")
    prev = None
    n = 16
    while n <= 256:
        x, w = np.polynomial.legendre.leggauss(n)
        th = 0.25 * np.pi * (x + 1.0)
        wt = 0.25 * np.pi * w
        T = np.zeros((3, 3))
        Tr = np.zeros((3, 3))
        for t, wi in zip(th, wt):
            u = omega0 * np.tan(t)
            g, grad = coincidence_green_iu_gradient(fiber, u, r, n_h=n_h)
            T += wi * np.tan(t) ** 2 * g
            Tr += wi * np.tan(t) ** 2 * grad[0]
        T *= omega0
        Tr *= omega0
        if prev is not None:
            rel = np.max(np.abs(T - prev)) / max(np.max(np.abs(T)), 1e-300)
            if rel < tol:
                return T, Tr
        prev = T
        n *= 2
    raise NoConvergence(
        f"imaginary-frequency quadrature not converged at r = {r:.4g} m")


@lru_cache(maxsize=512)
def _res_table(fiber: FiberSpec, omega0: float, r: float):
    """Coincidence Green tensor and gradient at the real frequency."""
    return coincidence_green_gradient(fiber, omega0, r)


def _rotated(d):
    """Azimuthal derivative of the cylindrical dipole components."""
    return np.array([d[1], -d[0], 0.0], dtype=complex)


def _dmd(a, M, b):
    """Contraction a . M . b* with a in the first (field-point) slot."""
    return np.dot(a, M @ np.conj(b))


def vdw_potentials(fiber: FiberSpec, atom: AtomSpec, r: float,
                   phi: float = 0.0, tol: float = 1e-8,
                   n_h: int = 80) -> VdwPotentials:
    """Ground- and excited-state van der Waals potentials at (r, phi)."""
    omega0 = atom.omega0
    d = atom.dipole_cyl(phi)
    T, _ = _iu_table(fiber, omega0, r, tol, n_h)
    pref_off = omega0 / (np.pi * EPS0 * C_LIGHT**2)
    u_e_off = -pref_off * np.real(_dmd(d, T, d))
    g_res, _ = _res_table(fiber, omega0, r)
    pref_res = omega0**2 / (EPS0 * C_LIGHT**2)
    u_e_res = -pref_res * np.real(_dmd(d, np.real(g_res), d))
    return VdwPotentials(u_g=-u_e_off, u_e=u_e_off + u_e_res,
                         u_e_off=u_e_off, u_e_res=u_e_res)


def vdw_force(fiber: FiberSpec, atom: AtomSpec, r: float, phi: float = 0.0,
              tol: float = 1e-8, n_h: int = 80):
    """Van der Waals forces ``(F_e, F_g)`` in cylindrical components.

    The radial component is the analytic derivative of the potentials
    (the coincidence derivative is twice the first-argument one, by
    reciprocity); the azimuthal component comes from the chain rule on
    the rotating dipole components; the axial components vanish by
    symmetry.
    """
    omega0 = atom.omega0
    d = atom.dipole_cyl(phi)
    dp = _rotated(d)
    T, Tr = _iu_table(fiber, omega0, r, tol, n_h)
    g_res, grad_res = _res_table(fiber, omega0, r)

    pref_off = omega0 / (np.pi * EPS0 * C_LIGHT**2)
    # dU/dr and dU/dphi of the off-resonant part (of U_e; U_g is minus).
    du_off_dr = -pref_off * 2.0 * np.real(_dmd(d, Tr, d))
    du_off_dphi = -pref_off * 2.0 * np.real(_dmd(dp, T, d))

    pref_res = omega0**2 / (EPS0 * C_LIGHT**2)
    A = np.real(grad_res[0])
    du_res_dr = -pref_res * 2.0 * np.real(_dmd(d, A, d))
    du_res_dphi = -pref_res * 2.0 * np.real(_dmd(dp, np.real(g_res), d))

    f_e = np.array([-(du_off_dr + du_res_dr),
                    -(du_off_dphi + du_res_dphi) / r, 0.0])
    f_g = np.array([du_off_dr, du_off_dphi / r, 0.0])
    return f_e, f_g


# ----------------------------------------------------------------------
# Spontaneous-emission recoil force
# ----------------------------------------------------------------------

def spon_recoil_force(fiber: FiberSpec, atom: AtomSpec, r: float,
                      phi: float = 0.0, lmax: Optional[int] = None,
                      n_nodes: int = 200, route: str = "modes"):
    """Spontaneous-emission recoil force (r, phi, z components, N).

    ``route="modes"`` sums the directional guided rates and the
    beta-resolved radiation continuum; ``route="green"`` evaluates the
    gradient of the imaginary part of the coincidence Green tensor.
    The radial component vanishes identically on both routes.
    """
    omega0 = atom.omega0
    d = atom.dipole_cyl(phi)
    if route == "green":
        _, grad = _res_table(fiber, omega0, r)
        pref = omega0**2 / (EPS0 * C_LIGHT**2)
        f = np.zeros(3)
        for k in range(3):
            val = 1j * pref * _dmd(d, np.imag(grad[k]), d)
            f[k] = 2.0 * np.real(val)
        return f
    if route != "modes":
        raise ValueError("route must be 'modes' or 'green'")

    dp = _rotated(d)
    f_phi = 0.0
    f_z = 0.0

    # Guided contributions: directional rates and azimuthal phase
    # gradients, mode by mode.
    from .drive import mode_components
    for mid in list_guided_modes(fiber, omega0, include_directions=False):
        mode = solve_mode(fiber, omega0, mid.family, mid.l, mid.m)
        pref = omega0 * mode.beta_prime / (4.0 * np.pi * EPS0 * HBAR)
        ps = (+1, -1) if mid.family in ("HE", "EH") else (0,)
        for f_dir in (+1, -1):
            for p in ps:
                e = np.array(mode_components(mode, f_dir, p, r))
                c = np.dot(d, e)
                f_z -= 2.0 * np.pi * HBAR * f_dir * mode.beta \
                    * pref * abs(c) ** 2
                dphic = 1j * p * mid.l * c + np.dot(dp, e)
                f_phi -= (2.0 * np.pi * HBAR / r) * pref \
                    * np.imag(np.conj(c) * dphic)

    # Radiation continuum.
    if lmax is None:
        lmax = _auto_lmax(fiber, omega0, r)
    beta, wts = radiation_beta_grid(fiber, omega0, n_nodes)
    pref = omega0 / (4.0 * np.pi * EPS0 * HBAR)
    for l in range(-lmax, lmax + 1):
        rc = RadiationChannels(fiber, omega0, beta, l)
        er, ephi, ez = rc.exterior_field(r)
        c = d[0] * er + d[1] * ephi + d[2] * ez  # (n, 2)
        dphic = 1j * l * c + dp[0] * er + dp[1] * ephi + dp[2] * ez
        f_z -= 2.0 * np.pi * HBAR * pref \
            * np.sum(wts * beta * np.sum(np.abs(c) ** 2, axis=1))
        f_phi -= (2.0 * np.pi * HBAR / r) * pref \
            * np.sum(wts * np.sum(np.imag(np.conj(c) * dphic), axis=1))

    return np.array([0.0, f_phi, f_z])


# ----------------------------------------------------------------------
# Driving-field force and composition
# ----------------------------------------------------------------------

def driving_force(drive: DriveField, atom: AtomSpec,
                  state: BlochSteadyState, r: float, phi: float = 0.0,
                  z: float = 0.0):
    """Driving-field force hbar Re(rho_ge grad Omega) (N)."""
    d = atom.dipole_cyl(phi)
    grad_e = drive.gradient(r, phi, z)  # (3, 3), frame-corrected rows
    grad_omega = grad_e @ d / HBAR
    return HBAR * np.real(state.rho_ge * grad_omega)


@dataclass(frozen=True)
class ForceBreakdown:
    """All force terms at one position, cylindrical components (N)."""

    f_drv: np.ndarray
    f_spon: np.ndarray
    f_vdw_e: np.ndarray
    f_vdw_g: np.ndarray
    rho_ee: float
    rho_gg: float
    potentials: VdwPotentials
    gamma: float
    rabi: complex
    detuning: float

    @property
    def f_scatt(self) -> np.ndarray:
        return self.rho_ee * self.f_spon

    @property
    def f_total(self) -> np.ndarray:
        return (self.f_drv + self.rho_ee * self.f_spon
                + self.rho_ee * self.f_vdw_e + self.rho_gg * self.f_vdw_g)


def total_force(fiber: FiberSpec, drive: DriveField, atom: AtomSpec,
                r: float, phi: float = 0.0, z: float = 0.0,
                delta0: float = 0.0, include_level_shift: bool = True,
                lmax: Optional[int] = None, n_nodes: int = 200,
                vdw_tol: float = 1e-8) -> ForceBreakdown:
    """Total radiation force and its decomposition at one position.

    The steady state is computed with the detuning shifted by the
    position-dependent potentials unless ``include_level_shift`` is
    False (useful when the level shift is deliberately neglected).
    """
    pots = vdw_potentials(fiber, atom, r, phi, tol=vdw_tol)
    delta = effective_detuning(delta0, pots.u_e, pots.u_g) \
        if include_level_shift else delta0
    d = atom.dipole_cyl(phi)
    gamma = decay_rates(fiber, atom.omega0, d, r, lmax=lmax,
                        n_nodes=n_nodes).total
    omega_rabi = rabi_frequency(drive, atom, r, phi, z)
    state = steady_state(omega_rabi, delta, gamma)

    f_drv = driving_force(drive, atom, state, r, phi, z)
    if np.max(np.abs(np.imag(np.asarray(atom.orientation)))) > 0:
        f_spon = spon_recoil_force(fiber, atom, r, phi, lmax=lmax,
                                   n_nodes=n_nodes)
    else:
        f_spon = np.zeros(3)
    f_vdw_e, f_vdw_g = vdw_force(fiber, atom, r, phi, tol=vdw_tol)
    return ForceBreakdown(
        f_drv=f_drv, f_spon=f_spon, f_vdw_e=f_vdw_e, f_vdw_g=f_vdw_g,
        rho_ee=state.rho_ee, rho_gg=state.rho_gg, potentials=pots,
        gamma=gamma, rabi=omega_rabi, detuning=delta)


def weak_excitation_force(fiber: FiberSpec, drive: DriveField,
                          atom: AtomSpec, r: float, phi: float = 0.0,
                          z: float = 0.0, delta0: float = 0.0,
                          include_level_shift: bool = True,
                          s_max: float = 0.05,
                          lmax: Optional[int] = None,
                          n_nodes: int = 200):
    """Force in the weak-excitation limit via the polarizability tensor.

    Evaluates the induced-dipole expression

        F = (1/2) sum_i Re(p_i* grad E_i)
          + (omega0^2 mu0 / 2) sum_ij Re(p_i* grad G_R_ij p_j),

    with ``p = -d* (d . E) / (hbar (Delta + i Gamma/2))``.  It omits the
    off-resonant van der Waals term and is only valid at low saturation;
    raises :class:`SaturationTooHigh` when s exceeds ``s_max``.
    """
    omega0 = atom.omega0
    pots = vdw_potentials(fiber, atom, r, phi)
    delta = effective_detuning(delta0, pots.u_e, pots.u_g) \
        if include_level_shift else delta0
    d = atom.dipole_cyl(phi)
    gamma = decay_rates(fiber, omega0, d, r, lmax=lmax,
                        n_nodes=n_nodes).total
    omega_rabi = rabi_frequency(drive, atom, r, phi, z)
    s = 0.5 * abs(omega_rabi) ** 2 / (delta**2 + gamma**2 / 4.0)
    if s >= s_max:
        raise SaturationTooHigh(
            f"saturation s = {s:.3g} exceeds the weak-excitation "
            f"threshold {s_max:g}")

    p = -np.conj(d) * (HBAR * omega_rabi) / (HBAR * (delta + 0.5j * gamma))
    grad_e = drive.gradient(r, phi, z)
    f1 = 0.5 * np.real(grad_e @ np.conj(p))
    _, grad_g = _res_table(fiber, omega0, r)
    pref = 0.5 * omega0**2 * MU0
    f2 = np.array([
        pref * np.real(_dmd(np.conj(p), grad_g[k], np.conj(p)))
        for k in range(3)])
    return f1 + f2
