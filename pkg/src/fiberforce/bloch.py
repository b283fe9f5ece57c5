"""Driven two-level atom: Rabi frequency and steady-state populations.

The optical Bloch equations for the phase-shifted density matrix are

    drho_ee/dt = (i/2)(Omega rho_ge - Omega* rho_eg) - Gamma rho_ee,
    drho_ge/dt = (i/2)Omega*(rho_ee - rho_gg) - (Gamma/2 + i Delta) rho_ge,

with Delta the detuning from the (environment-shifted) transition.
Only the fixed point is exposed here; transients are out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import HBAR


@dataclass(frozen=True)
class BlochSteadyState:
    """Steady state of the driven two-level atom.

    Attributes
    ----------
    rho_ee : float
        Excited-state population, in [0, 1/2].
    rho_eg : complex
        Optical coherence <e|rho|g>.
    saturation : float
        Saturation parameter s; rho_ee = s / (2 (1 + s)).
    """

    rho_ee: float
    rho_eg: complex
    saturation: float

    @property
    def rho_gg(self) -> float:
        return 1.0 - self.rho_ee

    @property
    def rho_ge(self) -> complex:
        return np.conj(self.rho_eg)


def rabi_frequency(drive, atom, r, phi=0.0, z=0.0) -> complex:
    """Rabi frequency Omega = d . E / hbar at the atom position.

    ``drive`` is a :class:`fiberforce.drive.DriveField`; the dipole is
    rotated into the local cylindrical basis before contracting with the
    drive amplitude.
    """
    d = atom.dipole_cyl(phi)
    e = drive.field(r, phi, z)
    return complex(np.dot(d, e) / HBAR)


def effective_detuning(delta0: float, u_e: float, u_g: float) -> float:
    """Drive detuning corrected for the body-induced level shifts.

    Delta = Delta_0 - (U_e - U_g) / hbar, with the potentials evaluated
    at the atom position.
    """
    return delta0 - (u_e - u_g) / HBAR


def steady_state(omega_rabi: complex, delta: float, gamma: float
                 ) -> BlochSteadyState:
    """Fixed point of the Bloch equations for given drive and decay.

    Parameters
    ----------
    omega_rabi : complex
        Rabi frequency Omega (rad/s).
    delta : float
        Detuning Delta (rad/s), already including any level shifts.
    gamma : float
        Total decay rate Gamma (rad/s); must be positive.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    denom = delta**2 + gamma**2 / 4.0
    s = 0.5 * abs(omega_rabi) ** 2 / denom
    rho_ee = 0.5 * s / (1.0 + s)
    rho_eg = (1j * omega_rabi * (gamma + 2j * delta) / 4.0
              / (denom + 0.5 * abs(omega_rabi) ** 2))
    return BlochSteadyState(rho_ee=float(rho_ee), rho_eg=complex(rho_eg),
                            saturation=float(s))
