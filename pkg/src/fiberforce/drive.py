"""Classical guided driving fields.

A drive is a power-normalized superposition of guided running modes with
a common frequency, propagation direction and mode label.  Supported
polarization states:

* quasicircular -- a single hybrid mode with circulation index p = +/-1,
* quasilinear   -- equal-weight superposition of the two circulation
  states of a hybrid mode, with principal axis at azimuth ``phi_pol``,
* TE / TM       -- the (non-degenerate) l = 0 modes.

Amplitudes are fixed by the requested propagating power through the
time-averaged axial Poynting flux of the normalized profile; for the
quasilinear state the two circulation components carry no cross flux,
so the same amplitude applies.
"""

from __future__ import annotations

import numpy as np

from .errors import PolarizationMismatch
from .modes import GuidedMode


def mode_components(mode: GuidedMode, f: int, p: int, r):
    """Cylindrical components of the (f, p) running mode profile.

    For hybrid modes these are ``(e_r, p*e_phi, f*e_z)``; the l = 0
    families carry no circulation index and keep their single transverse
    component unchanged.
    """
    er, ephi, ez = mode.profile(r)
    pfac = p if mode.family in ("HE", "EH") else 1
    return er, pfac * ephi, f * ez


def mode_components_derivative(mode: GuidedMode, f: int, p: int, r):
    """Radial derivative of :func:`mode_components`."""
    der, dephi, dez = mode.profile_derivative(r)
    pfac = p if mode.family in ("HE", "EH") else 1
    return der, pfac * dephi, f * dez


class DriveField:
    """A guided drive: coherent field and its spatial derivatives.

    Parameters
    ----------
    mode : GuidedMode
        The underlying guided mode (reference profile).
    power : float
        Propagating power in watts.
    f : int
        Propagation direction along z, +1 or -1.
    polarization : str
        ``"circular"``, ``"linear"``, ``"te"`` or ``"tm"``.
    p : int, optional
        Circulation index for the quasicircular state.
    phi_pol : float, optional
        Principal-axis azimuth for the quasilinear state (radians).
    """

    def __init__(self, mode: GuidedMode, power: float, f: int = +1,
                 polarization: str = "circular", p: int = +1,
                 phi_pol: float = 0.0):
        hybrid = mode.family in ("HE", "EH")
        if polarization in ("circular", "linear") and not hybrid:
            raise PolarizationMismatch(
                f"{polarization} drive needs a hybrid mode, got {mode.family}")
        if polarization == "te" and mode.family != "TE":
            raise PolarizationMismatch("te drive requires a TE mode")
        if polarization == "tm" and mode.family != "TM":
            raise PolarizationMismatch("tm drive requires a TM mode")
        if f not in (+1, -1):
            raise ValueError("f must be +/-1")
        if polarization == "circular" and p not in (+1, -1):
            raise ValueError("p must be +/-1 for the quasicircular state")

        self.mode = mode
        self.power = float(power)
        self.f = int(f)
        self.polarization = polarization
        self.phi_pol = float(phi_pol)

        flux = sum(mode.axial_flux())
        self.amplitude = np.sqrt(self.power / flux)

        if polarization == "circular":
            self._terms = [(1.0 + 0.0j, p)]
        elif polarization == "linear":
            self._terms = [
                (np.exp(-1j * pp * self.phi_pol) / np.sqrt(2.0), pp)
                for pp in (+1, -1)
            ]
        else:  # te / tm: single l = 0 component
            self._terms = [(1.0 + 0.0j, 0)]

    # -- field and derivatives ------------------------------------------

    def field(self, r, phi=0.0, z=0.0):
        """Complex field amplitude (E_r, E_phi, E_z) at (r, phi, z)."""
        m, f = self.mode, self.f
        out = np.zeros(3, dtype=complex)
        for w, p in self._terms:
            er, ephi, ez = mode_components(m, f, p, r)
            phase = np.exp(1j * (f * m.beta * z + p * m.l * phi))
            out += w * phase * np.array([er, ephi, ez])
        return self.amplitude * out

    def gradient(self, r, phi=0.0, z=0.0):
        """Frame-corrected gradient ``grad[i, j] = (nabla_i E)_j``.

        The azimuthal row is the derivative of the Cartesian components
        re-expressed in the local cylindrical basis, i.e. it includes the
        basis-rotation terms ``(1/r)(d_phi E_r - E_phi)`` and
        ``(1/r)(d_phi E_phi + E_r)``; contracting with a fixed dipole
        therefore gives the true spatial gradient of ``d* . E``.
        """
        m, f = self.mode, self.f
        grad = np.zeros((3, 3), dtype=complex)
        field = np.zeros(3, dtype=complex)
        for w, p in self._terms:
            comps = np.array(mode_components(m, f, p, r))
            dcomps = np.array(mode_components_derivative(m, f, p, r))
            phase = w * np.exp(1j * (f * m.beta * z + p * m.l * phi))
            field += phase * comps
            grad[0] += phase * dcomps
            grad[1] += phase * (1j * p * m.l / r) * comps
            grad[2] += phase * (1j * f * m.beta) * comps
        # basis-rotation correction on the azimuthal row
        grad[1, 0] -= field[1] / r
        grad[1, 1] += field[0] / r
        return self.amplitude * grad
