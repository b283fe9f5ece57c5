"""Two-level atom description.

The atom is characterized by its transition frequency, its free-space
linewidth (which fixes the magnitude of the transition dipole matrix
element) and the orientation of the dipole, given as a complex unit
vector in the Cartesian frame of the fiber.  At a given azimuth the
dipole is re-expressed in the local cylindrical basis; all couplings
downstream work with the cylindrical components.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import C_LIGHT
from .emission import dipole_from_linewidth


@dataclass(frozen=True)
class AtomSpec:
    """Two-level atom: transition wavelength, linewidth, dipole axis.

    Parameters
    ----------
    wavelength : float
        Free-space transition wavelength (m).
    gamma0 : float
        Free-space decay rate (rad/s).
    orientation : sequence of complex
        Dipole orientation in the Cartesian frame (x, y, z); normalized
        on construction.  A complex vector describes a rotating dipole.
    """

    wavelength: float
    gamma0: float
    orientation: tuple = field(default=(1.0, 0.0, 0.0))

    def __post_init__(self):
        v = np.asarray(self.orientation, dtype=complex)
        if v.shape != (3,):
            raise ValueError("orientation must be a 3-vector")
        norm = np.sqrt(np.sum(np.abs(v) ** 2))
        if norm == 0:
            raise ValueError("orientation must be nonzero")
        object.__setattr__(self, "orientation", tuple(v / norm))

    @property
    def omega0(self) -> float:
        """Transition angular frequency (rad/s)."""
        return 2.0 * np.pi * C_LIGHT / self.wavelength

    @property
    def dipole_magnitude(self) -> float:
        """Reduced dipole matrix element (C m) implied by the linewidth."""
        return dipole_from_linewidth(self.omega0, self.gamma0)

    def dipole_cyl(self, phi: float) -> np.ndarray:
        """Dipole vector (d_r, d_phi, d_z) in the cylindrical basis at
        azimuth ``phi``, including the magnitude."""
        dx, dy, dz = self.orientation
        c, s = np.cos(phi), np.sin(phi)
        return self.dipole_magnitude * np.array(
            [dx * c + dy * s, -dx * s + dy * c, dz], dtype=complex)

    def orientation_cyl(self, phi: float) -> np.ndarray:
        """Unit dipole orientation in the cylindrical basis at ``phi``."""
        return self.dipole_cyl(phi) / self.dipole_magnitude
