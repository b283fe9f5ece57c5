import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fiberforce import AtomSpec, FiberSpec

GAMMA0 = 2.0 * np.pi * 6.065e6


@pytest.fixture(scope="session")
def fiber():
    """Reference vacuum-clad silica fiber."""
    return FiberSpec(radius_a=350e-9, n1=1.4537, n2=1.0)


@pytest.fixture(scope="session")
def atom_x():
    return AtomSpec(wavelength=780e-9, gamma0=GAMMA0, orientation=(1, 0, 0))


@pytest.fixture(scope="session")
def atom_rot():
    """Rotating dipole (i x - z)/sqrt(2)."""
    return AtomSpec(wavelength=780e-9, gamma0=GAMMA0,
                    orientation=(1j, 0, -1))
