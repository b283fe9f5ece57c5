"""Physical constants used throughout the package (SI units)."""

from scipy.constants import c as C_LIGHT
from scipy.constants import epsilon_0 as EPS0
from scipy.constants import hbar as HBAR
from scipy.constants import k as K_BOLTZMANN
from scipy.constants import mu_0 as MU0

__all__ = ["C_LIGHT", "EPS0", "MU0", "HBAR", "K_BOLTZMANN"]
