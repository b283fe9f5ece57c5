"""Radiation forces on a two-level atom near an ultrathin optical fiber.

The package computes the full optical force on a driven two-level atom
placed in the evanescent field of a vacuum-clad step-index nanofiber:
the driving-field (pressure/gradient) force, the spontaneous-emission
recoil force of a rotating dipole, and the fiber-induced van der Waals
forces, together with all the underlying machinery (guided and
radiation mode functions, spontaneous-emission rates, the scattered
dyadic Green tensor of the cylinder, and the steady state of the driven
atom).
"""

from .atom import AtomSpec
from .bloch import (BlochSteadyState, effective_detuning, rabi_frequency,
                    steady_state)
from .drive import DriveField
from .emission import (RateResult, decay_rates, dipole_from_linewidth,
                       gamma_free, guided_rates, radiation_rate)
from .errors import (ConfigInvalid, EvanescentBeta, FiberForceError,
                     InsideFiber, ModeBelowCutoff, NoConvergence,
                     PolarizationMismatch, SaturationTooHigh)
from .forces import (ForceBreakdown, VdwPotentials, driving_force,
                     spon_recoil_force, total_force, vdw_force,
                     vdw_potentials, weak_excitation_force)
from .green import (coincidence_green, coincidence_green_gradient,
                    coincidence_green_iu, free_space_im_green,
                    scattered_green, scattered_green_iu)
from .modes import FiberSpec, GuidedMode, GuidedModeId, list_guided_modes, \
    solve_dispersion, solve_mode
from .radiation import RadiationChannels

__version__ = "0.1.0"

__all__ = [
    "AtomSpec", "BlochSteadyState", "ConfigInvalid", "DriveField",
    "EvanescentBeta", "FiberForceError", "FiberSpec", "ForceBreakdown",
    "GuidedMode", "GuidedModeId", "InsideFiber", "ModeBelowCutoff",
    "NoConvergence", "PolarizationMismatch", "RadiationChannels",
    "RateResult", "SaturationTooHigh", "VdwPotentials",
    "coincidence_green", "coincidence_green_gradient",
    "coincidence_green_iu", "decay_rates", "dipole_from_linewidth",
    "driving_force", "effective_detuning", "free_space_im_green",
    "gamma_free", "guided_rates",
    "list_guided_modes", "rabi_frequency", "radiation_rate",
    "scattered_green", "scattered_green_iu", "solve_dispersion",
    "solve_mode", "spon_recoil_force", "steady_state", "total_force",
    "vdw_force", "vdw_potentials", "weak_excitation_force",
]
