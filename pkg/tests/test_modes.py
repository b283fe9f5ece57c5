"""Guided-mode solver: spectrum, dispersion residuals, normalization."""

import time

import numpy as np
import pytest

from fiberforce import (FiberSpec, ModeBelowCutoff, list_guided_modes,
                        solve_mode)
from fiberforce.constants import C_LIGHT
from fiberforce.modes import characteristic

OMEGA0 = 2.0 * np.pi * C_LIGHT / 780e-9


def test_reference_fiber_mode_spectrum(fiber):
    """Exactly HE11, TE01, TM01, HE21 at 780 nm on the 350 nm fiber."""
    t0 = time.time()
    ids = list_guided_modes(fiber, OMEGA0, include_directions=False)
    found = sorted(f"{m.family}{m.l}{m.m}" for m in ids)
    assert found == ["HE11", "HE21", "TE01", "TM01"]
    assert time.time() - t0 < 1.0


def test_dispersion_residuals(fiber):
    k = OMEGA0 / C_LIGHT
    for mid in list_guided_modes(fiber, OMEGA0, include_directions=False):
        mode = solve_mode(fiber, OMEGA0, mid.family, mid.l, mid.m)
        assert fiber.n2 * k < mode.beta < fiber.n1 * k
        res, _ = characteristic(fiber, OMEGA0, mid.family, mid.l, mode.beta)
        # normalize by a finite-difference slope so the residual is a
        # beta error, not an arbitrary function value
        db = mode.beta * 1e-7
        hi, _ = characteristic(fiber, OMEGA0, mid.family, mid.l,
                               mode.beta + db)
        lo, _ = characteristic(fiber, OMEGA0, mid.family, mid.l,
                               mode.beta - db)
        slope = (hi - lo) / (2 * db)
        assert abs(res / slope) / mode.beta < 1e-10


def test_profile_normalization(fiber):
    for mid in list_guided_modes(fiber, OMEGA0, include_directions=False):
        mode = solve_mode(fiber, OMEGA0, mid.family, mid.l, mid.m)
        assert abs(mode.normalization_residual() - 1.0) < 1e-6


def test_below_cutoff_raises(fiber):
    # HE31 is not guided at 780 nm on this fiber
    with pytest.raises(ModeBelowCutoff):
        solve_mode(fiber, OMEGA0, "HE", 3, 1)


def test_group_velocity_physical(fiber):
    for mid in list_guided_modes(fiber, OMEGA0, include_directions=False):
        mode = solve_mode(fiber, OMEGA0, mid.family, mid.l, mid.m)
        vg = 1.0 / mode.beta_prime
        # near cutoff the group velocity drops below c/n1 (strong
        # waveguide dispersion), so only loose physical bounds apply
        assert 0.1 * C_LIGHT < vg < C_LIGHT


def test_single_mode_regime():
    """A thinner fiber keeps only the fundamental mode."""
    thin = FiberSpec(radius_a=200e-9, n1=1.4537, n2=1.0)
    ids = list_guided_modes(thin, OMEGA0, include_directions=False)
    assert [f"{m.family}{m.l}{m.m}" for m in ids] == ["HE11"]
