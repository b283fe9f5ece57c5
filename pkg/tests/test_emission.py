"""Spontaneous-emission rates: dual-route equivalence and limits."""

import numpy as np
import pytest

from fiberforce import (coincidence_green, decay_rates,
                        dipole_from_linewidth, free_space_im_green,
                        gamma_free, guided_rates)
from fiberforce.constants import C_LIGHT, EPS0, HBAR

from oracles import free_space_rate

OMEGA0 = 2.0 * np.pi * C_LIGHT / 780e-9
GAMMA0 = 2.0 * np.pi * 6.065e6


def _dipole(orientation):
    d = np.asarray(orientation, dtype=complex)
    d /= np.linalg.norm(d)
    return d * dipole_from_linewidth(OMEGA0, GAMMA0)


def _green_route_rate(fiber, dipole, r):
    g = coincidence_green(fiber, OMEGA0, r)
    im_total = free_space_im_green(OMEGA0) + np.imag(g)
    return (2.0 * OMEGA0**2 / (HBAR * EPS0 * C_LIGHT**2)
            * np.real(np.dot(dipole, im_total @ np.conj(dipole))))


def test_dipole_magnitude_round_trip():
    d = dipole_from_linewidth(OMEGA0, GAMMA0)
    assert abs(gamma_free(OMEGA0, d) / GAMMA0 - 1.0) < 1e-12
    assert abs(free_space_rate(OMEGA0, d * d) / GAMMA0 - 1.0) < 1e-12


@pytest.mark.parametrize("orientation", [(1, 0, 0), (0, 1, 0), (0, 0, 1),
                                         (1j, 0, -1)])
def test_mode_sum_matches_green_route(fiber, orientation):
    """Total rate from the guided + radiation mode sums must equal the
    rate from the imaginary part of the Green tensor.  The two routes
    share no code beyond the mode solver."""
    d = _dipole(orientation)
    radii = np.linspace(1.05, 3.0, 10) * fiber.radius_a
    for r in radii:
        modal = decay_rates(fiber, OMEGA0, d, r).total
        green = _green_route_rate(fiber, d, r)
        assert abs(modal / green - 1.0) < 1e-6


def test_far_from_fiber_recovers_free_space(fiber):
    d = _dipole((1, 0, 0))
    rate = decay_rates(fiber, OMEGA0, d, 10 * fiber.radius_a).total
    assert abs(rate / GAMMA0 - 1.0) < 0.02


def test_directional_guided_rates(fiber):
    """A rotating dipole emits asymmetrically into the two directions of
    a guided mode; a real dipole cannot."""
    r = fiber.radius_a + 200e-9

    rot = guided_rates(fiber, OMEGA0, _dipole((1j, 0, -1)), r)
    by_dir = {}
    for e in rot:
        by_dir.setdefault((e.family, e.l, e.m), {})[e.f] = e.gamma
    asym = [v for v in by_dir.values()
            if abs(v[+1] - v[-1]) > 1e-3 * (v[+1] + v[-1])]
    assert asym, "no direction-asymmetric guided channel found"

    lin = guided_rates(fiber, OMEGA0, _dipole((1, 0, 0)), r)
    by_dir = {}
    for e in lin:
        by_dir.setdefault((e.family, e.l, e.m), {})[e.f] = e.gamma
    for v in by_dir.values():
        assert abs(v[+1] - v[-1]) <= 1e-10 * (v[+1] + v[-1] + GAMMA0)


def test_rate_enhancement_near_surface(fiber):
    """The total rate close to the fiber exceeds the free-space rate."""
    d = _dipole((1, 0, 0))
    near = decay_rates(fiber, OMEGA0, d, fiber.radius_a + 50e-9).total
    assert near > GAMMA0
