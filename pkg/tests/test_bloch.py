"""Steady state of the driven two-level atom: exact identities."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from fiberforce import steady_state

finite = st.floats(allow_nan=False, allow_infinity=False)
rates = st.floats(min_value=1e3, max_value=1e10)
detunings = st.floats(min_value=-1e10, max_value=1e10)
amplitudes = st.floats(min_value=0.0, max_value=1e10)
phases = st.floats(min_value=-np.pi, max_value=np.pi)


def _bloch_derivatives(omega, delta, gamma, rho_ee, rho_ge):
    """Right-hand sides of the two independent Bloch equations."""
    rho_eg = np.conj(rho_ge)
    d_ee = 0.5j * (omega * rho_ge - np.conj(omega) * rho_eg) \
        - gamma * rho_ee
    d_ge = 0.5j * np.conj(omega) * (2.0 * rho_ee - 1.0) \
        - (0.5 * gamma + 1j * delta) * rho_ge
    return d_ee, d_ge


@given(amp=amplitudes, phase=phases, delta=detunings, gamma=rates)
@settings(max_examples=300, deadline=None)
def test_fixed_point_nulls_derivatives(amp, phase, delta, gamma):
    omega = amp * np.exp(1j * phase)
    st_ = steady_state(omega, delta, gamma)
    d_ee, d_ge = _bloch_derivatives(omega, delta, gamma,
                                    st_.rho_ee, st_.rho_ge)
    # the derivative is a difference of terms of size ~max(|Omega|,
    # |Delta|, Gamma), so that sets the float64 cancellation scale
    scale = max(gamma, abs(omega), abs(delta))
    assert abs(d_ee) < 1e-12 * scale
    assert abs(d_ge) < 1e-12 * scale


def test_fixed_point_residual_at_physical_scales():
    """With drive and detuning comparable to the linewidth the
    residual is at the 1e-12 Gamma level."""
    gamma = 2 * np.pi * 6.065e6
    for omega, delta in ((0.3 * gamma, 0.0), (2.0 * gamma, -0.7 * gamma),
                         ((1 + 2j) * gamma, 3.0 * gamma)):
        st_ = steady_state(omega, delta, gamma)
        d_ee, d_ge = _bloch_derivatives(omega, delta, gamma,
                                        st_.rho_ee, st_.rho_ge)
        assert abs(d_ee) < 1e-12 * gamma
        assert abs(d_ge) < 1e-12 * gamma


@given(amp=amplitudes, phase=phases, delta=detunings, gamma=rates)
@settings(max_examples=200, deadline=None)
def test_population_and_saturation_identities(amp, phase, delta, gamma):
    omega = amp * np.exp(1j * phase)
    st_ = steady_state(omega, delta, gamma)
    s = st_.saturation
    assert 0.0 <= st_.rho_ee < 0.5
    assert abs(st_.rho_ee - 0.5 * s / (1.0 + s)) <= 1e-15 * (1.0 + s)
    assert st_.rho_gg == 1.0 - st_.rho_ee
    # coherence magnitude bound: |rho_eg|^2 <= rho_ee rho_gg
    assert abs(st_.rho_eg) ** 2 <= st_.rho_ee * st_.rho_gg + 1e-15


@given(amp=st.floats(min_value=1.0, max_value=1e9), phase=phases,
       delta=detunings, gamma=rates, extra=phases)
@settings(max_examples=200, deadline=None)
def test_phase_covariance(amp, phase, delta, gamma, extra):
    """Rotating the drive phase rotates the coherence the same way and
    leaves the population unchanged."""
    om1 = amp * np.exp(1j * phase)
    om2 = om1 * np.exp(1j * extra)
    s1 = steady_state(om1, delta, gamma)
    s2 = steady_state(om2, delta, gamma)
    assert abs(s1.rho_ee - s2.rho_ee) <= 1e-12 * (s1.rho_ee + 1e-300)
    assert abs(s2.rho_eg - s1.rho_eg * np.exp(1j * extra)) \
        <= 1e-12 * (abs(s1.rho_eg) + 1e-30)


def test_saturation_limits():
    gamma = 2 * np.pi * 6e6
    weak = steady_state(1e-3 * gamma, 0.0, gamma)
    # s = 2e-6, rho_ee ~ s/2 = 1e-6
    assert abs(weak.rho_ee / 1e-6 - 1.0) < 1e-5
    strong = steady_state(1e4 * gamma, 0.0, gamma)
    assert abs(strong.rho_ee - 0.5) < 1e-6
