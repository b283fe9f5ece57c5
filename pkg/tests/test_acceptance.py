"""Acceptance gate: one test per top-level criterion.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or
in the captured output of a failure) in addition to asserting, so the
acceptance status can be read off directly.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from fiberforce import (AtomSpec, DriveField, coincidence_green,
                        coincidence_green_iu, decay_rates, driving_force,
                        free_space_im_green, guided_rates,
                        list_guided_modes, rabi_frequency, scattered_green,
                        solve_mode, spon_recoil_force, steady_state,
                        total_force, vdw_potentials)
from fiberforce.constants import C_LIGHT, EPS0, HBAR
from fiberforce.modes import characteristic
from fiberforce.scan import run_scan

from oracles import half_space_ground_potential

OMEGA0 = 2.0 * np.pi * C_LIGHT / 780e-9
GAMMA0 = 2.0 * np.pi * 6.065e6
GOLDEN = Path(__file__).parent / "golden"


def _report(num, name, ok):
    print(f"\nACCEPTANCE {num} ({name}): {'PASS' if ok else 'FAIL'}")
    assert ok, f"acceptance criterion {num} ({name}) failed"


def _atom(ori):
    return AtomSpec(wavelength=780e-9, gamma0=GAMMA0, orientation=ori)


def test_acceptance_1_mode_solver(fiber):
    t0 = time.time()
    ids = list_guided_modes(fiber, OMEGA0, include_directions=False)
    ok = sorted(f"{m.family}{m.l}{m.m}" for m in ids) == \
        ["HE11", "HE21", "TE01", "TM01"]
    for mid in ids:
        mode = solve_mode(fiber, OMEGA0, mid.family, mid.l, mid.m)
        db = mode.beta * 1e-7
        hi, _ = characteristic(fiber, OMEGA0, mid.family, mid.l,
                               mode.beta + db)
        lo, _ = characteristic(fiber, OMEGA0, mid.family, mid.l,
                               mode.beta - db)
        res, _ = characteristic(fiber, OMEGA0, mid.family, mid.l,
                                mode.beta)
        ok &= abs(res / ((hi - lo) / (2 * db))) / mode.beta < 1e-10
        ok &= abs(mode.normalization_residual() - 1.0) < 1e-6
    ok &= (time.time() - t0) < 1.0
    _report(1, "mode solver", ok)


def test_acceptance_2_rate_oracle_equivalence(fiber):
    t0 = time.time()
    d = _atom((1j, 1, -1)).dipole_cyl(0.3)
    ok = True
    for r in np.linspace(1.05, 3.0, 10) * fiber.radius_a:
        modal = decay_rates(fiber, OMEGA0, d, r).total
        g = coincidence_green(fiber, OMEGA0, r)
        im_total = free_space_im_green(OMEGA0) + np.imag(g)
        green = (2.0 * OMEGA0**2 / (HBAR * EPS0 * C_LIGHT**2)
                 * np.real(np.dot(d, im_total @ np.conj(d))))
        ok &= abs(modal / green - 1.0) < 1e-6
    far = decay_rates(fiber, OMEGA0, _atom((1, 0, 0)).dipole_cyl(0.0),
                      10 * fiber.radius_a).total
    ok &= abs(far / GAMMA0 - 1.0) < 0.02
    ok &= (time.time() - t0) < 60.0
    _report(2, "rate oracle equivalence", ok)


def test_acceptance_3_green_properties(fiber):
    t0 = time.time()
    rng = np.random.default_rng(42)
    ok = True
    for _ in range(3):
        r1, r2 = fiber.radius_a * (1.1 + 1.5 * rng.random(2))
        pt1 = (r1, float(rng.uniform(-np.pi, np.pi)),
               float(rng.uniform(-2e-7, 2e-7)))
        pt2 = (r2, float(rng.uniform(-np.pi, np.pi)),
               float(rng.uniform(-2e-7, 2e-7)))
        g12 = scattered_green(fiber, OMEGA0, pt1, pt2)
        g21 = scattered_green(fiber, OMEGA0, pt2, pt1)
        scale = np.max(np.abs(g12))
        ok &= np.max(np.abs(g12 - g21.T)) / scale < 1e-8  # reciprocity
    r = fiber.radius_a * 1.6
    giu = coincidence_green_iu(fiber, 0.7 * OMEGA0, r)
    ok &= np.max(np.abs(np.imag(giu))) / np.max(np.abs(giu)) < 1e-8
    g = coincidence_green(fiber, OMEGA0, r)
    scale = np.max(np.abs(g))
    for i, j in ((0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)):
        ok &= abs(g[i, j]) / scale < 1e-8
    ok &= (time.time() - t0) < 60.0
    _report(3, "green tensor properties", ok)


def test_acceptance_4_recoil_structure(fiber):
    r = fiber.radius_a + 200e-9
    ratios_z, ratios_phi = [], []
    for ori in ((1j, 0, -1), (2j, 0, 1j - 1), (1 + 1j, 0, -2)):
        atom = _atom(ori)
        d = atom.dipole_cyl(0.0)
        f = spon_recoil_force(fiber, atom, r)
        ratios_z.append(f[2] / np.imag(np.conj(d[0]) * d[2]))
    for ori in ((1, 1j, 0), (1, 2j, 0)):
        atom = _atom(ori)
        d = atom.dipole_cyl(0.0)
        f = spon_recoil_force(fiber, atom, r)
        ratios_phi.append(f[1] / np.imag(np.conj(d[0]) * d[1]))
    rz = np.array(ratios_z)
    rp = np.array(ratios_phi)
    ok = np.max(np.abs(rz / rz[0] - 1.0)) < 1e-6
    ok &= np.max(np.abs(rp / rp[0] - 1.0)) < 1e-6

    atom_rot = _atom((1j, 0, -1))
    f_rot = spon_recoil_force(fiber, atom_rot, r)
    f_real = spon_recoil_force(fiber, _atom((1, 1, 1)), r)
    ok &= np.max(np.abs(f_real)) < 1e-10 * np.max(np.abs(f_rot))
    ok &= abs(f_rot[0]) < 1e-10 * np.max(np.abs(f_rot))
    f_green = spon_recoil_force(fiber, atom_rot, r, route="green")
    ok &= np.max(np.abs(f_rot - f_green)) / np.max(np.abs(f_rot)) < 1e-5
    fz = [spon_recoil_force(fiber, atom_rot, rr)[2]
          for rr in np.linspace(1.05, 3.0, 40) * fiber.radius_a]
    signs = np.sign(fz)
    ok &= np.sum(signs[1:] != signs[:-1]) >= 2
    _report(4, "recoil-force structure", ok)


def test_acceptance_5_steady_state_identities(fiber):
    gamma = GAMMA0
    omega, delta = (1 + 0.5j) * gamma, -0.3 * gamma
    st = steady_state(omega, delta, gamma)
    d_ee = 0.5j * (omega * st.rho_ge - np.conj(omega) * st.rho_eg) \
        - gamma * st.rho_ee
    d_ge = 0.5j * np.conj(omega) * (2 * st.rho_ee - 1.0) \
        - (0.5 * gamma + 1j * delta) * st.rho_ge
    ok = abs(d_ee) < 1e-12 * gamma and abs(d_ge) < 1e-12 * gamma

    atom = _atom((1j, 0, -1))
    r = fiber.radius_a + 200e-9
    mode = solve_mode(fiber, OMEGA0, "HE", 1, 1)
    drive = DriveField(mode, power=1e-12, f=+1, polarization="linear")
    fb = total_force(fiber, drive, atom, r, include_level_shift=False)
    fz_expect = drive.f * HBAR * mode.beta * fb.gamma * fb.rho_ee
    ok &= abs(fb.f_drv[2] / fz_expect - 1.0) < 1e-10
    budget = fz_expect + fb.rho_ee * fb.f_spon[2]
    ok &= abs(fb.f_total[2] / budget - 1.0) < 1e-9
    _report(5, "steady-state identities", ok)


@pytest.mark.slow
def test_acceptance_6_vdw_structure(fiber):
    atom_r, atom_phi, atom_z = (_atom(o) for o in
                                ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    r200 = fiber.radius_a + 200e-9
    p = vdw_potentials(fiber, atom_r, r200)
    ok = (p.u_g == -p.u_e_off)
    radii = np.array([1.05, 1.2, 1.5, 2.0, 3.0, 4.0]) * fiber.radius_a
    for atom in (atom_r, atom_phi, atom_z):
        u = np.array([vdw_potentials(fiber, atom, rr, tol=1e-6).u_g
                      for rr in radii])
        ok &= np.all(u < 0) and np.all(np.diff(u) > 0)
    u_e = np.array([vdw_potentials(fiber, atom_r, rr, tol=1e-6).u_e
                    for rr in np.linspace(1.05, 4.0, 16)
                    * fiber.radius_a])
    ok &= np.sum(np.diff(np.sign(np.diff(u_e))) != 0) >= 1
    for atom in (atom_r, atom_phi, atom_z):
        pp = vdw_potentials(fiber, atom, r200)
        ok &= abs(pp.u_e_res) > abs(pp.u_e_off)
    ell = 0.02 * fiber.radius_a
    u_cyl = vdw_potentials(fiber, atom_r, fiber.radius_a + ell,
                           tol=1e-4, n_h=40).u_g
    u_ref = half_space_ground_potential(
        fiber.n1**2, OMEGA0, 0.0, atom_r.dipole_magnitude**2, ell)
    ok &= abs(u_cyl / u_ref - 1.0) < 0.05
    _report(6, "vdW structure", ok)


def test_acceptance_7_chirality(fiber):
    atom = _atom((1j, 0, -1))
    r = fiber.radius_a + 200e-9
    gamma = decay_rates(fiber, OMEGA0, atom.dipole_cyl(0.0), r).total

    def fz(args, pol, f_dir):
        drive = DriveField(solve_mode(fiber, OMEGA0, *args), power=1e-12,
                           f=f_dir, polarization=pol)
        st = steady_state(rabi_frequency(drive, atom, r), 0.0, gamma)
        return driving_force(drive, atom, st, r, 0.0)[2]

    ok = True
    for args, pol in ((("HE", 1, 1), "linear"), (("TM", 0, 1), "tm"),
                      (("HE", 2, 1), "linear")):
        ratio = abs(fz(args, pol, +1)) / abs(fz(args, pol, -1))
        ok &= ratio > 1.1 or ratio < 1 / 1.1
    scale = abs(fz(("HE", 1, 1), "linear", +1))
    ok &= abs(fz(("TE", 0, 1), "te", +1) - fz(("TE", 0, 1), "te", -1)) \
        < 1e-12 * scale

    rates = guided_rates(fiber, OMEGA0, atom.dipole_cyl(0.0), r)
    by_dir = {}
    for e in rates:
        by_dir.setdefault((e.family, e.l, e.m), {})[e.f] = e.gamma
    ok &= any(abs(v[+1] - v[-1]) > 1e-3 * (v[+1] + v[-1])
              for v in by_dir.values())
    real_rates = guided_rates(fiber, OMEGA0,
                              _atom((1, 0, 0)).dipole_cyl(0.0), r)
    by_dir = {}
    for e in real_rates:
        by_dir.setdefault((e.family, e.l, e.m), {})[e.f] = e.gamma
    ok &= all(abs(v[+1] - v[-1]) <= 1e-10 * (v[+1] + v[-1] + GAMMA0)
              for v in by_dir.values())
    _report(7, "chirality signatures", ok)


@pytest.mark.slow
def test_acceptance_8_figure_scenarios(tmp_path):
    from fiberforce.cli import _scenario_names, load_scenario

    t0 = time.time()
    names = _scenario_names()
    ok = names == [f"fig{i}" for i in range(2, 22)]
    produced = []
    for name in names:
        cfg = load_scenario(name)
        produced += run_scan(cfg, tmp_path, threads=1)
    ok &= (time.time() - t0) < 30 * 60
    for path in produced:
        golden = GOLDEN / path.name
        ok &= golden.is_file() and \
            path.read_bytes() == golden.read_bytes()
        if not ok:
            print(f"mismatch or missing golden for {path.name}")
            break
    _report(8, "figure-scenario regression", ok)
