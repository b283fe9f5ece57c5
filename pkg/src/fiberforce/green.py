"""Scattered dyadic Green tensor of the cylinder, exterior points.

The scattering contribution to the electromagnetic Green tensor is an
azimuthal sum and an axial-wavenumber integral over cylindrical vector
waves.  With M/N waves built on the outgoing radial function Z and the
2x2 surface reflection matrix R (mixing M and N on the cylinder),

    G_R(r1, r2) = (i / 8 pi) sum_l int dh (1 / eta2^2)
        [ (R_MM M + R_NM N)(r1) (x) Mbar(r2)
        + (R_MN M + R_NN N)(r1) (x) Nbar(r2) ]
        exp(i l (phi1 - phi2) + i h (z1 - z2)),

with eta_j^2 = k_j^2 - h^2 the transverse wavenumbers.  Depending on the
sign of eta2^2 the radial functions are Hankel H1 (oscillatory regime)
or modified Bessel K (evanescent regime); evanescent blocks are computed
with exponentially scaled Bessels and the overall decay
``exp(-g2 (r1 + r2 - 2a))`` factored out, and all surface quantities are
normalized to their value at the surface so that no intermediate result
overflows for any azimuthal order.

On the real frequency axis the integrand has poles at the guided-mode
propagation constants h = +/-beta_j; the integral is taken as principal
value plus ``i pi [res(+beta_j) - res(-beta_j)]`` (the retarded
prescription), with residues evaluated by a small contour quadrature in
complex h.  On the imaginary frequency axis everything is evanescent,
pole-free and real.
"""

from __future__ import annotations

import functools

import numpy as np
from scipy.special import h1vp, hankel1, ive, jv, jvp, kve

from .constants import C_LIGHT, EPS0, MU0
from .errors import InsideFiber
from .kernels import solve_4x2
from .modes import FiberSpec, _cached_roots

_Z0 = np.sqrt(MU0 / EPS0)


# ----------------------------------------------------------------------
# Quadrature grids
# ----------------------------------------------------------------------

@functools.lru_cache(maxsize=32)
def _gl(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _gl_map(n, lo, hi):
    x, w = _gl(n)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return mid + half * x, half * w


# ----------------------------------------------------------------------
# Surface reflection matrix
# ----------------------------------------------------------------------

def _tang_m(l, h, a, eta_sq, Z, dZ):
    """Tangential (Ez, Ephi, Hz, Hphi) of an M-type wave at radius a."""
    zero = np.zeros_like(Z)
    return [zero, -dZ, eta_sq * Z, -(h * l / a) * Z]


def _tang_n(l, h, a, eta_sq, kt, Z, dZ):
    """Tangential (Ez, Ephi, Hz, Hphi) of an N-type wave at radius a."""
    zero = np.zeros_like(Z)
    return [(eta_sq / kt) * Z, -(h * l / (kt * a)) * Z, zero, -kt * dZ]


def _reflection(l, h, a, kt1, kt2, eta1_sq, eta2_sq,
                out_vals, inc_vals, in_vals):
    """Solve the surface matching; returns the 2x2 reflection matrix.

    ``out/inc/in_vals`` are (Z, dZ) pairs of the outgoing, incident and
    transmitted radial basis at r = a (any per-column scaling).  Output
    ``R[:, i, j]`` is the amplitude of outgoing type i (0 = M, 1 = N)
    per unit incident type j.
    """
    n = np.broadcast(h, out_vals[0]).size
    mat = np.zeros((n, 4, 4), dtype=complex)
    rhs = np.zeros((n, 4, 2), dtype=complex)
    cols = [
        _tang_m(l, h, a, eta2_sq, *out_vals),
        _tang_n(l, h, a, eta2_sq, kt2, *out_vals),
        _tang_m(l, h, a, eta1_sq, *in_vals),
        _tang_n(l, h, a, eta1_sq, kt1, *in_vals),
    ]
    rows_rhs = [
        _tang_m(l, h, a, eta2_sq, *inc_vals),
        _tang_n(l, h, a, eta2_sq, kt2, *inc_vals),
    ]
    for j in range(4):
        sgn = 1.0 if j < 2 else -1.0
        for i in range(4):
            mat[:, i, j] = sgn * cols[j][i]
    for j in range(2):
        for i in range(4):
            rhs[:, i, j] = -rows_rhs[j][i]
    x = solve_4x2(mat, rhs)
    return x[:, 0:2, :].transpose(0, 1, 2)  # (n, out_type, inc_type)


# ----------------------------------------------------------------------
# Per-node Green density
# ----------------------------------------------------------------------

def _assemble(l, h, r1, r2, kt2, eta2_sq, R, fa, z1v, z2v, grad=False):
    """Outer-product assembly of the scattered Green density.

    ``z1v = (Z1, dZ1, d2Z1)`` are the (scaled) outgoing radial function
    and its first two r-derivatives at r1, ``z2v = (Z2, dZ2)`` at r2;
    ``fa`` is the per-node scalar collecting reflection normalization,
    regime phase and the factored exponential.  Returns (n, 3, 3), plus
    the radial-derivative block when ``grad`` is set.
    """
    Z1, dZ1, d2Z1 = z1v
    Z2, dZ2 = z2v
    il = 1j * l

    m1 = np.stack([(il / r1) * Z1, -dZ1, np.zeros_like(Z1)], axis=-1)
    n1 = np.stack([1j * h * dZ1, -(h * l / r1) * Z1, eta2_sq * Z1],
                  axis=-1) / kt2
    m2 = np.stack([(-il / r2) * Z2, -dZ2, np.zeros_like(Z2)], axis=-1)
    n2 = np.stack([-1j * h * dZ2, -(h * l / r2) * Z2, eta2_sq * Z2],
                  axis=-1) / kt2

    a1 = R[:, 0, 0, None] * m1 + R[:, 1, 0, None] * n1
    b1 = R[:, 0, 1, None] * m1 + R[:, 1, 1, None] * n1
    dens = (a1[:, :, None] * m2[:, None, :]
            + b1[:, :, None] * n2[:, None, :]) * fa[:, None, None]
    if not grad:
        return dens
    dm1 = np.stack([il * (dZ1 / r1 - Z1 / r1**2), -d2Z1,
                    np.zeros_like(Z1)], axis=-1)
    dn1 = np.stack([1j * h * d2Z1, -h * l * (dZ1 / r1 - Z1 / r1**2),
                    eta2_sq * dZ1], axis=-1) / kt2
    da1 = R[:, 0, 0, None] * dm1 + R[:, 1, 0, None] * dn1
    db1 = R[:, 0, 1, None] * dm1 + R[:, 1, 1, None] * dn1
    ddens = (da1[:, :, None] * m2[:, None, :]
             + db1[:, :, None] * n2[:, None, :]) * fa[:, None, None]
    return dens, ddens


def _kprime(l, x):
    """Scaled derivative: K_l'(x) e^x given via kve recurrence."""
    return -0.5 * (kve(l - 1, x) + kve(l + 1, x))


def _iprime(l, x):
    """Scaled derivative: I_l'(x) e^-x given via ive recurrence."""
    return 0.5 * (ive(l - 1, x) + ive(l + 1, x))


def _density_osc(fiber, l, h, k1sq, k2sq, kt1, kt2, r1, r2, grad):
    """Oscillatory-regime density (real omega, |h| < k n2)."""
    a = fiber.radius_a
    eta2_sq = k2sq - h**2
    eta1_sq = k1sq - h**2
    eta2 = np.sqrt(eta2_sq)
    eta1 = np.sqrt(eta1_sq)

    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        ha = hankel1(l, eta2 * a)
        dha = eta2 * h1vp(l, eta2 * a)
        out_vals = (np.ones_like(ha), dha / ha)
        inc_vals = (jv(l, eta2 * a), eta2 * jvp(l, eta2 * a))
        in_vals = (jv(l, eta1 * a), eta1 * jvp(l, eta1 * a))
        R = _reflection(l, h, a, kt1, kt2, eta1_sq, eta2_sq,
                        out_vals, inc_vals, in_vals)

        x1 = eta2 * r1
        Z1 = hankel1(l, x1) / ha
        dZ1 = eta2 * h1vp(l, x1) / ha
        d2Z1 = eta2_sq * (-h1vp(l, x1) / x1
                          - (1.0 - l**2 / x1**2) * hankel1(l, x1)) / ha
        x2 = eta2 * r2
        Z2 = hankel1(l, x2) / ha
        dZ2 = eta2 * h1vp(l, x2) / ha

        fa = (1j / (8.0 * np.pi)) / eta2_sq * ha
        out = _assemble(l, h, r1, r2, kt2, eta2_sq, R, fa,
                        (Z1, dZ1, d2Z1), (Z2, dZ2), grad=grad)
    return out


def _density_evan(fiber, l, h, k1sq, k2sq, kt1, kt2, r1, r2, grad):
    """Evanescent-regime density (g2 = sqrt(h^2 - k2^2), Re g2 > 0).

    Valid for real h outside the light line and for complex h (residue
    contours); on the imaginary frequency axis every h lands here.
    """
    a = fiber.radius_a
    g2 = np.sqrt(h * h - k2sq + 0j)
    eta2_sq = -g2 * g2
    eta1_sq = k1sq - h * h

    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        ka = kve(l, g2 * a)
        dka = g2 * _kprime(l, g2 * a)
        out_vals = (np.ones_like(ka), dka / ka)
        ia = ive(l, g2 * a)
        inc_vals = (np.ones_like(ia), g2 * _iprime(l, g2 * a) / ia)

        # interior: oscillatory (real eta1) or evanescent (scaled I)
        ev_in = np.real(eta1_sq) <= 0
        if np.all(ev_in):
            g1 = np.sqrt(-eta1_sq + 0j)
            in_vals = (np.ones_like(g1), g1 * _iprime(l, g1 * a)
                       / ive(l, g1 * a))
        elif not np.any(ev_in):
            eta1 = np.sqrt(eta1_sq + 0j)
            in_vals = (jv(l, eta1 * a), eta1 * jvp(l, eta1 * a))
        else:
            g1 = np.sqrt(np.where(ev_in, -eta1_sq, 1.0) + 0j)
            eta1 = np.sqrt(np.where(ev_in, 1.0, eta1_sq) + 0j)
            iv_ = (np.ones_like(g1), g1 * _iprime(l, g1 * a) / ive(l, g1 * a))
            jv_ = (jv(l, eta1 * a), eta1 * jvp(l, eta1 * a))
            in_vals = (np.where(ev_in, iv_[0], jv_[0]),
                       np.where(ev_in, iv_[1], jv_[1]))

        R = _reflection(l, h, a, kt1, kt2, eta1_sq, eta2_sq,
                        out_vals, inc_vals, in_vals)

        x1 = g2 * r1
        Z1 = kve(l, x1) / ka
        dZ1 = g2 * _kprime(l, x1) / ka
        d2Z1 = (g2 * g2) * (-_kprime(l, x1) / x1
                            + (1.0 + l**2 / x1**2) * kve(l, x1)) / ka
        x2 = g2 * r2
        Z2 = kve(l, x2) / ka
        dZ2 = g2 * _kprime(l, x2) / ka

        # Continuation of the oscillatory-band factor (i/8pi)(1/eta2^2)
        # H1(r1) H1(r2) R to eta2 = i g2: the (2/pi)(-i)^(l+1) phases of
        # the two Hankel continuations and the i^l of the incident J
        # combine to an overall +1, leaving (1/4pi^2 eta2^2)(I K at a).
        expfac = np.exp(-g2 * (r1 + r2 - 2.0 * a))
        fa = (1.0 / (4.0 * np.pi**2 * eta2_sq)) * (ia * ka) * expfac
        out = _assemble(l, h, r1, r2, kt2, eta2_sq, R, fa,
                        (Z1, dZ1, d2Z1), (Z2, dZ2), grad=grad)
    return out


def _density(fiber, omega_sq, l, h, r1, r2, grad=False):
    """Scattered Green h-density at azimuthal order l.

    ``omega_sq`` is omega^2 (negative for imaginary frequencies); ``h``
    may be a real array or a complex array (evanescent branch only).
    Non-finite nodes (deep centrifugal barrier) are returned as zero.
    """
    k1sq = omega_sq * fiber.n1**2 / C_LIGHT**2
    k2sq = omega_sq * fiber.n2**2 / C_LIGHT**2
    kt1 = np.sqrt(k1sq + 0j)
    kt2 = np.sqrt(k2sq + 0j)
    h = np.asarray(h)

    if np.isrealobj(h) and np.real(k2sq) > 0:
        osc = (h * h) < np.real(k2sq)
    else:
        osc = np.zeros(h.shape, dtype=bool)

    parts = []
    if grad:
        dens = np.zeros(h.shape + (3, 3), dtype=complex)
        ddens = np.zeros_like(dens)
        if np.any(osc):
            d, dd = _density_osc(fiber, l, h[osc], k1sq, k2sq, kt1, kt2,
                                 r1, r2, True)
            dens[osc], ddens[osc] = d, dd
        if np.any(~osc):
            d, dd = _density_evan(fiber, l, h[~osc].astype(complex), k1sq,
                                  k2sq, kt1, kt2, r1, r2, True)
            dens[~osc], ddens[~osc] = d, dd
        bad = ~np.all(np.isfinite(dens) & np.isfinite(ddens), axis=(1, 2))
        dens[bad] = 0.0
        ddens[bad] = 0.0
        return dens, ddens

    dens = np.zeros(h.shape + (3, 3), dtype=complex)
    if np.any(osc):
        dens[osc] = _density_osc(fiber, l, h[osc], k1sq, k2sq, kt1, kt2,
                                 r1, r2, False)
    if np.any(~osc):
        dens[~osc] = _density_evan(fiber, l, h[~osc].astype(complex), k1sq,
                                   k2sq, kt1, kt2, r1, r2, False)
    bad = ~np.all(np.isfinite(dens), axis=(1, 2))
    dens[bad] = 0.0
    return dens


# ----------------------------------------------------------------------
# Real-frequency h integral: PV panels plus pole terms
# ----------------------------------------------------------------------

def _guided_poles(fiber, omega, l):
    """Guided propagation constants acting as poles at azimuthal order l."""
    betas = []
    if l == 0:
        betas += _cached_roots(fiber, omega, "TE", 0)
        betas += _cached_roots(fiber, omega, "TM", 0)
    else:
        betas += _cached_roots(fiber, omega, "HE", abs(l))
        betas += _cached_roots(fiber, omega, "EH", abs(l))
    return sorted(betas)


def _residue(fiber, omega_sq, l, beta, r1, r2, dz, grad, n_circ=16,
             radius_frac=2e-6):
    """Residue of the h-density at the pole h = beta (complex contour)."""
    rad = radius_frac * abs(beta)
    th = 2.0 * np.pi * (np.arange(n_circ) + 0.5) / n_circ
    hc = beta + rad * np.exp(1j * th)
    out = _density(fiber, omega_sq, l, hc, r1, r2, grad=grad)
    phase = np.exp(1j * hc * dz)
    if grad:
        dens, ddens = out
        dens = dens * phase[:, None, None]
        zrow = dens * (1j * hc)[:, None, None]
        ddens = ddens * phase[:, None, None]
        stack = np.stack([dens, ddens, zrow], axis=0)
        circ = (hc - beta)[None, :, None, None]
        return np.mean(stack * circ, axis=1)
    dens = dens_phase = out * phase[:, None, None]
    return np.mean(dens_phase * (hc - beta)[:, None, None], axis=0)


def _real_axis_segments(fiber, omega, l, r1, r2, n_osc, n_evan, n_tail):
    """Quadrature segments for the real-h line at azimuthal order l.

    Returns ``(betas, segments)`` where each segment is a tuple
    ``(h_nodes, weights, pole)``; ``pole`` is the pole location when the
    segment is a symmetric principal-value panel, else None.
    """
    k = omega / C_LIGHT
    k2, k1 = k * fiber.n2, k * fiber.n1
    segments = []

    # oscillatory band via h = k2 sin(theta), both signs at once
    th, tw = _gl_map(2 * n_osc, -np.pi / 2, np.pi / 2)
    segments.append((k2 * np.sin(th), k2 * np.cos(th) * tw, None))

    # evanescent band (k2, k1) and its mirror, with pole panels
    betas = _guided_poles(fiber, omega, l)
    for sgn in (+1.0, -1.0):
        cuts = [k2]
        panels = []
        for b in betas:
            half = 0.45 * min(b - cuts[-1], k1 - b)
            panels.append((b, half))
            cuts += [b - half, b + half]
        cuts.append(k1)
        for slo, shi in zip(cuts[0::2], cuts[1::2]):
            if shi > slo:
                x, w = _gl_map(n_evan, slo, shi)
                segments.append((sgn * x, w, None))
        for b, half in panels:
            x, w = _gl_map(n_evan, b - half, b + half)
            segments.append((sgn * x, w, sgn * b))

    # tail |h| > k1, tan map, both signs
    scale = max(r1 + r2 - 2.0 * fiber.radius_a, 1e-3 * fiber.radius_a)
    th, tw = _gl_map(n_tail, 0.0, np.pi / 2)
    tanth = np.tan(th)
    for sgn in (+1.0, -1.0):
        segments.append((sgn * (k1 + tanth / scale),
                         tw / (np.cos(th) ** 2 * scale), None))
    return betas, segments


def _check_exterior_pair(fiber, r1, r2):
    for r in (r1, r2):
        if r < fiber.radius_a:
            raise InsideFiber(f"field point radius {r:.4g} m inside fiber")


def _near_surface_l(fiber, rmin):
    # The image-charge (large-h evanescent) band converges in l only
    # once l is several times r / (r - a); widen the cap accordingly
    # for field points close to the surface.
    gap = max(rmin - fiber.radius_a, 1e-4 * fiber.radius_a)
    return int(10.0 * fiber.radius_a / gap)


def _l_schedule(lmax):
    for labs in range(0, lmax + 1):
        yield (0,) if labs == 0 else (labs, -labs)


def scattered_green(fiber: FiberSpec, omega: float, pt1, pt2,
                    lmax=None, n_osc=60, n_evan=40, n_tail=80,
                    ltol=1e-11):
    """Scattered Green tensor between two exterior points at real omega.

    ``pt1``/``pt2`` are (r, phi, z) triples; the result is the (3, 3)
    complex tensor with rows in the cylindrical basis at pt1 and columns
    in the basis at pt2.
    """
    r1, phi1, z1 = pt1
    r2, phi2, z2 = pt2
    _check_exterior_pair(fiber, r1, r2)
    dphi, dz = phi1 - phi2, z1 - z2
    omega_sq = omega**2
    if lmax is None:
        lmax = int(np.ceil(omega / C_LIGHT * fiber.n2 * max(r1, r2))) + 35 \
            + _near_surface_l(fiber, min(r1, r2))

    total = np.zeros((3, 3), dtype=complex)
    tail_small = 0
    for ls in _l_schedule(lmax):
        block = np.zeros((3, 3), dtype=complex)
        for l in ls:
            betas, segments = _real_axis_segments(
                fiber, omega, l, r1, r2, n_osc, n_evan, n_tail)
            residues = {}
            for b in betas:
                for sb in (+b, -b):
                    residues[sb] = _residue(
                        fiber, omega_sq, l, sb, r1, r2, dz, False)
            contrib = np.zeros((3, 3), dtype=complex)
            for hn, wn, pole in segments:
                dens = _density(fiber, omega_sq, l, hn, r1, r2)
                val = dens * np.exp(1j * hn * dz)[:, None, None]
                if pole is not None:
                    val = val - residues[pole][None] \
                        / (hn - pole)[:, None, None]
                contrib += np.einsum("n,nij->ij", wn, val)
            for b in betas:
                contrib += 1j * np.pi * (residues[+b] - residues[-b])
            block += contrib * np.exp(1j * l * dphi)
        total += block
        if ls[0] > 2:
            rel = np.max(np.abs(block)) / max(np.max(np.abs(total)), 1e-300)
            tail_small = tail_small + 1 if rel < ltol else 0
            if tail_small >= 2:
                break
    return total


_PHI_GEN = np.zeros((3, 3))
_PHI_GEN[0, 1] = -1.0  # (J G)_r gets -G_phi.
_PHI_GEN[1, 0] = +1.0  # (J G)_phi gets +G_r.


def coincidence_green(fiber: FiberSpec, omega: float, r: float, **kw):
    """Scattered Green tensor at coincidence, G_R(R, R; omega).

    By symmetry this depends only on the radius; the tensor is returned
    in the local cylindrical basis.
    """
    return scattered_green(fiber, omega, (r, 0.0, 0.0), (r, 0.0, 0.0), **kw)


def coincidence_green_gradient(fiber: FiberSpec, omega: float, r: float,
                               lmax=None, n_osc=60, n_evan=40, n_tail=80,
                               ltol=1e-11):
    """First-argument gradient of the scattered Green tensor at
    coincidence.

    Returns ``(G, grad)`` with ``grad[k, i, j] = (nabla_k G_R)_ij
    (R, R')|_{R'=R}`` where the derivative acts on the first argument
    only and the azimuthal row is frame-corrected (derivative of the
    Cartesian components re-expressed in the local cylindrical basis).
    """
    if r < fiber.radius_a:
        raise InsideFiber(f"field point radius {r:.4g} m inside fiber")
    omega_sq = omega**2
    if lmax is None:
        lmax = int(np.ceil(omega / C_LIGHT * fiber.n2 * r)) + 35 \
            + _near_surface_l(fiber, r)

    total = np.zeros((3, 3), dtype=complex)
    grad = np.zeros((3, 3, 3), dtype=complex)
    tail_small = 0
    for ls in _l_schedule(lmax):
        block = np.zeros((3, 3), dtype=complex)
        gblock = np.zeros((3, 3, 3), dtype=complex)
        for l in ls:
            betas, segments = _real_axis_segments(
                fiber, omega, l, r, r, n_osc, n_evan, n_tail)
            residues = {}
            for b in betas:
                for sb in (+b, -b):
                    residues[sb] = _residue(
                        fiber, omega_sq, l, sb, r, r, 0.0, True)
            g_l = np.zeros((3, 3), dtype=complex)
            dr_l = np.zeros((3, 3), dtype=complex)
            dz_l = np.zeros((3, 3), dtype=complex)
            for hn, wn, pole in segments:
                dens, ddens = _density(fiber, omega_sq, l, hn, r, r,
                                       grad=True)
                zdens = dens * (1j * hn)[:, None, None]
                if pole is not None:
                    res = residues[pole]
                    inv = 1.0 / (hn - pole)[:, None, None]
                    dens = dens - res[0][None] * inv
                    ddens = ddens - res[1][None] * inv
                    zdens = zdens - res[2][None] * inv
                g_l += np.einsum("n,nij->ij", wn, dens)
                dr_l += np.einsum("n,nij->ij", wn, ddens)
                dz_l += np.einsum("n,nij->ij", wn, zdens)
            for b in betas:
                g_l += 1j * np.pi * (residues[+b][0] - residues[-b][0])
                dr_l += 1j * np.pi * (residues[+b][1] - residues[-b][1])
                dz_l += 1j * np.pi * (residues[+b][2] - residues[-b][2])
            block += g_l
            gblock[0] += dr_l
            gblock[1] += (1j * l * g_l + _PHI_GEN @ g_l) / r
            gblock[2] += dz_l
        total += block
        grad += gblock
        if ls[0] > 2:
            rel = max(np.max(np.abs(block)) / max(np.max(np.abs(total)),
                                                  1e-300),
                      np.max(np.abs(gblock)) / max(np.max(np.abs(grad)),
                                                   1e-300))
            tail_small = tail_small + 1 if rel < ltol else 0
            if tail_small >= 2:
                break
    return total, grad


# ----------------------------------------------------------------------
# Imaginary frequency axis
# ----------------------------------------------------------------------

def scattered_green_iu(fiber: FiberSpec, u: float, pt1, pt2,
                       lmax=None, n_h=120, ltol=1e-11):
    """Scattered Green tensor at imaginary frequency omega = i u.

    Everything is evanescent and pole-free; the result is real.  The
    axial integral uses a tangent map with decay scale set by the
    factored exponential ``exp(-g2 (r1 + r2 - 2a))``.
    """
    r1, phi1, z1 = pt1
    r2, phi2, z2 = pt2
    _check_exterior_pair(fiber, r1, r2)
    dphi, dz = phi1 - phi2, z1 - z2
    omega_sq = -(u * u)
    if lmax is None:
        lmax = 60 + _near_surface_l(fiber, min(r1, r2))

    scale = max(r1 + r2 - 2.0 * fiber.radius_a, 1e-3 * fiber.radius_a)
    th, tw = _gl_map(n_h, -np.pi / 2, np.pi / 2)
    hn = np.tan(th) / scale
    wn = tw / (np.cos(th) ** 2 * scale)

    total = np.zeros((3, 3), dtype=complex)
    tail_small = 0
    for ls in _l_schedule(lmax):
        block = np.zeros((3, 3), dtype=complex)
        for l in ls:
            dens = _density(fiber, omega_sq, l, hn, r1, r2)
            val = dens * np.exp(1j * hn * dz)[:, None, None]
            block += np.einsum("n,nij->ij", wn, val) * np.exp(1j * l * dphi)
        total += block
        if ls[0] > 2:
            rel = np.max(np.abs(block)) / max(np.max(np.abs(total)), 1e-300)
            tail_small = tail_small + 1 if rel < ltol else 0
            if tail_small >= 2:
                break
    return total


def coincidence_green_iu(fiber: FiberSpec, u: float, r: float, **kw):
    """Real scattered Green tensor at coincidence on the imaginary axis."""
    g = scattered_green_iu(fiber, u, (r, 0.0, 0.0), (r, 0.0, 0.0), **kw)
    return np.real(g)


def coincidence_green_iu_gradient(fiber: FiberSpec, u: float, r: float,
                                  lmax=None, n_h=120, ltol=1e-11):
    """Coincidence tensor and its first-argument gradient at omega = i u.

    Returns real arrays ``(G, grad)`` with the same layout as
    :func:`coincidence_green_gradient`; the integral is pole-free so no
    residue handling is needed.
    """
    if r < fiber.radius_a:
        raise InsideFiber(f"field point radius {r:.4g} m inside fiber")
    omega_sq = -(u * u)
    if lmax is None:
        lmax = 60 + _near_surface_l(fiber, r)

    scale = max(2.0 * (r - fiber.radius_a), 1e-3 * fiber.radius_a)
    th, tw = _gl_map(n_h, -np.pi / 2, np.pi / 2)
    hn = np.tan(th) / scale
    wn = tw / (np.cos(th) ** 2 * scale)

    total = np.zeros((3, 3), dtype=complex)
    grad = np.zeros((3, 3, 3), dtype=complex)
    tail_small = 0
    for ls in _l_schedule(lmax):
        block = np.zeros((3, 3), dtype=complex)
        gblock = np.zeros((3, 3, 3), dtype=complex)
        for l in ls:
            dens, ddens = _density(fiber, omega_sq, l, hn, r, r, grad=True)
            g_l = np.einsum("n,nij->ij", wn, dens)
            dr_l = np.einsum("n,nij->ij", wn, ddens)
            dz_l = np.einsum("n,nij->ij", wn * 1j * hn, dens)
            block += g_l
            gblock[0] += dr_l
            gblock[1] += (1j * l * g_l + _PHI_GEN @ g_l) / r
            gblock[2] += dz_l
        total += block
        grad += gblock
        if ls[0] > 2:
            rel = max(np.max(np.abs(block)) / max(np.max(np.abs(total)),
                                                  1e-300),
                      np.max(np.abs(gblock)) / max(np.max(np.abs(grad)),
                                                   1e-300))
            tail_small = tail_small + 1 if rel < ltol else 0
            if tail_small >= 2:
                break
    return np.real(total), np.real(grad)


def free_space_im_green(omega: float) -> np.ndarray:
    """Imaginary part of the free-space Green tensor at coincidence."""
    return np.eye(3) * omega / (6.0 * np.pi * C_LIGHT)
