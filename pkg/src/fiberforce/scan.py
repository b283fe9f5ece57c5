"""Configuration-driven scan engine producing CSV datasets.

A scan configuration is a small key-value tree (YAML on disk) declaring
the fiber, the atom, the guided drive, the physics switches, a scan
axis (radial, azimuthal, or an r-phi grid) and a list of output
quantities.  Several curves can share one grid: each curve overrides a
subset of the base configuration (typically the drive mode or the
dipole orientation) and contributes one column group per output.

Output files are plain CSV with ``#``-prefixed comment headers that
record the fully resolved configuration, fixed formatting (9
significant digits, scientific notation, LF line endings) and
deterministic row order, so repeated runs are byte-identical.

Units follow the natural magnitudes of the problem: forces in
zeptonewtons, potentials in both h-bar megahertz and millikelvin,
rates in units of the free-space linewidth.
"""

from __future__ import annotations

import copy
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import yaml

from .atom import AtomSpec
from .bloch import rabi_frequency, steady_state
from .constants import HBAR, K_BOLTZMANN
from .drive import DriveField
from .emission import decay_rates
from .errors import ConfigInvalid, FiberForceError
from .forces import (driving_force, spon_recoil_force, total_force,
                     vdw_force, vdw_potentials)
from .modes import FiberSpec, solve_mode

ZEPTO = 1e-21

_MODE_TABLE = {
    "HE11": ("HE", 1, 1), "HE21": ("HE", 2, 1),
    "TE01": ("TE", 0, 1), "TM01": ("TM", 0, 1),
    "EH11": ("EH", 1, 1), "HE12": ("HE", 1, 2),
}

_POLARIZATIONS = ("linear", "circular", "te", "tm")

OUTPUTS = ("drive-force", "spon-force", "scatt-force", "rates", "rabi",
           "vdw-potentials", "vdw-force", "total-force")


def _req(mapping, key, where):
    if key not in mapping:
        raise ConfigInvalid(f"{where}.{key}", "missing required key")
    return mapping[key]


def _num(mapping, key, where, default=None, minimum=None):
    if key not in mapping:
        if default is None:
            raise ConfigInvalid(f"{where}.{key}", "missing required key")
        return float(default)
    try:
        v = float(mapping[key])
    except (TypeError, ValueError):
        raise ConfigInvalid(f"{where}.{key}",
                            f"expected a number, got {mapping[key]!r}")
    if minimum is not None and v < minimum:
        raise ConfigInvalid(f"{where}.{key}", f"must be >= {minimum}")
    return v


def _complex_component(v, where):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ConfigInvalid(where, "dipole component must be a number or "
                        "a [re, im] pair")


@dataclass
class ScanConfig:
    """Validated scan configuration (one figure-style dataset)."""

    label: str
    title: str
    fiber: FiberSpec
    atom: dict
    drive: Optional[dict]
    physics: dict
    axis: str
    r_values: np.ndarray
    phi_values: np.ndarray
    outputs: List[str]
    curves: List[dict]
    raw: dict = field(repr=False, default_factory=dict)

    @classmethod
    def from_dict(cls, doc: dict) -> "ScanConfig":
        if not isinstance(doc, dict):
            raise ConfigInvalid("<root>", "configuration must be a mapping")
        label = str(doc.get("label", "scan"))
        title = str(doc.get("title", ""))

        f = _req(doc, "fiber", "<root>")
        fiber = FiberSpec(
            radius_a=_num(f, "radius_m", "fiber", minimum=1e-9),
            n1=_num(f, "n_core", "fiber", minimum=1.0),
            n2=_num(f, "n_clad", "fiber", minimum=0.5))
        if fiber.n1 <= fiber.n2:
            raise ConfigInvalid("fiber.n_core",
                                "core index must exceed cladding index")

        a = _req(doc, "atom", "<root>")
        atom = {
            "wavelength_m": _num(a, "wavelength_m", "atom", minimum=1e-9),
            "linewidth_hz": _num(a, "linewidth_hz", "atom", minimum=0.0),
            "orientation": a.get("orientation", [1.0, 0.0, 0.0]),
        }
        _parse_orientation(atom["orientation"], "atom.orientation")

        drive = doc.get("drive")
        if drive is not None:
            _validate_drive(drive)

        p = doc.get("physics", {})
        physics = {
            "detuning_hz": _num(p, "detuning_hz", "physics", default=0.0),
            "include_level_shift": bool(p.get("include_level_shift", False)),
        }

        s = _req(doc, "scan", "<root>")
        axis = _req(s, "axis", "scan")
        if axis not in ("r", "phi", "r-phi"):
            raise ConfigInvalid("scan.axis", "must be 'r', 'phi' or 'r-phi'")
        r_values = _parse_grid(s, "r_m", axis in ("r", "r-phi"), fiber)
        phi_values = _parse_grid(s, "phi_rad", axis in ("phi", "r-phi"),
                                 None)
        if axis == "r":
            phi_values = np.array([_num(s, "phi_rad", "scan", default=0.0)])
        if axis == "phi":
            r_values = np.array([_num(s, "r_m", "scan")])
            if r_values[0] < fiber.radius_a:
                raise ConfigInvalid("scan.r_m", "radius inside the fiber")

        outputs = doc.get("outputs", [])
        if not outputs:
            raise ConfigInvalid("outputs", "at least one output required")
        for o in outputs:
            if o not in OUTPUTS:
                raise ConfigInvalid(
                    "outputs", f"unknown output {o!r}; valid: {OUTPUTS}")

        curves = doc.get("curves") or [{"label": "value"}]
        seen = set()
        for c in curves:
            if not isinstance(c, dict) or "label" not in c:
                raise ConfigInvalid("curves", "each curve needs a label")
            if c["label"] in seen:
                raise ConfigInvalid("curves",
                                    f"duplicate curve label {c['label']!r}")
            seen.add(c["label"])
            if "drive" in c:
                merged = dict(drive or {})
                merged.update(c["drive"])
                _validate_drive(merged)
            if "atom" in c and "orientation" in c["atom"]:
                _parse_orientation(c["atom"]["orientation"],
                                   "curves.atom.orientation")

        needs_drive = any(o in ("drive-force", "scatt-force", "rabi",
                                "total-force") for o in outputs)
        if needs_drive and drive is None \
                and not all("drive" in c for c in curves):
            raise ConfigInvalid("drive", "selected outputs need a drive")

        return cls(label=label, title=title, fiber=fiber, atom=atom,
                   drive=drive, physics=physics, axis=axis,
                   r_values=r_values, phi_values=phi_values,
                   outputs=list(outputs), curves=list(curves), raw=doc)


def _parse_orientation(v, where):
    if not isinstance(v, (list, tuple)) or len(v) != 3:
        raise ConfigInvalid(where, "must be a 3-component list")
    return tuple(_complex_component(c, where) for c in v)


def _validate_drive(d):
    mode = _req(d, "mode", "drive")
    if mode not in _MODE_TABLE:
        raise ConfigInvalid("drive.mode",
                            f"unknown mode {mode!r}; known: "
                            f"{sorted(_MODE_TABLE)}")
    pol = d.get("polarization", "linear")
    if pol not in _POLARIZATIONS:
        raise ConfigInvalid("drive.polarization",
                            f"must be one of {_POLARIZATIONS}")
    _num(d, "power_w", "drive", minimum=0.0)
    if int(d.get("direction", 1)) not in (1, -1):
        raise ConfigInvalid("drive.direction", "must be +1 or -1")


def _parse_grid(s, key, required, fiber):
    if key not in s or not isinstance(s.get(key), dict):
        if required:
            raise ConfigInvalid(f"scan.{key}", "missing grid specification")
        return np.array([0.0])
    g = s[key]
    if "values" in g:
        vals = np.asarray([float(v) for v in g["values"]], dtype=float)
    else:
        start = _num(g, "start", f"scan.{key}")
        stop = _num(g, "stop", f"scan.{key}")
        count = int(_num(g, "count", f"scan.{key}", minimum=2))
        vals = np.linspace(start, stop, count)
    if vals.size < 2:
        raise ConfigInvalid(f"scan.{key}", "grid needs at least 2 samples")
    if fiber is not None and np.any(vals < fiber.radius_a):
        raise ConfigInvalid(f"scan.{key}", "grid extends inside the fiber")
    return vals


# ----------------------------------------------------------------------
# Evaluation
# ----------------------------------------------------------------------

class _CurveContext:
    """Resolved per-curve objects (atom, drive, physics)."""

    def __init__(self, cfg: ScanConfig, curve: dict):
        self.label = curve["label"]
        a = dict(cfg.atom)
        a.update(curve.get("atom", {}))
        ori = _parse_orientation(a["orientation"], "atom.orientation")
        self.atom = AtomSpec(wavelength=a["wavelength_m"],
                             gamma0=2.0 * np.pi * a["linewidth_hz"],
                             orientation=ori)
        self.fiber = cfg.fiber
        self.physics = dict(cfg.physics)
        self.physics.update(curve.get("physics", {}))
        self.delta0 = 2.0 * np.pi * float(self.physics["detuning_hz"])

        d = dict(cfg.drive or {})
        d.update(curve.get("drive", {}))
        self.drive = None
        if d:
            family, l, m = _MODE_TABLE[d["mode"]]
            mode = solve_mode(self.fiber, self.atom.omega0, family, l, m)
            self.drive = DriveField(
                mode, power=float(d.get("power_w", 0.0)),
                f=int(d.get("direction", 1)),
                polarization=d.get("polarization", "linear"),
                p=int(d.get("p", 1)),
                phi_pol=float(d.get("phi_pol_rad", 0.0)))

    def gamma(self, r, phi, memo):
        key = ("gamma", self.atom.orientation, r, phi)
        if key not in memo:
            d = self.atom.dipole_cyl(phi)
            memo[key] = decay_rates(self.fiber, self.atom.omega0, d, r).total
        return memo[key]

    def spon(self, r, phi, memo):
        key = ("spon", self.atom.orientation, r, phi)
        if key not in memo:
            if np.max(np.abs(np.imag(self.atom.orientation))) > 0:
                memo[key] = spon_recoil_force(self.fiber, self.atom, r, phi)
            else:
                memo[key] = np.zeros(3)
        return memo[key]

    def state(self, r, phi, memo):
        if self.physics["include_level_shift"]:
            pots = vdw_potentials(self.fiber, self.atom, r, phi)
            delta = self.delta0 - (pots.u_e - pots.u_g) / HBAR
        else:
            delta = self.delta0
        om = rabi_frequency(self.drive, self.atom, r, phi)
        return steady_state(om, delta, self.gamma(r, phi, memo))


def _eval_output(name, ctx: _CurveContext, r, phi, memo) -> Dict[str, float]:
    fiber, atom = ctx.fiber, ctx.atom
    if name == "drive-force":
        st = ctx.state(r, phi, memo)
        f = driving_force(ctx.drive, atom, st, r, phi)
        return {"Fr_drv_zN": f[0] / ZEPTO, "Fphi_drv_zN": f[1] / ZEPTO,
                "Fz_drv_zN": f[2] / ZEPTO}
    if name == "spon-force":
        f = ctx.spon(r, phi, memo)
        return {"Fphi_spon_zN": f[1] / ZEPTO, "Fz_spon_zN": f[2] / ZEPTO}
    if name == "scatt-force":
        st = ctx.state(r, phi, memo)
        f = st.rho_ee * ctx.spon(r, phi, memo)
        return {"Fphi_scatt_zN": f[1] / ZEPTO, "Fz_scatt_zN": f[2] / ZEPTO}
    if name == "rates":
        d = atom.dipole_cyl(phi)
        res = decay_rates(fiber, atom.omega0, d, r)
        g0 = atom.gamma0
        return {"gamma_total": res.total / g0,
                "gamma_guided": res.gamma_guided / g0,
                "gamma_rad": res.gamma_rad / g0}
    if name == "rabi":
        st = ctx.state(r, phi, memo)
        om = rabi_frequency(ctx.drive, atom, r, phi)
        return {"rabi_hz": abs(om) / (2.0 * np.pi), "rho_ee": st.rho_ee}
    if name == "vdw-potentials":
        p = vdw_potentials(fiber, atom, r, phi)
        to_mhz = 1.0 / (HBAR * 2.0 * np.pi * 1e6)
        to_mk = 1e3 / K_BOLTZMANN
        return {"Ug_hbar_MHz": p.u_g * to_mhz, "Ug_mK": p.u_g * to_mk,
                "Ue_hbar_MHz": p.u_e * to_mhz, "Ue_mK": p.u_e * to_mk,
                "Ue_res_hbar_MHz": p.u_e_res * to_mhz,
                "Ue_res_mK": p.u_e_res * to_mk}
    if name == "vdw-force":
        fe, fg = vdw_force(fiber, atom, r, phi)
        return {"Fr_vdw_e_zN": fe[0] / ZEPTO, "Fr_vdw_g_zN": fg[0] / ZEPTO,
                "Fphi_vdw_e_zN": fe[1] / ZEPTO,
                "Fphi_vdw_g_zN": fg[1] / ZEPTO}
    if name == "total-force":
        fb = total_force(fiber, ctx.drive, atom, r, phi,
                         delta0=ctx.delta0,
                         include_level_shift=ctx.physics[
                             "include_level_shift"])
        f = fb.f_total
        return {"Fr_zN": f[0] / ZEPTO, "Fphi_zN": f[1] / ZEPTO,
                "Fz_zN": f[2] / ZEPTO}
    raise ConfigInvalid("outputs", f"unknown output {name!r}")


# ----------------------------------------------------------------------
# CSV writer
# ----------------------------------------------------------------------

def _fmt(x: float) -> str:
    if not np.isfinite(x):
        raise FiberForceError("non-finite value in scan output")
    return "%.8e" % x


def _header_comment(cfg: ScanConfig, output: str) -> str:
    doc = copy.deepcopy(cfg.raw)
    doc["output"] = output
    dumped = yaml.safe_dump(doc, sort_keys=True, default_flow_style=False)
    lines = ["# " + ln for ln in dumped.rstrip("\n").split("\n")]
    return "\n".join(lines)


def run_scan(cfg: ScanConfig, out_dir, threads: int = 1) -> List[Path]:
    """Run every output of a scan configuration; returns written paths.

    Grid points are evaluated in deterministic order; ``threads`` only
    parallelizes independent grid points and does not change the output.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    contexts = [_CurveContext(cfg, c) for c in cfg.curves]
    memo: dict = {}

    grid = [(r, p) for r in cfg.r_values for p in cfg.phi_values]

    def _point(args):
        r, phi = args
        row = {}
        for ctx in contexts:
            for out in cfg.outputs:
                cols = _eval_output(out, ctx, r, phi, memo)
                for k, v in cols.items():
                    row[(out, ctx.label, k)] = v
        return row

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(_point, grid))
    else:
        rows = [_point(g) for g in grid]

    paths = []
    for out in cfg.outputs:
        buf = io.StringIO()
        buf.write(_header_comment(cfg, out) + "\n")
        cols = []
        if cfg.axis in ("r", "r-phi"):
            cols.append("r_nm")
        if cfg.axis in ("phi", "r-phi"):
            cols.append("phi_rad")
        value_keys = [k for k in rows[0] if k[0] == out]
        header = cols + [f"{k[2]}[{k[1]}]" if len(contexts) > 1 else k[2]
                         for k in value_keys]
        buf.write(",".join(header) + "\n")
        for (r, phi), row in zip(grid, rows):
            vals = []
            if cfg.axis in ("r", "r-phi"):
                vals.append(_fmt(r * 1e9))
            if cfg.axis in ("phi", "r-phi"):
                vals.append(_fmt(phi))
            vals += [_fmt(row[k]) for k in value_keys]
            buf.write(",".join(vals) + "\n")
        path = out_dir / f"{cfg.label}_{out.replace('-', '_')}.csv"
        with open(path, "w", newline="\n") as fh:
            fh.write(buf.getvalue())
        paths.append(path)
    return paths


def load_config(path) -> ScanConfig:
    """Load and validate a YAML scan configuration from disk."""
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigInvalid("<file>", f"no such config file: {path}")
    except yaml.YAMLError as exc:
        raise ConfigInvalid("<file>", f"YAML parse error: {exc}")
    return ScanConfig.from_dict(doc)
