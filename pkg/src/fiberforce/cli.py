"""Command-line interface.

Subcommands
-----------
modes           Print the guided-mode table for a fiber.
rates           Print spontaneous-emission rates at a given position.
scan            Run a scan configuration from a YAML file.
scenario        Run one of the bundled scenario configurations.
list-scenarios  List the bundled scenario configurations.

Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
failures.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .constants import C_LIGHT
from .emission import decay_rates
from .errors import ConfigInvalid, FiberForceError
from .modes import list_guided_modes, solve_mode
from .scan import ScanConfig, load_config, run_scan

_SCENARIO_PKG = "fiberforce.scenarios"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fiberforce",
        description="Radiation forces on a two-level atom near an "
                    "ultrathin optical fiber.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_modes = sub.add_parser(
        "modes", help="print the guided-mode table for a fiber")
    p_modes.add_argument("--config", type=Path, default=None,
                         help="YAML file with a 'fiber' and 'atom' section "
                              "(default: 350 nm silica fiber at 780 nm)")

    p_rates = sub.add_parser(
        "rates", help="print decay rates at a radial position")
    p_rates.add_argument("--config", type=Path, default=None)
    p_rates.add_argument("--distance-nm", type=float, default=200.0,
                         help="atom-surface distance in nm (default 200)")

    p_scan = sub.add_parser(
        "scan", help="run a scan configuration from a YAML file")
    p_scan.add_argument("--config", type=Path, required=True)
    p_scan.add_argument("--out", type=Path, default=Path("."),
                        help="output directory for CSV files")
    p_scan.add_argument("--threads", type=int, default=1)

    p_scen = sub.add_parser(
        "scenario", help="run one or more bundled scenario configurations")
    p_scen.add_argument("names", nargs="+", metavar="name",
                        help="scenario names (see list-scenarios); 'all' "
                             "runs every bundled scenario in one process "
                             "so that Green-tensor tables are shared")
    p_scen.add_argument("--out", type=Path, default=Path("."))
    p_scen.add_argument("--threads", type=int, default=1)

    sub.add_parser("list-scenarios", help="list bundled scenarios")
    return parser


def _default_doc() -> dict:
    return {
        "fiber": {"radius_m": 350e-9, "n_core": 1.4537, "n_clad": 1.0},
        "atom": {"wavelength_m": 780e-9, "linewidth_hz": 6.065e6,
                 "orientation": [1.0, 0.0, 0.0]},
        "scan": {"axis": "r",
                 "r_m": {"start": 400e-9, "stop": 1000e-9, "count": 2}},
        "outputs": ["rates"],
    }


def _load_doc(path) -> dict:
    if path is None:
        return _default_doc()
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigInvalid("<file>", f"no such config file: {path}")
    except yaml.YAMLError as exc:
        raise ConfigInvalid("<file>", f"YAML parse error: {exc}")
    base = _default_doc()
    for key in ("fiber", "atom"):
        if key in doc:
            base[key].update(doc[key])
    return base


def _cmd_modes(args) -> int:
    doc = _load_doc(args.config)
    cfg = ScanConfig.from_dict(doc)
    omega = 2.0 * np.pi * C_LIGHT / float(doc["atom"]["wavelength_m"])
    print(f"# fiber: a = {cfg.fiber.radius_a * 1e9:.4g} nm, "
          f"n1 = {cfg.fiber.n1}, n2 = {cfg.fiber.n2}, "
          f"lambda = {2 * np.pi * C_LIGHT / omega * 1e9:.4g} nm")
    print(f"{'mode':<8}{'beta (rad/m)':>16}{'n_eff':>10}"
          f"{'vg/c':>10}")
    for mid in list_guided_modes(cfg.fiber, omega, include_directions=False):
        mode = solve_mode(cfg.fiber, omega, mid.family, mid.l, mid.m)
        neff = mode.beta * C_LIGHT / omega
        name = f"{mid.family}{mid.l}{mid.m}"
        print(f"{name:<8}{mode.beta:>16.6e}{neff:>10.5f}"
              f"{1.0 / (mode.beta_prime * C_LIGHT):>10.5f}")
    return 0


def _cmd_rates(args) -> int:
    doc = _load_doc(args.config)
    cfg = ScanConfig.from_dict(doc)
    wavelength = float(doc["atom"]["wavelength_m"])
    omega = 2.0 * np.pi * C_LIGHT / wavelength
    r = cfg.fiber.radius_a + args.distance_nm * 1e-9
    from .atom import AtomSpec
    atom = AtomSpec(wavelength=wavelength,
                    gamma0=2 * np.pi * float(doc["atom"]["linewidth_hz"]),
                    orientation=tuple(complex(c) if not isinstance(c, list)
                                      else complex(c[0], c[1])
                                      for c in doc["atom"]["orientation"]))
    res = decay_rates(cfg.fiber, omega, atom.dipole_cyl(0.0), r)
    g0 = atom.gamma0
    print(f"# r - a = {args.distance_nm:.4g} nm, rates in units of the "
          f"free-space linewidth")
    for entry in res.guided:
        tag = "forward" if entry.f > 0 else "backward"
        print(f"{entry.label:<8} {tag:<9} {entry.gamma / g0:12.6e}")
    print(f"{'guided':<8} {res.gamma_guided / g0:12.6e}")
    print(f"{'rad':<8} {res.gamma_rad / g0:12.6e}")
    print(f"{'total':<8} {res.total / g0:12.6e}")
    return 0


def _scenario_names():
    names = []
    for item in resources.files(_SCENARIO_PKG).iterdir():
        if item.name.endswith(".yaml"):
            names.append(item.name[:-len(".yaml")])

    def _natural(n):
        head = n.rstrip("0123456789")
        tail = n[len(head):]
        return (head, int(tail) if tail else -1)

    return sorted(names, key=_natural)


def load_scenario(name: str) -> ScanConfig:
    """Load a bundled scenario configuration by name."""
    path = resources.files(_SCENARIO_PKG) / f"{name}.yaml"
    if not path.is_file():
        raise ConfigInvalid(
            "scenario", f"unknown scenario {name!r}; available: "
                        f"{', '.join(_scenario_names())}")
    doc = yaml.safe_load(path.read_text())
    return ScanConfig.from_dict(doc)


def _cmd_scenario(args) -> int:
    names = args.names
    if names == ["all"]:
        names = _scenario_names()
    for name in names:
        cfg = load_scenario(name)
        paths = run_scan(cfg, args.out, threads=args.threads)
        for p in paths:
            print(p)
    return 0


def _cmd_scan(args) -> int:
    cfg = load_config(args.config)
    paths = run_scan(cfg, args.out, threads=args.threads)
    for p in paths:
        print(p)
    return 0


def _cmd_list(_args) -> int:
    for name in _scenario_names():
        cfg = load_scenario(name)
        print(f"{name:<12} {cfg.title}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"modes": _cmd_modes, "rates": _cmd_rates,
               "scan": _cmd_scan, "scenario": _cmd_scenario,
               "list-scenarios": _cmd_list}[args.command]
    try:
        return handler(args)
    except ConfigInvalid as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (FiberForceError, FloatingPointError, ValueError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
