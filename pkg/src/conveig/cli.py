"""Batch command-line interface: compute, write CSV, exit.

Commands: ``eigencurve``, ``solve``, ``sweep``, ``transform``,
``asympt {small|large|kappa}``.  Output is CSV for external plotting; every
file starts with ``#`` comment lines recording the configuration, grid,
tolerances, and artifact version, and numbers are written in shortest
round-trip form, so identical configurations produce byte-identical files.

Exit codes: 0 success, 1 internal/numerical failure, 2 invalid parameters.
Flag precedence: command line > config file (flat ``key=value``) > defaults.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .asymptotics import check_kappa, check_large_sigma, check_small_sigma
from .errors import (
    AdmissibilityError,
    ConveigError,
    GridMismatchError,
    GridTooSmallError,
    InvalidParameterError,
    OutOfRangeError,
    ResolutionError,
    UnsupportedKernelError,
)
from .grid import make_grid
from .kernels import gaussian, indicator, load_kernel_csv, tent
from .krein import default_grid, eigencurve
from .solve import BilinearNonlinearity, Tolerances, solve_sigma, sweep
from .transform import transform_kernel

_PARAM_ERRORS = (
    InvalidParameterError,
    AdmissibilityError,
    OutOfRangeError,
    GridTooSmallError,
    UnsupportedKernelError,
    ResolutionError,
    GridMismatchError,
)

_DEFAULTS = {
    "kernel": "gaussian",
    "zeta": 0.0,
    "theta": 0.6,
    "eta": 2.5,
    "h": 1e-3,
    "L": None,
    "tol_power": 1e-10,
    "tol_bisect": 1e-8,
    "tol_transform": 1e-8,
    "out": ".",
}

_FLOAT_KEYS = {"zeta", "theta", "eta", "h", "L",
               "tol_power", "tol_bisect", "tol_transform"}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return repr(v)


def write_csv(path, columns, header_lines) -> None:
    """Write named columns with a commented configuration header."""
    names = [name for name, _ in columns]
    rows = max((len(vals) for _, vals in columns), default=0)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(vals[i]) for _, vals in columns) + "\n")


def _header(cfg: dict, extra: dict | None = None) -> list[str]:
    lines = [f"conveig {__version__}"]
    # the output directory is not part of the computation; identical
    # configurations must produce byte-identical files wherever they land
    merged = {k: v for k, v in cfg.items() if k != "out"}
    if extra:
        merged.update(extra)
    for key in sorted(merged):
        lines.append(f"{key} = {_fmt(merged[key])}")
    return lines


def _load_config_file(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InvalidParameterError(
                    f"config line is not key=value: {line!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in _DEFAULTS:
                raise InvalidParameterError(f"unknown config key {key!r}")
            values[key] = float(val) if key in _FLOAT_KEYS else val
    return values


def _merge_config(args: argparse.Namespace) -> dict:
    file_cfg = _load_config_file(args.config) if args.config else {}
    cfg = {}
    for key, default in _DEFAULTS.items():
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            cfg[key] = cli_value
        elif key in file_cfg:
            cfg[key] = file_cfg[key]
        else:
            cfg[key] = default
    return cfg


def _pick_kernel(selector: str):
    if selector == "gaussian":
        return gaussian()
    if selector == "tent":
        return tent()
    if selector == "indicator":
        return indicator()
    if selector.startswith("file:"):
        return load_kernel_csv(selector[5:])
    raise InvalidParameterError(
        f"unknown kernel {selector!r}; use gaussian|tent|indicator|file:<path>")


def _tolerances(cfg: dict) -> Tolerances:
    return Tolerances(power=cfg["tol_power"], bisect=cfg["tol_bisect"],
                      transform=cfg["tol_transform"], spacing=cfg["h"],
                      half_width=cfg["L"])


def _params(cfg: dict) -> BilinearNonlinearity:
    return BilinearNonlinearity(zeta=cfg["zeta"], theta=cfg["theta"],
                                eta=cfg["eta"])


def _outdir(cfg: dict) -> str:
    os.makedirs(cfg["out"], exist_ok=True)
    return cfg["out"]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kernel", help="gaussian|tent|indicator|file:<path>")
    parser.add_argument("--zeta", type=float, help="lower slope (>= 0)")
    parser.add_argument("--theta", type=float, help="kink location (> 0)")
    parser.add_argument("--eta", type=float, help="slope jump (> 0)")
    parser.add_argument("--h", type=float, help="grid spacing")
    parser.add_argument("--L", type=float, help="grid half-width (default: auto)")
    parser.add_argument("--tol-power", type=float, dest="tol_power")
    parser.add_argument("--tol-bisect", type=float, dest="tol_bisect")
    parser.add_argument("--tol-transform", type=float, dest="tol_transform")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--config", help="key=value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conveig",
        description="Unimodal eigenfunctions of superlinear convolution "
                    "eigenvalue problems: eigencurves, profiles, kernel "
                    "transforms, and asymptotic probes (CSV output).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigencurve", help="leading eigenvalue vs cut-off")
    p.add_argument("--xi", type=float, nargs="*", default=[],
                   help="cut-off values (strictly increasing)")
    _add_common(p)

    p = sub.add_parser("solve", help="one eigenfunction profile")
    p.add_argument("--sigma", type=float, required=True)
    _add_common(p)

    p = sub.add_parser("sweep", help="profiles for several eigenvalues")
    p.add_argument("--sigma", type=float, nargs="+", required=True)
    _add_common(p)

    p = sub.add_parser("transform", help="Neumann-series kernel mixtures")
    p.add_argument("--mu", type=float, nargs="+", required=True)
    _add_common(p)

    p = sub.add_parser("asympt", help="asymptotic-regime probes")
    p.add_argument("which", choices=["small", "large", "kappa"])
    p.add_argument("--sigma", type=float, nargs="+", required=True)
    _add_common(p)

    return parser


def cmd_eigencurve(args, cfg) -> int:
    kernel = _pick_kernel(cfg["kernel"])
    xi_list = list(args.xi)
    grid = None
    if xi_list:
        if cfg["L"] is not None:
            grid = make_grid(cfg["L"], cfg["h"])
        else:
            grid = default_grid(kernel, max(xi_list), spacing=cfg["h"])
    curve = eigencurve(kernel, xi_list, grid=grid, tol=cfg["tol_power"]) \
        if xi_list else None
    points = curve.points if curve else []
    path = os.path.join(_outdir(cfg), "eigencurve.csv")
    write_csv(path, [
        ("xi", [p.xi for p in points]),
        ("lambda", [p.lam for p in points]),
        ("iterations", [p.iterations for p in points]),
        ("residual", [p.residual for p in points]),
        ("error", [p.error or "" for p in points]),
    ], _header(cfg, {"command": "eigencurve", "xi": " ".join(map(_fmt, xi_list))}))
    print(path)
    if points and all(p.error for p in points):
        return 1
    return 0


def _write_solution(cfg, sol, sigma_label: str) -> None:
    out = _outdir(cfg)
    grid = sol.grid
    fu = sol.params(sol.u.values)
    path = os.path.join(out, f"solution_{sigma_label}.csv")
    write_csv(path, [
        ("x", grid.points),
        ("u", sol.u.values),
        ("f_of_u", fu),
        ("v", sol.v.full_values()),
    ], _header(cfg, {"command": "solve", "sigma": sigma_label}))
    scalars = {
        "sigma": sol.sigma,
        "sigma_requested": sol.sigma_requested,
        "xi": sol.xi,
        "lambda": sol.lam,
        "tau": sol.tau,
        "residual_rel": sol.residual_rel,
        "h": grid.spacing,
        "L": grid.half_width,
        "kernel": sol.kernel_label,
        "zeta": sol.params.zeta,
        "theta": sol.params.theta,
        "eta": sol.params.eta,
        "tol_power": cfg["tol_power"],
        "tol_bisect": cfg["tol_bisect"],
        "tol_transform": cfg["tol_transform"],
        "version": __version__,
    }
    with open(os.path.join(out, f"solution_{sigma_label}.json"), "w",
              encoding="utf-8", newline="\n") as fh:
        json.dump(scalars, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(path)


def cmd_solve(args, cfg) -> int:
    kernel = _pick_kernel(cfg["kernel"])
    sol = solve_sigma(kernel, _params(cfg), args.sigma, tol=_tolerances(cfg))
    _write_solution(cfg, sol, _fmt(args.sigma))
    return 0


def cmd_sweep(args, cfg) -> int:
    kernel = _pick_kernel(cfg["kernel"])
    entries = sweep(kernel, _params(cfg), args.sigma, tol=_tolerances(cfg))
    path = os.path.join(_outdir(cfg), "sweep.csv")
    write_csv(path, [
        ("sigma_requested", [e.sigma_requested for e in entries]),
        ("sigma", [e.sigma for e in entries]),
        ("xi", [e.xi for e in entries]),
        ("lambda", [e.lam for e in entries]),
        ("tau", [e.tau for e in entries]),
        ("u_norm2", [e.u_norm2 for e in entries]),
        ("u_max", [e.u_max for e in entries]),
        ("residual_rel", [e.residual_rel for e in entries]),
        ("error", [e.error or "" for e in entries]),
    ], _header(cfg, {"command": "sweep",
                     "sigma": " ".join(map(_fmt, args.sigma))}))
    print(path)
    if entries and all(e.error for e in entries):
        raise AdmissibilityError(
            "every sigma in the sweep was rejected: "
            + "; ".join(e.error for e in entries if e.error))
    return 0


def cmd_transform(args, cfg) -> int:
    kernel = _pick_kernel(cfg["kernel"])
    out = _outdir(cfg)
    from .transform import suggested_half_width

    for mu in args.mu:
        if cfg["L"] is not None:
            half = cfg["L"]
        else:
            half = suggested_half_width(kernel, mu, cfg["tol_transform"])
        grid = make_grid(half, cfg["h"])
        mixed = transform_kernel(kernel, mu, grid, tol=cfg["tol_transform"])
        path = os.path.join(out, f"transformed_{kernel.label}_mu{_fmt(mu)}.csv")
        write_csv(path, [
            ("x", grid.points),
            ("a", mixed.samples.values),
        ], _header(cfg, {
            "command": "transform", "mu": mu,
            "truncation_depth": mixed.truncation_depth,
            "truncation_bound": mixed.truncation_bound,
            "renormalization": mixed.renormalization,
        }))
        print(path)
    return 0


def cmd_asympt(args, cfg) -> int:
    kernel = _pick_kernel(cfg["kernel"])
    params = _params(cfg)
    tol = _tolerances(cfg)
    out = _outdir(cfg)
    which = args.which
    if which == "small":
        rep = check_small_sigma(kernel, params, args.sigma, tol=tol)
        fit = rep.fit
        sidecar = {
            "predicted_constant": rep.predicted_constant,
            "measured_constants": list(rep.measured_constants),
            "limit_profile_distances": list(rep.limit_profile_distances),
            "parabola_cosines": list(rep.parabola_cosines),
        }
    elif which == "large":
        rep = check_large_sigma(kernel, params, args.sigma, tol=tol)
        fit = rep.fit_xi
        sidecar = {
            "m": rep.m,
            "predicted_constant": rep.predicted_constant,
            "measured_constants": list(rep.measured_constants),
            "norm_exponent": rep.fit_norm.exponent,
            "norm_r_squared": rep.fit_norm.r_squared,
            "bump_cosines": list(rep.bump_cosines),
            "tail_xi": rep.tail_xi,
            "tail_m": rep.tail_m,
            "routes_agreement": rep.routes_agreement,
        }
    else:
        rep = check_kappa(kernel, params, args.sigma, tol=tol)
        fit = rep.fit
        sidecar = {
            "kappa0": rep.kappa0,
            "kappa2": rep.kappa2,
            "kappa0_sequence": list(rep.kappa0_sequence),
            "kappa2_sequence": list(rep.kappa2_sequence),
            "xi_limit_predicted": rep.xi_limit_predicted,
            "core_deviations": list(rep.core_deviations),
        }
    reference = fit.predicted_prefactor if fit.predicted_prefactor is not None \
        else fit.prefactor
    predicted = reference * fit.abscissa ** fit.predicted_exponent
    path = os.path.join(out, f"asympt_{which}.csv")
    write_csv(path, [
        ("abscissa", fit.abscissa),
        ("ordinate", fit.ordinate),
        ("predicted", predicted),
    ], _header(cfg, {"command": f"asympt {which}",
                     "sigma": " ".join(map(_fmt, args.sigma))}))
    sidecar.update({
        "exponent": fit.exponent,
        "prefactor": fit.prefactor,
        "predicted_exponent": fit.predicted_exponent,
        "predicted_prefactor": fit.predicted_prefactor,
        "r_squared": fit.r_squared,
        "version": __version__,
    })
    with open(os.path.join(out, f"asympt_{which}.json"), "w",
              encoding="utf-8", newline="\n") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(path)
    return 0


_COMMANDS = {
    "eigencurve": cmd_eigencurve,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "transform": cmd_transform,
    "asympt": cmd_asympt,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _merge_config(args)
        return _COMMANDS[args.command](args, cfg)
    except _PARAM_ERRORS as exc:
        if isinstance(exc, AdmissibilityError) and exc.interval is not None:
            print(f"error: {exc} (admissible interval: open "
                  f"({exc.interval[0]}, {exc.interval[1]}))", file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConveigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
