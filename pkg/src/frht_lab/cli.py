"""Command-line front end.

    frht-lab transform --alpha pi/4 --mu0 0 --f gaussian_bessel:0
    frht-lab roundtrip --alpha pi/3 --mu0 1
    frht-lab abelian --config run.ini --format json --out abelian.json

Settings come from built-in defaults, then the ``[common]`` and
``[<command>]`` sections of ``--config``, then command-line flags.

Exit codes: 0 pass, 1 verification failed, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import math
import re
import sys
from typing import Callable

import numpy as np

from . import __version__
from .asymptotics import (QuasiAsymptoticSpec, SlowlyVaryingFn, abelian_sweep, default_eps_grid,
                          fit_slope, parse_sv, sv_check, tauberian_check)
from .errors import (ArgumentError, CapabilityError, ConvergenceError, CoverageError, DomainError,
                     FrhtLabError)
from .frht import frht_forward, frht_inverse, make_params, transform_grid
from .functions import catalog, gaussian_bessel, parse_function
from .output import emit
from .seminorms import (EvalGrid, b_space_seminorm, beta_mk, beta_order_check, beta_seminorm,
                        gamma_seminorm, montel_report)

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
ROUNDTRIP_TOL = 1e-5


class ConfigError(FrhtLabError):
    """Malformed or inconsistent run configuration."""


# ---------------------------------------------------------------------------
# value parsers (shared by flags and config files)

_PI = re.compile(r"^\s*([-+]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def parse_angle(text: str) -> float:
    """A float or a multiple of pi such as ``pi/4``, ``2pi/5``, ``3*pi/4``."""
    text = str(text).strip()
    try:
        return float(text)
    except ValueError:
        pass
    mt = _PI.match(text)
    if not mt:
        raise ConfigError(f"cannot read angle {text!r}")
    num = float(mt.group(1)) if mt.group(1) not in ("", "+", "-") else (-1.0 if mt.group(1) == "-" else 1.0)
    den = float(mt.group(2)) if mt.group(2) else 1.0
    return num * math.pi / den


def parse_int(text) -> int:
    try:
        v = float(text)
    except ValueError as exc:
        raise ConfigError(f"expected an integer, got {text!r}") from exc
    if not v.is_integer():
        raise ConfigError(f"expected an integer, got {text!r}")
    return int(v)


def parse_float(text) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"expected a number, got {text!r}") from exc


def parse_bool(text) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def parse_range(text: str, integer_count: bool = True) -> tuple:
    """``start:stop:count`` as floats plus an integer count."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"expected start:stop:count, got {text!r}")
    lo, hi = parse_float(parts[0]), parse_float(parts[1])
    n = parse_int(parts[2])
    if n < 0:
        raise ConfigError("count must be nonnegative")
    return lo, hi, n


def parse_eps_grid(text: str) -> np.ndarray:
    """``j0:j1:step`` giving eps = 10^(-j/2)."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"eps grid must be j0:j1:step, got {text!r}")
    j0, j1, step = (parse_int(p) for p in parts)
    try:
        return default_eps_grid(j0, j1, step)
    except ArgumentError as exc:
        raise ConfigError(str(exc)) from exc


def parse_list(text: str, conv: Callable = parse_float) -> list:
    return [conv(p) for p in str(text).split(",") if p.strip()]


def parse_grid(text: str) -> EvalGrid:
    lo, hi, n = parse_range(text)
    try:
        return EvalGrid(lo, hi, n)
    except ArgumentError as exc:
        raise ConfigError(str(exc)) from exc


def parse_choice(*choices):
    def conv(text):
        t = str(text).strip()
        if t not in choices:
            raise ConfigError(f"expected one of {', '.join(choices)}, got {t!r}")
        return t
    return conv


# option name -> (parser, default, help); None default means "required or derived"
COMMON = {
    "alpha": (parse_angle, "pi/2", "transform angle in radians (pi/4 style allowed)"),
    "mu0": (parse_int, "0", "transform order (nonnegative integer)"),
    "f": (str, None, "input function NAME:PARAMS, e.g. gaussian_bessel:0"),
    "tol_abs": (parse_float, "1e-10", "absolute quadrature tolerance"),
    "tol_rel": (parse_float, "1e-8", "relative quadrature tolerance"),
    "eps_grid": (parse_eps_grid, "0:8:1", "eps = 10^(-j/2) for j0:j1:step"),
    "out": (str, None, "output path (standard output when absent)"),
    "format": (parse_choice("csv", "json"), "csv", "report format"),
}

COMMANDS = {
    "transform": {
        "xi": (parse_range, "0.1:10:20", "xi grid start:stop:count (linear)"),
        "route": (parse_choice("hankel", "direct"), "hankel", "computation route"),
    },
    "roundtrip": {
        "x": (parse_range, "0.05:2.5:40", "reconstruction grid start:stop:count"),
        "xi_max": (parse_float, None, "truncate the transform grid at this xi"),
        "xi_step": (parse_float, "0.05", "transform grid spacing"),
    },
    "seminorm": {
        "mu": (parse_int, "0", "seminorm order"),
        "grid": (parse_grid, "1e-4:40:2000", "evaluation grid x_min:x_max:n (log-spaced)"),
        "order_check": (parse_bool, "false", "add the order-inequality rows"),
        "b": (parse_float, None, "support end for the compact-support seminorm"),
    },
    "abelian": {
        "m": (parse_float, None, "degree (defaults to the power of a power_cutoff input)"),
        "L": (parse_sv, "constant", "slowly varying function"),
        "phi": (str, None, "test function (defaults to gaussian_bessel:mu0)"),
        "tol": (parse_float, "1e-2", "tolerance on |final ratio - 1|"),
    },
    "tauberian": {
        "m": (parse_float, None, "degree (defaults to the power of a power_cutoff input)"),
        "L": (parse_sv, "constant", "slowly varying function"),
        "xi": (parse_range, "0.5:5:10", "xi grid start:stop:count (log-spaced)"),
        "N": (parse_float, "1", "growth exponent of the bound"),
        "C_max": (parse_float, "1e6", "largest acceptable bound constant"),
        "eps0": (parse_float, "0.1", "bound checked for eps <= eps0"),
        "stab_tol": (parse_float, "1e-2", "relative stabilisation tolerance"),
    },
    "montel": {
        "n_list": (lambda t: parse_list(t, parse_int), "2,4,8,16", "sequence indices"),
        "mu": (parse_int, "0", "order"),
        "grid": (parse_grid, "1e-4:40:2000", "evaluation grid x_min:x_max:n (log-spaced)"),
    },
    "check-sv": {
        "L": (parse_sv, "log", "slowly varying function"),
        "a_set": (parse_list, "0.5,2,10", "scale factors a"),
        "tol": (parse_float, "0.06", "tolerance at the smallest eps"),
    },
}

COMMAND_DEFAULTS = {
    "abelian": {"f": "power_cutoff:1", "alpha": "pi/4"},
    "tauberian": {"f": "power_cutoff:1", "alpha": "pi/4", "eps_grid": "2:6:1"},
    "check-sv": {"eps_grid": "2:12:2"},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frht-lab", description="Fractional Hankel transform laboratory.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="configuration file (key = value lines under [sections])")
    for name, (_, default, helptext) in COMMON.items():
        common.add_argument("--" + name.replace("_", "-"), dest=name, default=None,
                            help=f"{helptext} (default {default})" if default else helptext)
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, opts in COMMANDS.items():
        p = sub.add_parser(cmd, parents=[common], help=f"run {cmd}")
        for name, (_, default, helptext) in opts.items():
            p.add_argument("--" + name.replace("_", "-"), dest=name, default=None,
                           help=f"{helptext} (default {default})" if default else helptext)
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config sections and flags; parse every value."""
    cmd = args.command
    options = {**COMMON, **COMMANDS[cmd]}
    raw = {k: d for k, (_, d, _) in options.items()}
    raw.update(COMMAND_DEFAULTS.get(cmd, {}))
    if args.config:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        try:
            with open(args.config, encoding="utf-8") as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        for section in ("common", cmd):
            if cp.has_section(section):
                for key, value in cp.items(section):
                    k = key.replace("-", "_")
                    if section == "common" and k not in options:
                        continue
                    if k not in options:
                        raise ConfigError(f"unknown key {key!r} in [{section}]")
                    raw[k] = value
    for k in options:
        v = getattr(args, k, None)
        if v is not None:
            raw[k] = v
    cfg = {}
    for k, (conv, _, _) in options.items():
        cfg[k] = None if raw[k] is None else conv(raw[k])
    cfg["command"] = cmd
    return cfg


# ---------------------------------------------------------------------------
# commands; each returns (rows, metadata, exit code)

def _params(cfg):
    return make_params(cfg["alpha"], cfg["mu0"])


def _function(cfg, key="f"):
    if not cfg.get(key):
        raise ConfigError(f"--{key} is required (NAME:PARAMS)")
    return parse_function(cfg[key])


def _degree(cfg):
    if cfg.get("m") is not None:
        return cfg["m"]
    name, _, arg = cfg["f"].partition(":")
    if name in ("power_cutoff", "power") and arg:
        return float(arg)
    raise ConfigError("--m is required unless the input is power_cutoff:a")


def cmd_transform(cfg):
    p = _params(cfg)
    f = _function(cfg)
    lo, hi, n = cfg["xi"]
    if n < 1:
        raise ConfigError("xi grid is empty")
    xi = np.linspace(lo, hi, n)
    g = frht_forward(p, f, xi, cfg["tol_abs"], cfg["tol_rel"], route=cfg["route"])
    fx = f(xi)
    rows = [{"xi": float(s), "value": complex(v), "abs_error_estimate": float(e), "f_at_xi": complex(y)}
            for s, v, e, y in zip(xi, g.values, g.errors, fx)]
    return rows, {}, EXIT_PASS


def cmd_roundtrip(cfg):
    p = _params(cfg)
    funcs = [_function(cfg)] if cfg["f"] else catalog(p.mu0)
    lo, hi, n = cfg["x"]
    x = np.linspace(lo, hi, n)
    rows = []
    for f in funcs:
        if cfg["xi_max"] is not None:
            step = cfg["xi_step"]
            fwd = frht_forward(p, f, np.arange(step, cfg["xi_max"] + 0.5 * step, step),
                               cfg["tol_abs"], cfg["tol_rel"])
        else:
            fwd = transform_grid(p, f, step=cfg["xi_step"], tol_abs=cfg["tol_abs"], tol_rel=cfg["tol_rel"])
        back = frht_inverse(p, fwd, x, cfg["tol_abs"], cfg["tol_rel"])
        ref = f(x)
        err = float(np.max(np.abs(back.values - ref)) / np.max(np.abs(ref)))
        rows.append({"function": f.name, "alpha": p.alpha, "mu0": p.mu0, "xi_max": float(fwd.points[-1]),
                     "n_xi": len(fwd), "rel_linf_error": err, "passed": err <= ROUNDTRIP_TOL})
    return rows, {"tolerance": ROUNDTRIP_TOL}, EXIT_PASS if all(r["passed"] for r in rows) else EXIT_FAIL


def _sn_row(kind, s, order=None):
    return {"kind": kind, "order": s.mu if order is None else order, "m": s.m, "k": s.k, "value": s.value,
            "argmax_x": s.argmax_x, "warning": s.warning or ""}


def cmd_seminorm(cfg):
    import warnings
    f = parse_function(cfg["f"] or "gaussian_bessel:0")
    mu, grid = cfg["mu"], cfg["grid"]
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for m in range(2 * mu + 1):
            for k in range(2 * mu + 1):
                for order in (2 * mu - 0.5, 2 * mu + 0.5):
                    rows.append(_sn_row("gamma", gamma_seminorm(order, m, k, f, grid)))
                rows.append(_sn_row("beta_mk", beta_mk(mu, m, k, f, grid)))
        rows.append(_sn_row("beta", beta_seminorm(mu, f, grid)))
        if cfg["b"] is not None:
            rows.append(_sn_row("b_space", b_space_seminorm(mu, cfg["b"], f, grid)))
    code = EXIT_PASS
    if cfg["order_check"]:
        chk = beta_order_check(mu, f, grid)
        rows.append({"kind": "order_check", "order": mu, "lhs": chk.lhs, "factor": chk.factor,
                     "rhs": chk.rhs, "passed": chk.passed, "beta_mu": chk.beta_mu,
                     "beta_next": chk.beta_next, "monotone": chk.monotone, "intermediate": chk.intermediate,
                     "warning": chk.note or ""})
        if not (chk.passed and chk.monotone):
            code = EXIT_FAIL
    return rows, {"function": f.name}, code


def _running_slopes(eps, raw):
    return [fit_slope(eps[: i + 1], raw[: i + 1])[0] if i >= 1 else math.nan for i in range(eps.size)]


def cmd_abelian(cfg):
    p = _params(cfg)
    f = _function(cfg)
    m = _degree(cfg)
    phi = parse_function(cfg["phi"]) if cfg["phi"] else gaussian_bessel(p.mu0)
    spec = QuasiAsymptoticSpec(m, cfg["L"])
    rep = abelian_sweep(p, f, spec, [phi], cfg["eps_grid"], cfg["tol_abs"], cfg["tol_rel"], cfg["tol"])[0]
    with_slope = rep.eps_values.size >= 2
    slopes = _running_slopes(rep.eps_values, rep.raw_values)
    rows = []
    for i, e in enumerate(rep.eps_values):
        row = {"eps": float(e), "lhs": complex(rep.lhs_values[i]), "ratio": complex(rep.ratios[i]),
               "abs_ratio_minus_1": float(abs(rep.ratios[i] - 1))}
        if with_slope:
            row["slope_so_far"] = slopes[i]
        rows.append(row)
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    for e, msg in rep.failures.items():
        print(f"warning: eps = {e:g}: {msg}", file=sys.stderr)
    meta = {"reference": complex(rep.reference), "fitted_slope": rep.fitted_slope,
            "slope_stderr": rep.slope_stderr, "final_ratio": rep.final_ratio, "passed": rep.passed,
            "L": cfg["L"].name, "degree": m, "phi": phi.name}
    if not rep.passed:
        r = np.abs(rep.ratios - 1)
        print(f"abelian: final |ratio - 1| = {abs(rep.final_ratio - 1):.3g} > {cfg['tol']:g}; "
              f"drift over the sweep {r[0]:.3g} -> {r[-1]:.3g}", file=sys.stderr)
    return rows, meta, EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_tauberian(cfg):
    p = _params(cfg)
    f = _function(cfg)
    m = _degree(cfg)
    lo, hi, n = cfg["xi"]
    if n < 1:
        raise ConfigError("xi grid is empty")
    if lo <= 0 or hi < lo:
        raise ConfigError("xi grid needs 0 < start <= stop")
    xi = np.geomspace(lo, hi, n)
    rep = tauberian_check(p, f, m, cfg["L"], xi, cfg["eps_grid"], cfg["N"], cfg["C_max"], cfg["eps0"],
                          cfg["stab_tol"])
    weight = xi ** (rep.bound_N + p.mu0 + 0.5)
    use = rep.eps_values <= rep.eps0 * (1 + 1e-12)
    rows = []
    for i, s in enumerate(xi):
        rows.append({"xi": float(s), "M_xi": complex(rep.M_xi_estimates[i]),
                     "stabilization": float(rep.stabilization[i]), "settled": bool(rep.settled[i]),
                     "bound_ratio": float(np.max(np.abs(rep.values[i, use])) / weight[i]) if use.any() else math.nan})
    for k, msg in rep.failures.items():
        print(f"warning: xi = {k[0]:g}, eps = {k[1]:g}: {msg}", file=sys.stderr)
    meta = {"bound_C": rep.bound_C, "bound_N": rep.bound_N, "eps0": rep.eps0, "C_max": rep.C_max,
            "passed_i": rep.passed_i, "passed_ii": rep.passed_ii, "stab_tol": rep.stab_tol,
            "eps_values": rep.eps_values.tolist(), "degree": m, "L": cfg["L"].name}
    ok = rep.passed_i and rep.passed_ii
    return rows, meta, EXIT_PASS if ok else EXIT_FAIL


def cmd_montel(cfg):
    rep = montel_report(cfg["n_list"], cfg["mu"], cfg["grid"])
    rows = []
    for (m, k), vals in rep.gammas.items():
        for n, v in zip(rep.n_list, vals):
            rows.append({"kind": "gamma", "m": m, "k": k, "n": n, "value": v})
        rows.append({"kind": "spread", "m": m, "k": k, "value": rep.spread[(m, k)],
                     "passed": rep.spread[(m, k)] <= rep.spread_limit})
    for (a, b), v in rep.separation.items():
        rows.append({"kind": "separation", "n": a, "n2": b, "value": v, "passed": v >= rep.separation_limit})
    meta = {"bounded": rep.bounded, "separated": rep.separated, "spread_limit": rep.spread_limit,
            "separation_limit": rep.separation_limit, "note": rep.note}
    return rows, meta, EXIT_PASS if rep.bounded and rep.separated else EXIT_FAIL


def cmd_check_sv(cfg):
    rep = sv_check(cfg["L"], cfg["a_set"], cfg["eps_grid"], cfg["tol"])
    rows = []
    for i, a in enumerate(rep.a_values):
        for j, e in enumerate(rep.eps_values):
            rows.append({"a": a, "eps": float(e), "deviation": float(rep.deviations[i, j])})
    meta = {"L": rep.L, "tol": rep.tol, "within_tol": rep.within_tol, "decreasing": rep.decreasing,
            "slowly_varying": rep.slowly_varying}
    return rows, meta, EXIT_PASS if rep.passed else EXIT_FAIL


HANDLERS = {
    "transform": cmd_transform,
    "roundtrip": cmd_roundtrip,
    "seminorm": cmd_seminorm,
    "abelian": cmd_abelian,
    "tauberian": cmd_tauberian,
    "montel": cmd_montel,
    "check-sv": cmd_check_sv,
}


def run(cfg: dict) -> int:
    """Execute a resolved configuration; returns the exit code."""
    rows, meta, code = HANDLERS[cfg["command"]](cfg)
    echo = {k: v for k, v in cfg.items() if k not in ("out",)}
    metadata = {"command": cfg["command"], "version": __version__, "numpy": np.__version__,
                "exit_code": code, "config": {k: _echo(v) for k, v in echo.items()}, **meta}
    emit(rows, metadata, cfg["format"], cfg["out"])
    return code


def _echo(v):
    if isinstance(v, SlowlyVaryingFn):
        return v.name
    if isinstance(v, EvalGrid):
        return f"{v.x_min:g}:{v.x_max:g}:{v.n}"
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, tuple):
        return list(v)
    return v


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_PASS
    try:
        cfg = resolve(args)
        return run(cfg)
    except (ConfigError, ArgumentError, DomainError, CapabilityError) as exc:
        print(f"frht-lab {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, CoverageError) as exc:
        print(f"frht-lab {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"frht-lab {args.command}: cannot write report: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
