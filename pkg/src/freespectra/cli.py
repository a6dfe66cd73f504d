"""Batch front-end: spectrum/rates/bounds/verify/energy subcommands.

Configuration comes from a JSON document (--config) with individual flags
taking precedence over the file, which takes precedence over defaults.
Every CSV starts with a comment line carrying a hash of the effective
configuration, and all outputs are byte-deterministic given config + seed.

Exit codes: 0 success, 1 inequality failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bounds as _bounds
from . import checks as _checks
from . import freecalc as _fc
from . import measures as _ms
from . import randmat as _rm
from .ncpoly import PolyParseError, format_poly, parse_poly

EXIT_OK = 0
EXIT_INEQUALITY = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------


def _load_config(defaults, args, keys):
    cfg = dict(defaults)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        unknown = set(file_cfg) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update(file_cfg)
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _fmt_value(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_csv(path, columns, rows, config_hash):
    lines = [f"# config_hash={config_hash}", ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")


def _out_dir(cfg):
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

SPECTRUM_DEFAULTS = {
    "poly": "1*x1",
    "eps": 1e-3,
    "grid_points": 2001,
    "span": None,
    "richardson": False,
    "simulate_n": 0,
    "replicates": 20,
    "seed": 0,
    "out_dir": "out",
    "prefix": "spectrum",
    "figures": True,
}


def cmd_spectrum(cfg):
    p = parse_poly(cfg["poly"])
    if not p.is_selfadjoint():
        raise ConfigError(f"polynomial {format_poly(p)!r} is not selfadjoint")
    table = _fc.polynomial_spectrum(
        p,
        eps=float(cfg["eps"]),
        grid_points=int(cfg["grid_points"]),
        span=cfg["span"],
        richardson=bool(cfg["richardson"]),
    )
    out = _out_dir(cfg)
    hsh = _config_hash(cfg)
    prefix = cfg["prefix"]
    _write_csv(
        out / f"{prefix}_density.csv",
        ["x", "density", "cdf"],
        zip(table.x, table.density, table.F),
        hsh,
    )
    sim_eigs = None
    if int(cfg["simulate_n"]) > 0:
        samples = _rm.sample_spectra(
            p, int(cfg["simulate_n"]), int(cfg["replicates"]), int(cfg["seed"])
        )
        rows = [
            (s.replicate, i, lam)
            for s in samples
            for i, lam in enumerate(s.eigenvalues)
        ]
        _write_csv(
            out / f"{prefix}_sim_spectra.csv",
            ["replicate", "index", "eigenvalue"],
            rows,
            hsh,
        )
        sim_eigs = np.concatenate([s.eigenvalues for s in samples])
    _write_json(
        out / f"{prefix}_manifest.json",
        {"command": "spectrum", "config": cfg, "config_hash": hsh},
    )
    if cfg["figures"]:
        from . import plotting

        plotting.save_density_figure(
            table,
            out / f"{prefix}_density.png",
            title=format_poly(p),
            simulation=sim_eigs,
        )
    print(f"spectrum: wrote {prefix}_density.csv ({table.x.size} rows) to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# rates
# ---------------------------------------------------------------------------

RATES_DEFAULTS = {
    "poly": "1*x1",
    "n_ladder": [50, 100, 200, 400],
    "replicates": 50,
    "seed": 0,
    "target": "auto",
    "eps": 1e-3,
    "out_dir": "out",
    "prefix": "rates",
    "figures": True,
}


def _target_measure(cfg, p):
    name = cfg["target"]
    if name == "semicircle":
        return _ms.Semicircle()
    if name == "free_poisson":
        return _ms.FreePoisson()
    if name == "auto":
        canon = format_poly(p)
        if canon == "1*x1":
            return _ms.Semicircle()
        if canon == "1*x1x1":
            return _ms.FreePoisson()
        return _fc.polynomial_spectrum(p, eps=float(cfg["eps"]), richardson=True)
    raise ConfigError(f"unknown target {name!r}")


def cmd_rates(cfg):
    p = parse_poly(cfg["poly"])
    ladder = [int(N) for N in cfg["n_ladder"]]
    if len(set(ladder)) < 3:
        raise ConfigError("n_ladder needs at least 3 distinct sizes")
    target = _target_measure(cfg, p)
    reps, seed = int(cfg["replicates"]), int(cfg["seed"])
    deltas = []
    for N in ladder:
        measure = _rm.mean_eed(p, N, reps, seed)
        deltas.append(_ms.kolmogorov(measure, target))
    slope, intercept, r2 = _ms.rate_fit(ladder, deltas)
    d = max(int(p.degree()), 1)
    guaranteed = float(_bounds.pgue_rate(d))
    block_rate = float(2 * _bounds.rate_exponent(Fraction(2, 3), 7, 2))
    out = _out_dir(cfg)
    hsh = _config_hash(cfg)
    prefix = cfg["prefix"]
    _write_csv(
        out / f"{prefix}.csv",
        ["N", "kolmogorov"],
        zip(ladder, deltas),
        hsh,
    )
    report = {
        "command": "rates",
        "config": cfg,
        "config_hash": hsh,
        "poly": format_poly(p),
        "fit": {"slope": slope, "intercept": intercept, "r_squared": r2},
        "guaranteed_exponents": {
            "polynomial_model": -guaranteed,
            "degree1_block_model": -block_rate,
        },
        "distances": {str(N): d_ for N, d_ in zip(ladder, deltas)},
    }
    _write_json(out / f"{prefix}_report.json", report)
    if cfg["figures"]:
        from . import plotting

        plotting.save_rates_figure(
            ladder, deltas, slope, intercept,
            out / f"{prefix}.png",
            reference_slope=-block_rate if d == 1 else -guaranteed,
            title=format_poly(p),
        )
    print(
        f"rates: slope {slope:.4f} (r2 {r2:.3f}); guaranteed polynomial-model "
        f"slope -{guaranteed:.5f}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

BOUNDS_DEFAULTS = {
    "formula": "holder_exponent",
    "params": {},
    "out": None,
}

_FORMULAS = {
    "holder_exponent": (_bounds.holder_exponent, ("d",)),
    "alpha_exponent": (_bounds.alpha_exponent, ("d",)),
    "cd_constant": (_bounds.cd_constant, ("d",)),
    "holder_constant": (
        _bounds.holder_constant,
        ("d", "R", "fisher", "normR", "leading_weight", "n_vars"),
    ),
    "energy_bound": (
        _bounds.energy_bound,
        ("d", "R", "fisher", "normR", "leading_weight", "n_vars"),
    ),
    "rate_exponent": (_bounds.rate_exponent, ("beta", "k", "l")),
    "rate_exponent_compact": (_bounds.rate_exponent_compact, ("beta", "k")),
    "pgue_rate": (_bounds.pgue_rate, ("d",)),
}


def cmd_bounds(cfg):
    name = cfg["formula"]
    if name not in _FORMULAS:
        raise ConfigError(
            f"unknown formula {name!r}; available: {', '.join(sorted(_FORMULAS))}"
        )
    fn, argnames = _FORMULAS[name]
    params = dict(cfg["params"])
    unknown = set(params) - set(argnames)
    if unknown:
        raise ConfigError(f"unknown parameters for {name}: {', '.join(sorted(unknown))}")
    try:
        value = fn(**params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad parameters for {name}: {exc}") from exc
    if isinstance(value, _bounds.HolderConstant):
        payload_value = {"value": value.value, "simplified": value.simplified}
    else:
        payload_value = value
    report = _bounds.BoundReport(name=name, value=payload_value, inputs=params)
    text = json.dumps(report.as_dict(), indent=2, sort_keys=True, default=str)
    print(text)
    if cfg["out"]:
        Path(cfg["out"]).write_text(text + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

VERIFY_DEFAULTS = {
    "only": [],
    "rhs_scale": 1.0,
    "out": None,
}


def cmd_verify(cfg):
    names = cfg["only"] or None
    try:
        reports = _checks.run_suite(names, rhs_scale=float(cfg["rhs_scale"]))
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    failed = False
    for rep in reports:
        status = "PASS" if rep["passed"] else "FAIL"
        print(f"{rep['name']}: {status} (margin {rep['margin']:.6g})")
        failed = failed or not rep["passed"]
    if cfg["out"]:
        _write_json(cfg["out"], {"checks": reports, "rhs_scale": cfg["rhs_scale"]})
    return EXIT_INEQUALITY if failed else EXIT_OK


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------

ENERGY_DEFAULTS = {
    "poly": None,
    "law": None,
    "eps": 1e-3,
    "grid_points": 2001,
    "out_dir": "out",
    "prefix": "energy",
    "figures": True,
}

_LAWS = {
    "semicircle": _ms.Semicircle,
    "free_poisson": _ms.FreePoisson,
    "uniform": _ms.Uniform,
}


def cmd_energy(cfg):
    if bool(cfg["poly"]) == bool(cfg["law"]):
        raise ConfigError("give exactly one of poly or law")
    if cfg["law"]:
        if cfg["law"] not in _LAWS:
            raise ConfigError(f"unknown law {cfg['law']!r}")
        source = _LAWS[cfg["law"]]()
        lo, hi = source.span
        x = np.linspace(lo, hi, int(cfg["grid_points"]))
        table = _ms.DensityTable.from_density(x, source.density(x))
        label = cfg["law"]
    else:
        p = parse_poly(cfg["poly"])
        table = _fc.polynomial_spectrum(
            p, eps=float(cfg["eps"]), grid_points=int(cfg["grid_points"]),
            richardson=True,
        )
        label = format_poly(p)
    energy = _ms.log_energy(table)
    chi = _ms.entropy_from_energy(energy)
    fit = _ms.holder_estimate(table)
    jam = _ms.jam_bound(fit.constant, max(fit.exponent, 1e-6))
    out = _out_dir(cfg)
    hsh = _config_hash(cfg)
    report = {
        "command": "energy",
        "config": cfg,
        "config_hash": hsh,
        "source": label,
        "log_energy": energy,
        "free_entropy": chi,
        "holder_fit": fit.as_dict(),
        "energy_bound_from_fit": jam,
        "energy_within_bound": bool(energy <= jam),
    }
    _write_json(out / f"{cfg['prefix']}_report.json", report)
    if cfg["figures"]:
        from . import plotting

        plotting.save_modulus_figure(
            fit, out / f"{cfg['prefix']}_modulus.png", title=label
        )
    print(
        f"energy: I = {energy:.6f}, entropy = {chi:.6f}, "
        f"fit bound = {jam:.6f} ({label})"
    )
    return EXIT_INEQUALITY if energy > jam else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="freespectra",
        description="spectral distributions of polynomials in free semicircular "
        "variables, their random-matrix models, and regularity bounds",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("spectrum", help="limiting density/CDF of a polynomial")
    _add_common(sp)
    sp.add_argument("--poly")
    sp.add_argument("--eps", type=float)
    sp.add_argument("--grid-points", dest="grid_points", type=int)
    sp.add_argument("--span", type=float)
    sp.add_argument("--richardson", action="store_const", const=True)
    sp.add_argument("--simulate-n", dest="simulate_n", type=int)
    sp.add_argument("--replicates", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out-dir", dest="out_dir")
    sp.add_argument("--prefix")
    sp.add_argument("--no-figures", dest="figures", action="store_const", const=False)

    rt = subs.add_parser("rates", help="Kolmogorov distance ladder and rate fit")
    _add_common(rt)
    rt.add_argument("--poly")
    rt.add_argument("--n-ladder", dest="n_ladder",
                    type=lambda s: [int(tok) for tok in s.split(",")])
    rt.add_argument("--replicates", type=int)
    rt.add_argument("--seed", type=int)
    rt.add_argument("--target", choices=["auto", "semicircle", "free_poisson"])
    rt.add_argument("--out-dir", dest="out_dir")
    rt.add_argument("--prefix")
    rt.add_argument("--no-figures", dest="figures", action="store_const", const=False)

    bd = subs.add_parser("bounds", help="evaluate a named constant or exponent")
    _add_common(bd)
    bd.add_argument("--formula")
    bd.add_argument(
        "-p", "--param", dest="params_list", action="append", default=None,
        metavar="KEY=VALUE",
    )
    bd.add_argument("--out")

    vf = subs.add_parser("verify", help="run the named inequality suites")
    _add_common(vf)
    vf.add_argument("--only", type=lambda s: s.split(","))
    vf.add_argument("--rhs-scale", dest="rhs_scale", type=float)
    vf.add_argument("--out")

    en = subs.add_parser("energy", help="logarithmic energy and free entropy")
    _add_common(en)
    en.add_argument("--poly")
    en.add_argument("--law", choices=sorted(_LAWS))
    en.add_argument("--eps", type=float)
    en.add_argument("--grid-points", dest="grid_points", type=int)
    en.add_argument("--out-dir", dest="out_dir")
    en.add_argument("--prefix")
    en.add_argument("--no-figures", dest="figures", action="store_const", const=False)

    return parser


def _parse_param_list(pairs):
    out = {}
    for raw in pairs:
        if "=" not in raw:
            raise ConfigError(f"parameter {raw!r} is not KEY=VALUE")
        key, val = raw.split("=", 1)
        try:
            num = json.loads(val)
        except json.JSONDecodeError:
            raise ConfigError(f"cannot parse value {val!r} for {key}") from None
        out[key.strip()] = num
    return out


_COMMANDS = {
    "spectrum": (SPECTRUM_DEFAULTS, cmd_spectrum),
    "rates": (RATES_DEFAULTS, cmd_rates),
    "bounds": (BOUNDS_DEFAULTS, cmd_bounds),
    "verify": (VERIFY_DEFAULTS, cmd_verify),
    "energy": (ENERGY_DEFAULTS, cmd_energy),
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    defaults, runner = _COMMANDS[args.command]
    try:
        cfg = _load_config(defaults, args, defaults.keys())
        if args.command == "bounds" and getattr(args, "params_list", None):
            cfg["params"] = {**cfg["params"], **_parse_param_list(args.params_list)}
        return runner(cfg)
    except (ConfigError, PolyParseError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _fc.NonConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_INEQUALITY


if __name__ == "__main__":
    sys.exit(main())
