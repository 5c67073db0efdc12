"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 reproduction mismatch.
"""

from __future__ import annotations

import argparse
import math
import shlex
import sys
import warnings
from typing import Optional, Sequence

from . import analytic, montecarlo, pointprocess, reproduce
from .analytic import InfeasibleError
from .model import ValidationError
from .pointprocess import SamplerError
from .quadrature import QuadratureError
from .records import CONFIG_KEYS, RunConfig, header_text, output_path, parse_pairs, resolve, table_text, write_text

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_MISMATCH = 0, 1, 2, 3

COMMANDS = ("expectation", "variance", "power-outage", "transmission-outage", "optimal-tau",
            "rate-bound", "sample", "sweep", "reproduce")
SWEEP_TARGETS = ("expectation", "variance", "power-outage", "transmission-outage", "optimal-tau",
                 "rate-bound")

# flag dest -> config key
_FLAG_KEYS = {
    "model": "model", "j": "j", "rho": "rho", "R": "R_m", "arch": "arch", "tau": "tau", "xi": "xi",
    "d": "d_m", "h0": "h0", "epsilon": "epsilon_m", "P_C_W": "P_C_W", "P_C_dBm": "P_C_dBm",
    "sigma2_dBm": "sigma2_dBm", "W": "W_Hz", "m_kbps": "m_kbps", "m_bps": "m_bps", "seed": "seed",
    "n": "n", "sampler": "sampler", "beta": "beta", "P_S_W": "P_S_W", "G_S": "G_S", "G_H": "G_H",
    "wavelength": "lambda_m", "sigma2_W": "sigma2_W",
}


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("parameters")
    g.add_argument("--config", help="key = value config file (or a data file written by this tool)")
    g.add_argument("--model", choices=("ginibre", "ppp"))
    g.add_argument("--j", type=int, help="alpha = -1/j")
    g.add_argument("--rho", type=float, help="source density (1/m^2)")
    g.add_argument("--R", type=float, help="disc radius (m)")
    g.add_argument("--arch", choices=("separated", "time_switching"))
    g.add_argument("--tau", type=float)
    g.add_argument("--xi", type=int, choices=(0, 1))
    g.add_argument("--d", type=float, help="sensor-to-sink distance (m)")
    g.add_argument("--h0", type=float, help="channel gain, overrides --d")
    g.add_argument("--epsilon", type=float)
    g.add_argument("--P-C-W", dest="P_C_W", type=float)
    g.add_argument("--P-C-dBm", dest="P_C_dBm", type=float)
    g.add_argument("--sigma2-dBm", dest="sigma2_dBm", type=float)
    g.add_argument("--sigma2-W", dest="sigma2_W", type=float)
    g.add_argument("--beta", type=float, help="RF-to-DC efficiency in (0, 1]")
    g.add_argument("--P-S-W", dest="P_S_W", type=float)
    g.add_argument("--G-S", dest="G_S", type=float)
    g.add_argument("--G-H", dest="G_H", type=float)
    g.add_argument("--lambda", dest="wavelength", type=float, help="wavelength (m)")
    g.add_argument("--W", type=float, help="bandwidth (Hz)")
    g.add_argument("--m-kbps", dest="m_kbps", type=float)
    g.add_argument("--m-bps", dest="m_bps", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--n", type=int, help="Monte Carlo replications (0 = analytic only)")
    g.add_argument("--sampler", choices=("radial", "hkpv"))
    o = p.add_argument_group("output")
    o.add_argument("--output", "-o", help="output file (default: $AMBIENTRF_OUTPUT_DIR/<command>.<format>)")
    o.add_argument("--format", choices=("csv", "json"), default="csv")
    o.add_argument("--workers", type=int, default=1, help="worker processes; never changes results")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ambientrf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "sweep":
            p.add_argument("--target", required=True, choices=SWEEP_TARGETS)
            p.add_argument("--axis", required=True, help=f"config key to sweep, one of {', '.join(CONFIG_KEYS)}")
            p.add_argument("--values", required=True, help="comma-separated values")
        if name == "reproduce":
            p.add_argument("target", nargs="?", help=f"one of {', '.join(reproduce.TARGETS)}")
            p.add_argument("--quick", action="store_true", help="n = 1e4; physical defaults unchanged")
        _common(p)
    return parser


def resolve_args(args) -> RunConfig:
    pairs = {}
    if args.config:
        with open(args.config) as fh:
            pairs.update(parse_pairs(fh.read()))
    for dest, key in _FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            pairs[key] = str(value)
    if args.h0 is None and args.d is not None:
        pairs.pop("h0", None)
    if args.P_C_dBm is not None:
        pairs.pop("P_C_W", None)
    if args.m_kbps is not None:
        pairs.pop("m_bps", None)
    if args.sigma2_dBm is not None and args.sigma2_W is None:
        pairs.pop("sigma2_W", None)
    if pairs.get("arch") == "time_switching" and "tau" not in pairs:
        raise ValidationError("--arch time_switching needs --tau")
    return resolve(pairs)


def _need_m(cfg: RunConfig) -> float:
    if cfg.m is None:
        raise ValidationError("this command needs a rate requirement (--m-kbps or --m-bps)")
    return cfg.m


def _mc_n(cfg: RunConfig) -> int:
    return cfg.n or 0


def compute(target: str, cfg: RunConfig, workers: int = 1) -> dict:
    """One result row for ``target`` at the resolved config."""
    p, a, model, seed, n = cfg.params, cfg.arch, cfg.model, cfg.seed, _mc_n(cfg)
    row: dict = {}
    if target == "expectation":
        mean, approx = analytic.expected_harvest(p, a, model)
        row.update(analytic=mean, approx=approx)
        if n:
            est = montecarlo.estimate_harvest_moments(p, a, model, n, seed, workers, cfg.sampler)[0]
            row.update(estimate=est.mean, stderr=est.stderr)
    elif target == "variance":
        res = analytic.harvest_moments(p, a, model)
        row.update(analytic=res.variance, quadrature_error=res.quadrature_error_estimate)
        if n:
            est = montecarlo.estimate_harvest_moments(p, a, model, n, seed, workers, cfg.sampler)[1]
            row.update(estimate=est.mean, stderr=est.stderr)
    elif target in ("power-outage", "transmission-outage"):
        kind = "power" if target == "power-outage" else "transmission"
        m = _need_m(cfg) if kind == "transmission" else None
        res = (analytic.power_outage_bound(p, a, model) if kind == "power"
               else analytic.transmission_outage_bound(p, a, model, m))
        row.update(analytic=res.value, critical_radius=res.critical_radius,
                   truncation_N=res.truncation_N, truncation_residual=res.truncation_residual)
        if n:
            for scenario in ("worst_case", "general"):
                est = montecarlo.estimate_outage(kind, scenario, p, a, model, m, n, seed, workers, cfg.sampler)
                row[f"estimate_{scenario}"] = est.mean
                row[f"stderr_{scenario}"] = est.stderr
    elif target == "optimal-tau":
        m = _need_m(cfg)
        row.update(analytic=analytic.optimal_tau(p, m, a.xi))
        if n:
            row.update(estimate=montecarlo.estimate_optimal_tau_empirical(
                p, model, m, reproduce.TAU_GRID, n, seed, a.xi, workers))
    elif target == "rate-bound":
        res = analytic.rate_lower_bound(p, a, model)
        row.update(analytic=res.value, argmax_M=res.argmax_M)
    else:
        raise ValidationError(f"unknown target {target!r}")
    if n:
        row.update(n=n, seed=seed)
    return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in row.items()}


def _summary(target, row):
    parts = [f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items()]
    return f"{target}: " + " ".join(parts)


def _command_line(args) -> str:
    """Structural part of the invocation; parameters live in the embedded config."""
    words = ["ambientrf", args.command]
    if args.command == "sweep":
        words += ["--target", args.target, "--axis", args.axis, "--values", args.values]
    if args.command == "reproduce":
        words += [args.target] + (["--quick"] if args.quick else [])
    words += ["--format", args.format]
    return shlex.join(words)


def _run_sample(args, cfg, argv):
    config = pointprocess.sample(cfg.model, cfg.seed)
    path = output_path("sample.csv", args.output)
    first, _, rest = config.to_csv().partition("\n")
    write_text(path, first + "\n" + header_text(cfg, _command_line(args)) + rest)
    print(f"sample: {len(config)} points of {cfg.model.label()} within R={cfg.model.R:g} -> {path}")
    return EXIT_OK


def _run_sweep(args, cfg, argv):
    if args.axis not in CONFIG_KEYS:
        raise ValidationError(f"unknown sweep axis {args.axis!r}; valid keys: {', '.join(CONFIG_KEYS)}")
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ValidationError("sweep needs at least one value")
    base = cfg.to_dict()
    rows = []
    for v in values:
        point = resolve({**base, args.axis: v})
        row = {args.axis: v}
        row.update(compute(args.target, point, args.workers))
        rows.append(row)
    path = output_path(f"sweep-{args.target}.{args.format}", args.output)
    write_text(path, table_text(rows, cfg, _command_line(args), args.format))
    print(f"sweep {args.target} over {args.axis}: {len(rows)} points -> {path}")
    return EXIT_OK


def _run_reproduce(args, cfg, argv):
    if args.target not in reproduce.TARGETS:
        print(f"unknown or missing target {args.target!r}; available: {', '.join(reproduce.TARGETS)}",
              file=sys.stderr)
        return EXIT_VALIDATION
    result = reproduce.TARGETS[args.target](quick=args.quick, seed=cfg.seed, n=cfg.n, workers=args.workers)
    path = output_path(f"reproduce-{args.target}.{args.format}", args.output)
    write_text(path, table_text(result.rows, result.config, _command_line(args), args.format))
    for c in result.checks:
        status = "PASS" if c.ok else "FAIL"
        print(f"[{status}] {c.label}: got {c.value:.6g}, expected {c.expected:.6g} +/- {c.tol:.3g}")
    failed = sum(not c.ok for c in result.checks)
    print(f"reproduce {args.target}: {len(result.checks) - failed}/{len(result.checks)} checks passed -> {path}")
    return EXIT_OK if failed == 0 else EXIT_MISMATCH


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    warnings.simplefilter("default", RuntimeWarning)
    try:
        cfg = resolve_args(args)
        if args.command == "sample":
            return _run_sample(args, cfg, argv)
        if args.command == "sweep":
            return _run_sweep(args, cfg, argv)
        if args.command == "reproduce":
            return _run_reproduce(args, cfg, argv)
        row = compute(args.command, cfg, args.workers)
        path = output_path(f"{args.command}.{args.format}", args.output)
        write_text(path, table_text([row], cfg, _command_line(args), args.format))
        print(_summary(args.command, row))
        return EXIT_OK
    except (ValidationError, InfeasibleError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (QuadratureError, SamplerError, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
