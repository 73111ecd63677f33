"""Command-line front end.

Exit codes: 0 ok, 1 a property check failed, 2 bad input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, fields
from importlib import metadata

import numpy as np

from . import closed_forms as cf
from .channel import eigen_spectrum, normalize_static, read_matrices
from .checks import run_battery
from .errors import EewfError, InvalidInputError, UnsupportedDimensionError
from .montecarlo import SimConfig, siso_bounds_experiment, sweep, write_csv
from .solver import SolveSettings, solve_eewf
from .waterfilling import solve_wf

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3

_SIM_KEYS = {f.name for f in fields(SimConfig)}
_SOLVE_KEYS = {f.name for f in fields(SolveSettings)}
_EXTRA_KEYS = {"normalize", "instances", "oracle_dim"}
KNOWN_KEYS = _SIM_KEYS | _SOLVE_KEYS | _EXTRA_KEYS

log = logging.getLogger("eewf")


class ConfigError(InvalidInputError):
    pass


def load_config(path) -> dict:
    """Read a JSON object of settings; unknown keys are rejected by name."""
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(cfg) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    return cfg


def settings_from(cfg: dict) -> SolveSettings:
    return SolveSettings(**{k: cfg[k] for k in _SOLVE_KEYS if k in cfg})


def simconfig_from(cfg: dict, seed=None, trials=None) -> SimConfig:
    kw = {k: cfg[k] for k in _SIM_KEYS if k in cfg}
    if seed is not None:
        kw["seed"] = seed
    if trials is not None:
        kw["trials"] = trials
    return SimConfig(**kw)


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _fmt_vec(v) -> str:
    return "[" + ", ".join(f"{x:.6g}" for x in v) + "]"


# --- subcommands ----------------------------------------------------------------


def cmd_static(args, cfg, out) -> int:
    settings = settings_from(cfg)
    p_t = float(cfg.get("p_t", 1.0))
    normalize = bool(cfg.get("normalize", True)) and not args.raw
    try:
        matrices = list(read_matrices(args.matrix_file))
    except (OSError, ValueError) as exc:
        print(f"error: cannot parse {args.matrix_file}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if not matrices:
        print(f"error: no matrices in {args.matrix_file}", file=sys.stderr)
        return EXIT_INPUT
    results = []
    for k, h in enumerate(matrices):
        spectrum = eigen_spectrum(h)
        try:
            if normalize:
                spectrum = normalize_static(spectrum)
            ee = solve_eewf(spectrum, settings)
            wf = solve_wf(spectrum, p_t, settings.sigma2)
        except EewfError as exc:
            print(f"error: record {k}: {exc}", file=sys.stderr)
            return EXIT_SOLVER
        results.append(
            {
                "record": k,
                "lambdas": spectrum.lambdas.tolist(),
                "eewf": {"p": ee.p.tolist(), "eta": ee.eta, "rate": ee.rate, "ptx": ee.ptx, "mu": ee.mu, "active": ee.active},
                "wf": {"p": wf.p.tolist(), "eta": wf.capacity / wf.ptx, "capacity": wf.capacity, "ptx": wf.ptx, "prx": wf.prx, "water_level": wf.water_level, "active": wf.active},
            }
        )
        if not args.quiet:
            print(f"record {k}  N={spectrum.n}  lambda={_fmt_vec(spectrum.lambdas)}  P_r={settings.p_r:g}  P_t={p_t:g}  sigma2={settings.sigma2:g}")
            print(f"  {'':8}{'EEWF':>16}{'WF':>16}")
            print(f"  {'eta':8}{ee.eta:16.8g}{wf.capacity / wf.ptx:16.8g}")
            print(f"  {'rate':8}{ee.rate:16.8g}{wf.capacity:16.8g}")
            print(f"  {'P_t':8}{ee.ptx:16.8g}{wf.ptx:16.8g}")
            print(f"  {'P_r':8}{float(np.dot(spectrum.lambdas, ee.p)):16.8g}{wf.prx:16.8g}")
            print(f"  {'active':8}{ee.active:16d}{wf.active:16d}")
            print(f"  {'mu':8}{ee.mu:16.8g}{'-':>16}")
            print(f"  p EEWF  {_fmt_vec(ee.p)}")
            print(f"  p WF    {_fmt_vec(wf.p)}")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2)
    return EXIT_OK


def cmd_sweep(args, cfg, out) -> int:
    config = simconfig_from(cfg, args.seed, args.trials)
    settings = settings_from(cfg)
    out = out or "sweep.csv"
    try:
        open(out, "a").close()
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    t0 = time.perf_counter()
    try:
        rows = sweep(config, settings)
    except EewfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    write_csv(rows, out)
    meta = {
        "seed": config.seed,
        "antenna_counts": list(config.antenna_counts),
        "snr_grid_db": list(config.snr_grid_db),
        "trials": config.trials,
        "p_r": config.p_r,
        "p_t": config.p_t,
        "settings": asdict(settings),
        "calibrated_sigma2": [
            {"algorithm": r.algorithm, "n": r.n, "target_snr_db": r.target_snr_db, "sigma2": r.sigma2} for r in rows
        ],
        "tool_version": _version(),
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }
    with open(out + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
    if not args.quiet:
        print(f"wrote {len(rows)} rows to {out} in {meta['wall_time_s']} s")
    return EXIT_OK


def cmd_closed_form(args, cfg, out) -> int:
    p_r = args.p_r if args.p_r is not None else float(cfg.get("p_r", 1.0))
    sigma2 = args.sigma2 if args.sigma2 is not None else float(cfg.get("sigma2", 1.0))
    ns = args.n or list(cfg.get("antenna_counts", (1, 2, 4, 8, 16)))
    rows = []
    for fam, fn in (("Isotropic", cf.isotropic_eewf), ("Rank1", cf.rank1_eewf)):
        for n in ns:
            s = fn(int(n), p_r, sigma2)
            rows.append((fam, int(n), s.p_per_channel, s.eta, s.rate, s.ptx))
    if not args.quiet:
        print(f"P_r={p_r:g} sigma2={sigma2:g}")
        print(f"{'family':<10}{'N':>4}{'p':>14}{'eta':>14}{'rate':>14}{'P_t':>14}")
        for fam, n, p, eta, r, pt in rows:
            print(f"{fam:<10}{n:>4}{p:14.6g}{eta:14.6g}{r:14.6g}{pt:14.6g}")
        print(f"limits N->inf: isotropic rate {cf.isotropic_rate_limit(p_r, sigma2):.6g}, rank-1 rate {cf.rank1_rate_limit(p_r, sigma2):.6g}")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("family,n,p,eta,rate,ptx\n")
            for fam, n, p, eta, r, pt in rows:
                fh.write(f"{fam},{n},{p:.12g},{eta:.12g},{r:.12g},{pt:.12g}\n")
    return EXIT_OK


def cmd_verify(args, cfg, out) -> int:
    settings = settings_from(cfg)
    instances = args.instances or int(cfg.get("instances", 200))
    oracle_dim = args.oracle_dim or int(cfg.get("oracle_dim", 4))
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 7))
    try:
        results = run_battery(settings, instances, oracle_dim, seed)
    except UnsupportedDimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    failed = [r for r in results if not r.passed]
    if not args.quiet:
        for r in results:
            print(r.line())
    for r in failed:
        print(f"replay {r.name}: {json.dumps(r.instance)}", file=sys.stderr)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump([asdict(r) for r in results], fh, indent=2)
    return EXIT_PROPERTY if failed else EXIT_OK


def cmd_bounds(args, cfg, out) -> int:
    config = simconfig_from(cfg, args.seed, args.trials)
    grid = tuple(cfg.get("snr_grid_db", (0, 5, 10, 15, 20, 25, 30)))
    rows = siso_bounds_experiment(grid, config.trials, config.seed, config.truncation_cut, config.p_r, settings_from(cfg))
    if not args.quiet:
        print(f"<1/lambda> = {rows[0].inv_lambda_mean:.6g} over {rows[0].retained} retained fades (cut {config.truncation_cut:g})")
        print(f"{'snr_db':>7}{'R/Ce':>10}{'lower':>10}{'upper':>8}{'eta/etaC':>11}{'lower':>8}{'upper':>10}  ok")
        for r in rows:
            print(f"{r.snr_db:7.1f}{r.rate_ratio:10.5f}{r.rate_lower:10.5f}{r.rate_upper:8.3f}{r.eff_ratio:11.5f}{r.eff_lower:8.3f}{r.eff_upper:10.5f}  {'yes' if r.inside else 'NO'}")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("snr_db,inv_lambda_mean,retained,rate_ratio,rate_lower,rate_upper,eff_ratio,eff_lower,eff_upper\n")
            for r in rows:
                vals = asdict(r)
                fh.write(",".join(f"{v:.12g}" if isinstance(v, float) else str(v) for v in vals.values()) + "\n")
    return EXIT_OK if all(r.inside for r in rows) else EXIT_PROPERTY


# --- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON file with SimConfig/SolveSettings keys")
    common.add_argument("--out", metavar="PATH", help="output file")
    common.add_argument("--seed", type=int, help="root seed (unsigned 64-bit)")
    common.add_argument("--trials", type=int, help="Monte Carlo trial count")
    common.add_argument("--quiet", action="store_true", help="print nothing on success")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="eewf", description="Energy-efficient water-filling under a receive-power constraint")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("static", parents=[common], help="solve EEWF and WF for channel matrices from a file")
    p.add_argument("matrix_file", help="JSON lines, one matrix of [re, im] pairs (row-major) per line")
    p.add_argument("--raw", action="store_true", help="skip the sum(lambda) = N^2 normalization")
    p.set_defaults(func=cmd_static)

    p = sub.add_parser("sweep", parents=[common], help="Monte Carlo sweep over N and SNR, CSV output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("closed-form", parents=[common], help="isotropic and rank-1 closed-form table")
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--p-r", type=float)
    p.add_argument("--sigma2", type=float)
    p.set_defaults(func=cmd_closed_form)

    p = sub.add_parser("verify", parents=[common], help="run the property battery")
    p.add_argument("--instances", type=int)
    p.add_argument("--oracle-dim", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", parents=[common], help="truncated SISO rate/efficiency ratio bounds")
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    level = logging.WARNING - 10 * args.verbose if not args.quiet else logging.ERROR
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg, args.out)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
