"""Command-line entry point.

Subcommands: ``params`` (print the derived model quantities), ``simulate``
(write one path's full time series as CSV), ``compare`` (the adaptive vs
classic terminal-wealth experiment), ``sweep`` (compare across a parameter
range), ``validate`` (the statistical oracle suite).  Exit codes: 0 success,
1 configuration error, 2 runtime error, 3 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import montecarlo as mc
from .config import ConfigError, RunConfig, dumps, load
from .simulate import evolve_wealth, path_rng, sample_xi, simulate_path
from .strategy import classic_strategy, project_unit, strategy_grid

__all__ = ["main", "build_parser"]

PATH_COLUMNS = (
    "t",
    "x",
    "z",
    "phase",
    "i0",
    "pi_star_raw",
    "pi_star",
    "pi_c",
    "w_star",
    "w_c",
)


class _UsageError(Exception):
    """Bad command line; reported as a configuration error (exit 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="resband",
        description=(
            "Resistance-band price model: conditioned simulation, "
            "log-optimal strategies and validation oracles."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add_common(p, needs_seed):
        p.add_argument("--config", metavar="FILE", help="YAML run configuration")
        p.add_argument(
            "--seed",
            type=int,
            metavar="U64",
            help="master seed" + (" (required unless set in the config file)" if needs_seed else ""),
        )
        p.add_argument("--dt", type=float, metavar="REAL", help="grid step override")
        p.add_argument("--out", metavar="DIR", help="output directory override")

    p_params = sub.add_parser("params", help="print derived model parameters")
    add_common(p_params, needs_seed=False)

    p_sim = sub.add_parser("simulate", help="write one simulated path as CSV")
    add_common(p_sim, needs_seed=True)

    p_cmp = sub.add_parser("compare", help="adaptive vs classic terminal wealth")
    add_common(p_cmp, needs_seed=True)
    p_cmp.add_argument("--paths", type=int, metavar="N", help="number of paths override")

    p_sweep = sub.add_parser("sweep", help="compare across a parameter range")
    add_common(p_sweep, needs_seed=True)
    p_sweep.add_argument("--paths", type=int, metavar="N", help="number of paths override")
    p_sweep.add_argument("--param", choices=("mu0", "alpha"), help="swept parameter")
    p_sweep.add_argument(
        "--values", metavar="CSV", help="comma-separated swept values, e.g. 0.5,0.6,0.7"
    )

    p_val = sub.add_parser("validate", help="run the statistical oracle suite")
    add_common(p_val, needs_seed=True)
    p_val.add_argument(
        "--paths",
        type=int,
        default=100_000,
        metavar="N",
        help="oracle paths for the crossing and martingale checks; the "
        "duration check always uses 10000 samples, the size its CDF "
        "tolerance is calibrated for (default 100000)",
    )
    return parser


def _load_config(args) -> RunConfig:
    rc = load(args.config) if args.config else RunConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.dt is not None:
        changes["dt"] = args.dt
    if args.out is not None:
        changes["out_dir"] = args.out
    if getattr(args, "paths", None) is not None and args.command != "validate":
        changes["n_paths"] = args.paths
    if getattr(args, "param", None) is not None:
        changes["sweep_param"] = args.param
    if getattr(args, "values", None) is not None:
        try:
            values = tuple(float(v) for v in args.values.split(","))
        except ValueError as exc:
            raise ConfigError(f"--values must be a comma-separated number list: {exc}") from exc
        changes["sweep_values"] = values
    if changes:
        rc = rc.override(**changes)
    return rc


def _require_seed(rc: RunConfig) -> RunConfig:
    if rc.seed is None:
        raise ConfigError("a seed is required for experiments: set sim.seed or pass --seed")
    return rc


def _fmt(value, precision: int) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), f".{precision}g")


def _out_path(rc: RunConfig, name: str) -> str:
    os.makedirs(rc.out_dir, exist_ok=True)
    return os.path.join(rc.out_dir, name)


def cmd_params(rc: RunConfig) -> int:
    params = rc.params()
    law = rc.law.strategy_law(params)
    prec = rc.precision
    print(f"mu0 = {_fmt(rc.mu0, prec)}  sigma = {_fmt(rc.sigma, prec)}  r = {_fmt(rc.r, prec)}")
    print(f"band: alpha = {_fmt(params.alpha, prec)}  epsilon = {_fmt(params.epsilon, prec)}")
    print(f"mu (normalized drift) = {_fmt(params.mu, prec)}")
    print(f"p (single-crossing probability) = {_fmt(params.p, prec)}")
    print(f"pi_c (classic fraction, raw) = {_fmt(classic_strategy(params), prec)}")
    print(f"P(A_xi) = {_fmt(law.event_prob(params.p), prec)}")
    bound = law.support_bound()
    shown = (bound + 1) if bound is not None else 10
    weights = ", ".join(_fmt(law.pmf(n), prec) for n in range(shown))
    tail = "" if bound is not None else ", ..."
    print(f"law {rc.law.kind}: alpha-weights [{weights}{tail}]")
    return 0


def cmd_simulate(rc: RunConfig) -> int:
    exp = rc.experiment()
    params = exp.params()
    law = exp.strategy_law()
    rng = path_rng(exp.seed, 0)
    xi = sample_xi(law, params, rng, measure="Q")
    path = simulate_path(params, xi, exp.sim(0), rng=rng)
    raw = strategy_grid(path.x, path.phase, path.i0, params, law)
    pi_c = classic_strategy(params)
    w_star = evolve_wealth(path, raw, params, w0=exp.w0)
    w_classic = evolve_wealth(path, pi_c, params, w0=exp.w0)
    star = project_unit(raw)
    classic = float(project_unit(pi_c))
    z = path.price(params)
    out = _out_path(rc, "path.csv")
    prec = rc.precision
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PATH_COLUMNS)
        for k in range(path.x.shape[0]):
            writer.writerow(
                [
                    _fmt(path.times[k], prec),
                    _fmt(path.x[k], prec),
                    _fmt(z[k], prec),
                    int(path.phase[k]),
                    int(path.i0[k]),
                    _fmt(raw[k], prec),
                    _fmt(star[k], prec),
                    _fmt(classic, prec),
                    _fmt(w_star.w[k], prec),
                    _fmt(w_classic.w[k], prec),
                ]
            )
    print(f"wrote {out}: {path.x.shape[0]} rows, xi = {xi}, "
          f"W*_T = {_fmt(w_star.w[-1], prec)}, W^c_T = {_fmt(w_classic.w[-1], prec)}")
    return 0


def cmd_compare(rc: RunConfig) -> int:
    exp = rc.experiment()
    summary = mc.run_compare(exp)
    rows = mc.compare_table(exp, summary)
    table = _out_path(rc, "compare.csv")
    mc.write_table(table, rows, sig=rc.precision)
    mc.write_jsonl(_out_path(rc, "summary.jsonl"), [mc.summary_record("compare", exp, summary)])
    prec = rc.precision
    print(f"{summary.quantity}: mean = {_fmt(summary.mean, prec)} "
          f"+- {_fmt(summary.std_err, prec)} (n = {summary.n}); wrote {table}")
    return 0


def cmd_sweep(rc: RunConfig) -> int:
    if rc.sweep_param is None:
        raise ConfigError("sweep needs --param and --values (or experiment.sweep in the config)")
    exp = rc.experiment()
    values = list(rc.sweep_values)
    summaries = mc.run_sweep(exp, rc.sweep_param, values)
    rows = mc.sweep_table(exp, rc.sweep_param, values, summaries)
    table = _out_path(rc, "sweep.csv")
    mc.write_table(table, rows, sig=rc.precision)
    records = [
        mc.summary_record("sweep", exp, summary, param_name=rc.sweep_param, param_value=value)
        for value, summary in zip(values, summaries)
    ]
    mc.write_jsonl(_out_path(rc, "summary.jsonl"), records)
    prec = rc.precision
    for value, summary in zip(values, summaries):
        print(f"{rc.sweep_param} = {_fmt(value, prec)}: mean = {_fmt(summary.mean, prec)} "
              f"+- {_fmt(summary.std_err, prec)}")
    print(f"wrote {table}")
    return 0


def cmd_validate(rc: RunConfig, oracle_paths: int) -> int:
    if oracle_paths < 100:
        raise ConfigError(f"--paths must be at least 100, got {oracle_paths}")
    exp = rc.experiment()
    params = exp.params()
    sim = exp.sim()
    rows = []

    def note(check, expected, observed, z, passed):
        rows.append(
            {
                "check": check,
                "expected": expected,
                "observed": observed,
                "z": z,
                "passed": int(passed),
            }
        )
        state = "pass" if passed else "FAIL"
        print(f"{state}  {check}: expected {_fmt(expected, rc.precision)}, "
              f"observed {_fmt(observed, rc.precision)}, z = {_fmt(z, rc.precision)}")

    pn = mc.validate_pn(params, sim, n_max=2, n_paths=oracle_paths)
    for c in pn.checks:
        if c.n == 0:
            continue
        note(f"crossing_prob_n{c.n}", c.expected, c.observed, c.z, c.passed)
    note("crossing_prob_anomalies", 0, pn.anomalies, 0.0, pn.anomalies == 0)

    ht = mc.validate_htransform(params, sim, n_samples=10_000)
    note("duration_mean", ht.mean_oracle, ht.mean_conditioned, ht.mean_z, abs(ht.mean_z) < 3.0)
    note("duration_var", ht.var_oracle, ht.var_conditioned, ht.var_z, abs(ht.var_z) < 3.0)
    note("duration_ecdf_dist", 0.0, ht.ecdf_distance, 0.0, ht.ecdf_distance < 0.03)
    note("acceptance_rate", ht.rate_expected, ht.rate_observed, ht.rate_z, abs(ht.rate_z) <= 3.0)
    note("duration_oracle_drops", 0.0, ht.oracle_drop_fraction, 0.0,
         ht.oracle_drop_fraction <= 0.05)
    note("duration_anomalies", 0, ht.dropped_conditioned + ht.anomalies, 0.0,
         ht.dropped_conditioned + ht.anomalies == 0)

    mart = mc.validate_martingale(params, sim, n=2, n_paths=oracle_paths)
    for c in mart.checks:
        note(f"martingale_t{c.t:g}", c.expected, c.observed, c.z, c.passed)
    note("martingale_anomalies", 0, mart.anomalies, 0.0, mart.anomalies == 0)

    opt = mc.validate_optimality(exp, delta=0.25)
    for m in opt.margins:
        z = m.margin / m.std_err if m.std_err > 0.0 else 0.0
        note(f"optimality_vs_{m.challenger}", 0.0, m.margin, z, m.passed)

    table = _out_path(rc, "validate.csv")
    with open(table, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("check", "expected", "observed", "z", "passed"))
        for row in rows:
            writer.writerow(
                [
                    row["check"],
                    _fmt(row["expected"], rc.precision),
                    _fmt(row["observed"], rc.precision),
                    _fmt(row["z"], rc.precision),
                    row["passed"],
                ]
            )
    failed = sum(1 for row in rows if not row["passed"])
    print(f"wrote {table}; {len(rows) - failed}/{len(rows)} checks passed")
    return 3 if failed else 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    try:
        rc = _load_config(args)
        if args.command == "params":
            return cmd_params(rc)
        rc = _require_seed(rc)
        if args.command == "simulate":
            return cmd_simulate(rc)
        if args.command == "compare":
            return cmd_compare(rc)
        if args.command == "sweep":
            return cmd_sweep(rc)
        return cmd_validate(rc, args.paths)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, ValueError, ArithmeticError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
