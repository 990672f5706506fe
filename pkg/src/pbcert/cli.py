"""Command-line interface.

Subcommands: ``synth`` (synthetic sweep), ``uci`` (k-fold CSV evaluation),
``verify-esi`` (inequality verification suites), ``mean-bound`` (confidence
bound for a CSV column of [0,1] values), and ``coverage`` (statistical
coverage simulation).  A JSON config file may predefine any common flag;
explicit flags win.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from .datasets import SyntheticSpec, load_csv, make_folds
from .esi import empirical_bernstein_mean_bound
from .experiments import (
    ALL_BOUNDS,
    ExperimentConfig,
    coverage_simulation,
    emit_report,
    mean_bound_coverage,
    run_kfold,
    run_sweep,
    sweep_summary,
)
from .verify import run_all_suites

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage failures exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON file of default option values")
    parser.add_argument("--delta", type=float, default=None, help="confidence level (default 0.05)")
    parser.add_argument("--lambda", dest="lam", type=float, default=None, help="L2 strength (default 0.01)")
    parser.add_argument("--prior-var", type=float, default=None, help="prior variance (default 0.5)")
    parser.add_argument("--mc-samples", type=int, default=None, help="Monte Carlo draws (default 1000)")
    parser.add_argument("--runs", type=int, default=None, help="independent runs (default 10)")
    parser.add_argument("--seed", type=int, default=None, help="master seed (default 20240)")
    parser.add_argument("--bounds", type=str, default=None, help=f"comma list from {','.join(ALL_BOUNDS)}")
    parser.add_argument("--prior-mode", choices=("informed", "uninformed"), default=None)
    parser.add_argument("--format", choices=("json", "csv"), default=None, help="report format (default csv)")
    parser.add_argument("--out", type=Path, default=None, help="report output path")


_CONFIG_KEYS = {
    "delta": "delta",
    "lambda": "lam",
    "lam": "lam",
    "prior_var": "prior_var",
    "mc_samples": "mc_samples",
    "runs": "runs",
    "seed": "seed",
    "bounds": "bounds",
    "prior_mode": "prior_mode",
    "format": "format",
    "out": "out",
}


def _build_config(args) -> ExperimentConfig:
    """Merge config-file values under explicit CLI flags."""
    values = {
        "delta": 0.05,
        "lam": 0.01,
        "prior_var": 0.5,
        "mc_samples": 1000,
        "runs": 10,
        "seed": 20240,
        "bounds": ",".join(ALL_BOUNDS),
        "prior_mode": "informed",
        "format": "csv",
        "out": None,
    }
    if args.config is not None:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read config file: {exc}")
        for key, value in loaded.items():
            if key not in _CONFIG_KEYS:
                raise DataError(f"unknown config key {key!r}")
            values[_CONFIG_KEYS[key]] = value
    for key in ("delta", "lam", "prior_var", "mc_samples", "runs", "seed",
                "bounds", "prior_mode", "format", "out"):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    bounds = values["bounds"]
    if isinstance(bounds, str):
        bounds = tuple(b.strip() for b in bounds.split(",") if b.strip())
    args.format = values["format"]
    args.out = Path(values["out"]) if values["out"] else None
    try:
        return ExperimentConfig(
            delta=float(values["delta"]),
            lam=float(values["lam"]),
            prior_variance=float(values["prior_var"]),
            mc_samples=int(values["mc_samples"]),
            runs=int(values["runs"]),
            master_seed=int(values["seed"]),
            bounds_enabled=tuple(bounds),
            prior_mode=str(values["prior_mode"]),
        )
    except ValueError as exc:
        raise DataError(str(exc))


class DataError(Exception):
    pass


def _emit(reports, args) -> None:
    if args.out is not None:
        emit_report(reports, args.format, args.out)
        print(f"wrote {len(reports)} reports to {args.out}")


def _print_summary(summary: dict) -> None:
    bound_names = sorted({name for entry in summary.values() for name in entry["bounds"]})
    header = ["n", "test_err", "L_n", "V_n", "V'_n"] + bound_names
    print("  ".join(f"{h:>15}" for h in header))
    for n, entry in summary.items():
        row = [
            f"{n:>15}",
            f"{entry['test_error'][0]:>15.4f}",
            f"{entry['empirical_loss'][0]:>15.4f}",
            f"{entry['v_n'][0]:>15.4f}",
            f"{entry['v_n_prime'][0]:>15.4f}",
        ]
        for name in bound_names:
            mean, se = entry["bounds"][name]
            row.append(f"{mean:>9.4f}±{se:<5.4f}")
        print("  ".join(row))


def _cmd_synth(args) -> int:
    config = _build_config(args)
    sizes = [int(s) for s in str(args.sizes).split(",") if s]
    template = SyntheticSpec(d=args.d, n=sizes[0], keep_prob=args.keep_prob, seed=0)
    reports = run_sweep(template, sizes, config.runs, config, test_size=args.test_n)
    summary = sweep_summary(reports)
    _print_summary(summary)
    _emit(reports, args)
    if any(not np.isfinite(rep.bounds[name]["value"]) for rep in reports for name in rep.bounds):
        print("non-finite bound values detected", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_uci(args) -> int:
    config = _build_config(args)
    categorical = "auto" if args.categorical == "auto" else [
        c.strip() for c in args.categorical.split(",") if c.strip()
    ]
    try:
        dataset = load_csv(args.csv, label_column=args.label_column, categorical_columns=categorical)
    except (OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    dataset = make_folds(dataset, k=args.folds, seed=config.master_seed)
    reports = run_kfold(dataset, config)
    summary = sweep_summary(reports)
    print(f"{dataset.name}: n={dataset.n} d={dataset.d} folds={args.folds}")
    _print_summary(summary)
    _emit(reports, args)
    return EXIT_OK


def _cmd_verify_esi(args) -> int:
    results = run_all_suites(scale=args.scale, seed=args.seed or 0)
    width = max(len(r.name) for r in results)
    all_ok = True
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(
            f"{result.name:<{width}}  {result.instances:>6} checks  "
            f"{result.failures:>3} failures  {status}  {result.detail}"
        )
        all_ok &= result.passed
    return EXIT_OK if all_ok else EXIT_NUMERIC


def _cmd_mean_bound(args) -> int:
    try:
        frame = pd.read_csv(args.csv)
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.column not in frame.columns:
        print(f"data error: no column {args.column!r} in {list(frame.columns)}", file=sys.stderr)
        return EXIT_DATA
    values = frame[args.column].to_numpy(dtype=np.float64)
    delta = args.delta if args.delta is not None else 0.05
    try:
        bound = empirical_bernstein_mean_bound(values, delta)
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    mean = float(values.mean())
    print(f"n = {values.size}")
    print(f"sample mean      = {mean:.6f}")
    print(f"deviation bound  = {bound:.6f}  (delta = {delta})")
    print(f"mean upper bound = {min(1.0, mean + bound):.6f}")
    return EXIT_OK


def _cmd_coverage(args) -> int:
    config = _build_config(args)
    result = coverage_simulation(
        config,
        runs=args.coverage_runs,
        n=args.n,
        d=args.d,
        holdout_size=args.holdout,
    )
    print(f"coverage over {result['runs']} runs (delta = {config.delta}):")
    ok = True
    for name, frac in result["bound_coverage"].items():
        print(f"  {name:<16} {frac:.3f}")
        ok &= frac >= 1.0 - config.delta
    print(f"  {'irreducible-term':<16} {result['irreducible_coverage']:.3f}")
    mean_cov = mean_bound_coverage(trials=args.trials, delta=config.delta,
                                   seed=config.master_seed)
    print(f"  {'mean-bound':<16} {mean_cov:.3f} ({args.trials} trials)")
    ok &= result["irreducible_coverage"] >= 1.0 - config.delta
    ok &= mean_cov >= 1.0 - config.delta
    return EXIT_OK if ok else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pbcert", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="sweep bounds on generated data")
    p_synth.add_argument("--d", type=int, default=10)
    p_synth.add_argument("--sizes", type=str, default="800,2000,8000")
    p_synth.add_argument("--keep-prob", type=float, default=0.9)
    p_synth.add_argument("--test-n", type=int, default=10_000)
    _add_common(p_synth)
    p_synth.set_defaults(func=_cmd_synth)

    p_uci = sub.add_parser("uci", help="5-fold evaluation of a CSV dataset")
    p_uci.add_argument("csv", type=Path)
    p_uci.add_argument("--label-column", required=True)
    p_uci.add_argument("--categorical", type=str, default="auto",
                       help="'auto' or comma list of categorical columns")
    p_uci.add_argument("--folds", type=int, default=5)
    _add_common(p_uci)
    p_uci.set_defaults(func=_cmd_uci)

    p_verify = sub.add_parser("verify-esi", help="run the inequality verification suites")
    p_verify.add_argument("--scale", type=float, default=1.0,
                          help="corpus size multiplier (use <1 for a smoke run)")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.set_defaults(func=_cmd_verify_esi)

    p_mean = sub.add_parser("mean-bound", help="confidence bound for a CSV column in [0,1]")
    p_mean.add_argument("csv", type=Path)
    p_mean.add_argument("--column", required=True)
    p_mean.add_argument("--delta", type=float, default=None)
    p_mean.set_defaults(func=_cmd_mean_bound)

    p_cov = sub.add_parser("coverage", help="statistical coverage simulation")
    p_cov.add_argument("--coverage-runs", type=int, default=200)
    p_cov.add_argument("--n", type=int, default=200)
    p_cov.add_argument("--d", type=int, default=3)
    p_cov.add_argument("--holdout", type=int, default=100_000)
    p_cov.add_argument("--trials", type=int, default=1000)
    _add_common(p_cov)
    p_cov.set_defaults(func=_cmd_coverage)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FloatingPointError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
