"""End-to-end experiment pipeline and structured reports.

One experiment trains the three cross-fitted estimators, scans the
posterior-variance grid at the union-bound-corrected confidence level,
keeps each bound's minimizing variance, and packages everything into a
:class:`BoundReport`.  Sweeps, k-fold evaluation, and the statistical
coverage simulations build on the same pipeline.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .bounds import (
    irreducible_term_bound,
    main_bound,
    maurer_bound,
    maurer_informed_bound,
    empirical_bernstein_risk_bound,
)
from .datasets import Dataset, SyntheticSpec, gen_synthetic, split_half
from .esi import empirical_bernstein_mean_bound
from .learners import TrainOptions, train_logistic, zero_one_losses
from .posteriors import IsotropicGaussian, McConfig, posterior_loss_profile, sample_hypotheses
from .scalar import build_eta_grid, gaussian_kl

ALL_BOUNDS = ("main", "maurer", "maurer_informed", "emp_bernstein")

# Seed-stream purposes for the splittable derivation scheme.
PURPOSE_DATA = 0
PURPOSE_TEST = 1
PURPOSE_MC = 2


def derive_seed(master_seed: int, n: int, run: int, purpose: int) -> int:
    """Collision-free 64-bit seed for the (n, run, purpose) stream."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(int(n), int(run), int(purpose)))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    """Experiment-wide knobs; per-run quantities are derived from these."""

    delta: float = 0.05
    lam: float = 0.01
    prior_variance: float = 0.5
    mc_samples: int = 1000
    runs: int = 10
    master_seed: int = 20240
    bounds_enabled: tuple[str, ...] = ALL_BOUNDS
    prior_mode: str = "informed"

    def __post_init__(self) -> None:
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.mc_samples < 1 or self.runs < 1:
            raise ValueError("mc_samples and runs must be positive")
        if self.prior_mode not in ("informed", "uninformed"):
            raise ValueError("prior_mode must be 'informed' or 'uninformed'")
        if len(self.bounds_enabled) == 0:
            raise ValueError("at least one bound must be enabled")
        unknown = set(self.bounds_enabled) - set(ALL_BOUNDS)
        if unknown:
            raise ValueError(f"unknown bounds {sorted(unknown)}")
        object.__setattr__(self, "bounds_enabled", tuple(self.bounds_enabled))

    @staticmethod
    def sigma_grid(n: int) -> list[float]:
        """Posterior-variance candidates {1/2, ..., 1/2**J} with J = ceil(log2 n)."""
        j_max = max(1, math.ceil(math.log2(n)))
        return [0.5**j for j in range(1, j_max + 1)]


@dataclass
class BoundResult:
    """One bound's value at its minimizing posterior variance."""

    name: str
    value: float
    sigma2: float
    empirical_loss: float
    v_n: Optional[float] = None
    v_n_prime: Optional[float] = None
    g_n: Optional[float] = None
    g_n_prime: Optional[float] = None
    comp_n: Optional[float] = None
    eta_star: Optional[float] = None
    nu_star: Optional[float] = None


@dataclass
class BoundReport:
    """The unit of experiment output: config echo, seeds, and all bound values."""

    dataset: str
    n: int
    d: int
    run: int
    delta: float
    effective_delta: float
    sigma_grid_size: int
    prior_mode: str
    mc_samples: int
    lam: float
    prior_variance: float
    master_seed: int
    seeds: dict
    bounds: dict
    empirical_loss: float
    v_n: float
    v_n_prime: float
    test_error: Optional[float]
    wall_time: float
    notes: dict = field(default_factory=dict)


def _fit(features: np.ndarray, labels: np.ndarray, config: ExperimentConfig) -> np.ndarray:
    opts = TrainOptions(lam=config.lam, seed=config.master_seed)
    return train_logistic(features, labels, opts).weights


def _evaluate_bounds(
    train: Dataset, config: ExperimentConfig, mc_seed: int
) -> tuple[dict, dict]:
    """Scan the sigma^2 grid and keep each enabled bound's minimizing value.

    Returns (per-bound BoundResult dict, pipeline context dict).
    """
    first, second, m = split_half(train)
    n = 2 * m
    if n < 16:
        raise ValueError(f"need at least 16 training rows, got {train.n}")
    X = train.features[:n]
    y = train.labels[:n]
    used = Dataset(X, y, name=train.name)

    h_first = _fit(first.features, first.labels, config)
    h_second = _fit(second.features, second.labels, config)
    h_full = _fit(X, y, config)

    # Cross-fitted per-index reference losses: the opposite half's estimator.
    ref = np.concatenate(
        [
            zero_one_losses(h_second, first.features, first.labels),
            zero_one_losses(h_first, second.features, second.labels),
        ]
    )
    v_prime = float(np.mean(ref * ref))
    g_prime = float(np.var(ref[:m])) + float(np.var(ref[m:]))

    sigma_grid = ExperimentConfig.sigma_grid(n)
    effective_delta = config.delta / len(sigma_grid)
    eta_grid = build_eta_grid(n, effective_delta, b=1.0)
    mc = McConfig(sample_count=config.mc_samples, seed=mc_seed)
    zeros = np.zeros_like(h_full)

    best: dict[str, BoundResult] = {}

    def consider(name: str, value: float, **fields) -> None:
        if name not in best or value < best[name].value:
            best[name] = BoundResult(name=name, value=value, **fields)

    for sigma2 in sigma_grid:
        posterior = IsotropicGaussian(mean=h_full, variance=sigma2)
        loss_mc, v_mc, g_mc = posterior_loss_profile(posterior, used, m, ref, mc)
        kl_uninformed = gaussian_kl(h_full, sigma2, zeros, config.prior_variance)
        comp_inf = gaussian_kl(h_full, sigma2, h_first, sigma2) + gaussian_kl(
            h_full, sigma2, h_second, sigma2
        )
        comp = comp_inf if config.prior_mode == "informed" else 2.0 * kl_uninformed

        if "main" in config.bounds_enabled:
            parts = main_bound(loss_mc, v_mc, v_prime, comp, n, effective_delta, eta_grid, m=m)
            consider(
                "main",
                parts.total,
                sigma2=sigma2,
                empirical_loss=loss_mc,
                v_n=v_mc,
                v_n_prime=v_prime,
                comp_n=comp,
                eta_star=parts.eta_star,
                nu_star=parts.nu_star,
            )
        if "maurer" in config.bounds_enabled:
            value = maurer_bound(loss_mc, kl_uninformed, n, effective_delta)
            consider(
                "maurer",
                value,
                sigma2=sigma2,
                empirical_loss=loss_mc,
                comp_n=kl_uninformed,
            )
        if "maurer_informed" in config.bounds_enabled:
            value = maurer_informed_bound(loss_mc, comp, n, m, effective_delta)
            consider(
                "maurer_informed",
                value,
                sigma2=sigma2,
                empirical_loss=loss_mc,
                comp_n=comp,
            )
        if "emp_bernstein" in config.bounds_enabled:
            parts = empirical_bernstein_risk_bound(loss_mc, g_mc, g_prime, comp, n, m, effective_delta, eta_grid)
            consider(
                "emp_bernstein",
                parts.total,
                sigma2=sigma2,
                empirical_loss=loss_mc,
                g_n=g_mc,
                g_n_prime=g_prime,
                v_n_prime=v_prime,
                comp_n=comp,
                eta_star=parts.eta_star,
                nu_star=parts.nu_star,
            )

    context = {
        "n": n,
        "m": m,
        "d": train.d,
        "h_first": h_first,
        "h_second": h_second,
        "h_full": h_full,
        "ref": ref,
        "v_prime": v_prime,
        "g_prime": g_prime,
        "effective_delta": effective_delta,
        "sigma_grid": sigma_grid,
        "mc": mc,
    }
    return best, context


def run_experiment(
    train: Dataset,
    test: Optional[Dataset],
    config: ExperimentConfig,
    seeds: Optional[dict] = None,
    run_index: int = 0,
) -> BoundReport:
    """Run one full bound evaluation on a preprocessed training sample.

    The bounds see only ``train``; ``test`` is touched exactly once at the
    end to score the full-sample estimator.  Fully deterministic given the
    config's master seed (or an explicit ``seeds`` dict).
    """
    started = time.perf_counter()
    if seeds is None:
        seeds = {"mc": derive_seed(config.master_seed, train.n, run_index, PURPOSE_MC)}
    best, ctx = _evaluate_bounds(train, config, seeds["mc"])

    test_error = None
    if test is not None:
        test_error = float(np.mean(zero_one_losses(ctx["h_full"], test.features, test.labels)))

    headline = best.get("main") or next(iter(best.values()))
    return BoundReport(
        dataset=train.name,
        n=ctx["n"],
        d=ctx["d"],
        run=run_index,
        delta=config.delta,
        effective_delta=ctx["effective_delta"],
        sigma_grid_size=len(ctx["sigma_grid"]),
        prior_mode=config.prior_mode,
        mc_samples=config.mc_samples,
        lam=config.lam,
        prior_variance=config.prior_variance,
        master_seed=config.master_seed,
        seeds=dict(seeds),
        bounds={name: asdict(result) for name, result in best.items()},
        empirical_loss=headline.empirical_loss,
        v_n=headline.v_n if headline.v_n is not None else float("nan"),
        v_n_prime=ctx["v_prime"],
        test_error=test_error,
        wall_time=time.perf_counter() - started,
        notes={
            "beta_form": "m",
            "common_random_numbers": True,
            "scaling": "global",
            "mc_sample_default_is_config": True,
        },
    )


def run_sweep(
    template: SyntheticSpec,
    sample_sizes: Sequence[int],
    runs: int,
    config: ExperimentConfig,
    test_size: int = 10_000,
) -> list[BoundReport]:
    """Synthetic sweep over sample sizes with per-(n, run) derived seeds."""
    reports = []
    for n in sample_sizes:
        for run in range(runs):
            data_seed = derive_seed(config.master_seed, n, run, PURPOSE_DATA)
            test_seed = derive_seed(config.master_seed, n, run, PURPOSE_TEST)
            mc_seed = derive_seed(config.master_seed, n, run, PURPOSE_MC)
            train = gen_synthetic(replace(template, n=int(n), seed=data_seed))
            test = gen_synthetic(replace(template, n=int(test_size), seed=test_seed))
            report = run_experiment(
                train,
                test,
                config,
                seeds={"data": data_seed, "test": test_seed, "mc": mc_seed},
                run_index=run,
            )
            reports.append(report)
    return reports


def run_kfold(dataset: Dataset, config: ExperimentConfig) -> list[BoundReport]:
    """Evaluate on a fold-annotated dataset, using the k folds as the k runs."""
    if dataset.fold_assignments is None:
        raise ValueError("dataset needs fold assignments; call make_folds first")
    folds = np.unique(dataset.fold_assignments)
    reports = []
    for fold in folds.tolist():
        test_mask = dataset.fold_assignments == fold
        train = Dataset(
            dataset.features[~test_mask], dataset.labels[~test_mask], name=dataset.name
        )
        test = Dataset(
            dataset.features[test_mask], dataset.labels[test_mask], name=dataset.name
        )
        mc_seed = derive_seed(config.master_seed, train.n, int(fold), PURPOSE_MC)
        report = run_experiment(
            train, test, config, seeds={"mc": mc_seed}, run_index=int(fold)
        )
        report.notes["folds_as_runs"] = True
        reports.append(report)
    return reports


def sweep_summary(reports: Sequence[BoundReport]) -> dict:
    """Per-sample-size means and standard errors for every bound and statistic."""
    by_n: dict[int, list[BoundReport]] = {}
    for report in reports:
        by_n.setdefault(report.n, []).append(report)

    def mean_se(values: list[float]) -> tuple[float, float]:
        arr = np.asarray(values, dtype=np.float64)
        se = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
        return float(arr.mean()), se

    summary = {}
    for n, group in sorted(by_n.items()):
        names = sorted({name for rep in group for name in rep.bounds})
        entry = {
            "runs": len(group),
            "bounds": {
                name: mean_se([rep.bounds[name]["value"] for rep in group if name in rep.bounds])
                for name in names
            },
            "empirical_loss": mean_se([rep.empirical_loss for rep in group]),
            "v_n": mean_se([rep.v_n for rep in group]),
            "v_n_prime": mean_se([rep.v_n_prime for rep in group]),
        }
        tested = [rep.test_error for rep in group if rep.test_error is not None]
        entry["test_error"] = mean_se(tested) if tested else (float("nan"), 0.0)
        summary[n] = entry
    return summary


CSV_COLUMNS = (
    "name",
    "n",
    "d",
    "bound_value",
    "test_error",
    "L_n",
    "V_n",
    "V_n_prime",
    "comp_n",
    "sigma2",
    "eta_star",
    "nu_star",
    "effective_delta",
    "seed",
)


def emit_report(reports: Sequence[BoundReport], format: str, path) -> None:
    """Serialize reports to ``path``; JSON mirrors the full report structure.

    The CSV schema is fixed at one row per (report, bound) with the 14
    columns in :data:`CSV_COLUMNS`; ``name`` is ``dataset/bound`` and
    ``seed`` is the run's Monte Carlo seed.
    """
    if len(reports) == 0:
        raise ValueError("no reports to emit")
    if format == "json":
        payload = [asdict(report) for report in reports]
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
        return
    if format != "csv":
        raise ValueError(f"unknown format {format!r}")
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for report in reports:
            for name, result in report.bounds.items():
                writer.writerow(
                    [
                        f"{report.dataset}/{name}",
                        report.n,
                        report.d,
                        repr(result["value"]),
                        "" if report.test_error is None else repr(report.test_error),
                        repr(result["empirical_loss"]),
                        "" if result["v_n"] is None else repr(result["v_n"]),
                        "" if result["v_n_prime"] is None else repr(result["v_n_prime"]),
                        "" if result["comp_n"] is None else repr(result["comp_n"]),
                        repr(result["sigma2"]),
                        "" if result["eta_star"] is None else repr(result["eta_star"]),
                        "" if result["nu_star"] is None else repr(result["nu_star"]),
                        repr(report.effective_delta),
                        report.seeds.get("mc", report.master_seed),
                    ]
                )


def coverage_simulation(
    config: ExperimentConfig,
    runs: int = 200,
    n: int = 200,
    d: int = 3,
    keep_probs: Sequence[float] = (1.0, 0.95, 0.9, 0.8),
    holdout_size: int = 100_000,
) -> dict:
    """Check that computed bounds dominate holdout-estimated risks.

    For each run the posterior risk of every enabled bound (at its chosen
    posterior variance) is estimated on a fresh holdout sample and compared
    with the bound value; the irreducible-term diagnostic is checked the
    same way.  Returns per-bound coverage fractions.
    """
    covered = {name: 0 for name in config.bounds_enabled}
    irreducible_covered = 0
    for run in range(runs):
        keep = keep_probs[run % len(keep_probs)]
        data_seed = derive_seed(config.master_seed, n, run, PURPOSE_DATA)
        test_seed = derive_seed(config.master_seed, n, run, PURPOSE_TEST)
        mc_seed = derive_seed(config.master_seed, n, run, PURPOSE_MC)
        train = gen_synthetic(SyntheticSpec(d=d, n=n, keep_prob=keep, seed=data_seed))
        holdout = gen_synthetic(
            SyntheticSpec(d=d, n=holdout_size, keep_prob=keep, seed=test_seed)
        )
        best, ctx = _evaluate_bounds(train, config, mc_seed)

        holdout_labels = holdout.labels.astype(np.float64)
        risk_cache: dict[float, float] = {}
        for name, result in best.items():
            sigma2 = result.sigma2
            if sigma2 not in risk_cache:
                posterior = IsotropicGaussian(mean=ctx["h_full"], variance=sigma2)
                weights = sample_hypotheses(posterior, ctx["mc"])
                rates = _kernels.error_rates(weights, holdout.features, holdout_labels)
                risk_cache[sigma2] = float(np.mean(rates))
            if result.value >= risk_cache[sigma2]:
                covered[name] += 1

        risk_half1 = float(
            np.mean(zero_one_losses(ctx["h_first"], holdout.features, holdout.labels))
        )
        risk_half2 = float(
            np.mean(zero_one_losses(ctx["h_second"], holdout.features, holdout.labels))
        )
        lhs = math.sqrt(ctx["v_prime"] / ctx["n"])
        rhs = irreducible_term_bound(risk_half1, risk_half2, ctx["n"], config.delta)
        if lhs <= rhs:
            irreducible_covered += 1

    return {
        "runs": runs,
        "bound_coverage": {name: covered[name] / runs for name in covered},
        "irreducible_coverage": irreducible_covered / runs,
    }


def mean_bound_coverage(
    trials: int = 1000, n: int = 100, delta: float = 0.05, seed: int = 7
) -> float:
    """Fraction of Bernoulli trials whose true mean the deviation bound covers."""
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(trials):
        p = rng.uniform(0.05, 0.95)
        x = (rng.random(n) < p).astype(np.float64)
        bound = empirical_bernstein_mean_bound(x, delta)
        if float(x.mean()) + bound >= p:
            hits += 1
    return hits / trials
