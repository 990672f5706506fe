"""Randomized property suites over the exact ESI checks.

Each suite draws a seeded corpus of finite-support distributions and
verifies one inequality family on every instance by exact expectation.
The CLI's ``verify-esi`` subcommand prints one row per suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .esi import (
    DiscreteDistribution,
    check_esi_chain,
    check_grid_mixture,
    check_pac_bayes_esi,
    check_standard_bernstein,
    check_unexpected_bernstein,
    find_tightness_witness,
)
from .scalar import build_eta_grid, c_eta, s_eta

LOSS_BOUNDS = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    instances: int
    failures: int
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.failures == 0


def random_distribution(
    rng: np.random.Generator, low: float, high: float, max_atoms: int = 8
) -> DiscreteDistribution:
    """Random distribution with 2..max_atoms atoms on [low, high]."""
    k = int(rng.integers(2, max_atoms + 1))
    values = rng.uniform(low, high, size=k)
    masses = rng.dirichlet(np.ones(k))
    return DiscreteDistribution(list(zip(values, masses)))


def suite_unexpected_bernstein(count: int = 1000, seed: int = 101) -> SuiteResult:
    """Quadratic-penalty ESI at c = c_eta(eta, b) over a random corpus.

    Every grid rate must verify with MGF <= 1 + 1e-12.
    """
    rng = np.random.default_rng(seed)
    failures = 0
    checks = 0
    worst = -np.inf
    for i in range(count):
        b = LOSS_BOUNDS[i % len(LOSS_BOUNDS)]
        dist = random_distribution(rng, -5.0, b)
        grid = build_eta_grid(1000, 0.05, b)
        for eta in grid.points:
            result = check_unexpected_bernstein(dist, float(eta), c_eta(float(eta), b))
            checks += 1
            worst = max(worst, result.mgf_value)
            if not result.holds:
                failures += 1
    return SuiteResult(
        "unexpected-bernstein", checks, failures, f"max mgf {worst:.15f}"
    )


def suite_standard_bernstein(count: int = 200, seed: int = 202) -> SuiteResult:
    """Expected-second-moment ESI at s = s_eta(eta, |min atom|)."""
    rng = np.random.default_rng(seed)
    failures = 0
    checks = 0
    for i in range(count):
        b = LOSS_BOUNDS[i % len(LOSS_BOUNDS)]
        dist = random_distribution(rng, -5.0, b)
        b_low = abs(float(np.min(dist.values)))
        grid = build_eta_grid(1000, 0.05, b)
        for eta in grid.points:
            result = check_standard_bernstein(dist, float(eta), s_eta(float(eta), b_low))
            checks += 1
            if not result.holds:
                failures += 1
    return SuiteResult("standard-bernstein", checks, failures)


def suite_tightness() -> SuiteResult:
    """Witness search on a 5x3 (eta*b, b) grid at 90% of the critical penalty.

    At c = 0.9 * c_eta a violating two-point distribution must exist with
    MGF margin >= 1e-12; at the critical c itself no scanned distribution
    may violate.
    """
    failures = 0
    checks = 0
    worst_margin = np.inf
    for u in (0.1, 0.25, 0.5, 0.75, 0.9):
        for b in LOSS_BOUNDS:
            eta = u / b
            critical = c_eta(eta, b)
            checks += 1
            witness = find_tightness_witness(eta, b, 0.9 * critical)
            if witness is None:
                failures += 1
            else:
                margin = (
                    check_unexpected_bernstein(witness, eta, 0.9 * critical).mgf_value
                    - 1.0
                )
                worst_margin = min(worst_margin, margin)
                if margin < 1e-12:
                    failures += 1
            checks += 1
            if find_tightness_witness(eta, b, critical) is not None:
                failures += 1
    return SuiteResult(
        "tightness-witness", checks, failures, f"min violation {worst_margin:.3e}"
    )


def suite_chaining(count: int = 200, seed: int = 404) -> SuiteResult:
    """Summed ESI at the harmonic rate for random independent triples."""
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(count):
        dists = [random_distribution(rng, -2.0, 1.0, max_atoms=4) for _ in range(3)]
        gammas = rng.choice([0.5, 0.25, 0.125], size=3).tolist()
        c = c_eta(max(gammas), 1.0)
        result = check_esi_chain(dists, gammas, lambda x, m1, m2: m1 - x - c * x * x)
        if not result.holds:
            failures += 1
    return SuiteResult("esi-chaining", count, failures)


def suite_pac_bayes(count: int = 200, seed: int = 505) -> SuiteResult:
    """Posterior-averaged ESI under the KL budget for random prior/posterior pairs."""
    rng = np.random.default_rng(seed)
    eta = 0.25
    c = c_eta(eta, 1.0)
    failures = 0
    for _ in range(count):
        dists = [random_distribution(rng, -2.0, 1.0, max_atoms=4) for _ in range(3)]
        prior = rng.dirichlet(np.ones(3))
        posterior = rng.dirichlet(np.ones(3))
        result = check_pac_bayes_esi(
            dists, prior, posterior, eta, lambda x, m1, m2: m1 - x - c * x * x
        )
        if not result.holds:
            failures += 1
    return SuiteResult("pac-bayes", count, failures)


def suite_grid_mixture(count: int = 200, seed: int = 606) -> SuiteResult:
    """Prior-weighted mixture of verified per-rate MGFs stays below 1."""
    rng = np.random.default_rng(seed)
    failures = 0
    for i in range(count):
        b = LOSS_BOUNDS[i % len(LOSS_BOUNDS)]
        dist = random_distribution(rng, -5.0, b)
        grid = build_eta_grid(1000, 0.05, b)
        mgfs = [
            check_unexpected_bernstein(dist, float(eta), c_eta(float(eta), b)).mgf_value
            for eta in grid.points
        ]
        if not check_grid_mixture(grid, mgfs):
            failures += 1
    return SuiteResult("grid-mixture", count, failures)


def run_all_suites(scale: float = 1.0, seed: int = 0) -> list[SuiteResult]:
    """Run every suite; ``scale`` shrinks corpus sizes for quick smoke runs."""
    big = max(10, int(1000 * scale))
    small = max(5, int(200 * scale))
    return [
        suite_unexpected_bernstein(count=big, seed=seed + 101),
        suite_standard_bernstein(count=small, seed=seed + 202),
        suite_tightness(),
        suite_chaining(count=small, seed=seed + 404),
        suite_pac_bayes(count=small, seed=seed + 505),
        suite_grid_mixture(count=small, seed=seed + 606),
    ]
