"""Exact verification of exponential stochastic inequalities (ESIs).

An ESI ``X <=_eta Y`` asserts E[exp(eta*(X - Y))] <= 1.  On finite-support
distributions the moment generating function is an exact finite sum, so
every check in this module is deterministic and tolerance-free up to
floating point: no Monte Carlo anywhere.

Includes the tightness-witness search for the quadratic-penalty moment
inequality (two-point distributions with almost all mass at zero) and the
empirical-variance confidence bound for means of [0, 1] samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from .scalar import EtaGrid, build_mean_grid, theta

# Absolute tolerance on the MGF for an ESI verdict.
ESI_TOL = 1e-12

# Exponents beyond this are evaluated in log space to dodge overflow.
_EXP_GUARD = 700.0

# Chained / PAC-Bayes checks enumerate the full product support; reject
# anything larger than this rather than approximating.
PRODUCT_SUPPORT_CAP = 1_000_000

Transform = Callable[[float, float, float], float]


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite-support real distribution given as ``((value, mass), ...)``."""

    atoms: tuple[tuple[float, float], ...]

    def __init__(self, atoms: Sequence[tuple[float, float]]) -> None:
        object.__setattr__(self, "atoms", tuple((float(v), float(w)) for v, w in atoms))
        if len(self.atoms) == 0:
            raise ValueError("distribution needs at least one atom")
        values = self.values
        masses = self.masses
        if not np.all(np.isfinite(values)):
            raise ValueError("atom values must be finite")
        if np.any(masses < 0.0) or abs(float(masses.sum()) - 1.0) > ESI_TOL:
            raise ValueError("masses must be nonnegative and sum to 1")

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.atoms])

    @property
    def masses(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])

    @property
    def mean(self) -> float:
        return float(np.dot(self.values, self.masses))

    @property
    def second_moment(self) -> float:
        return float(np.dot(self.values**2, self.masses))


@dataclass(frozen=True)
class EsiCheckResult:
    """Outcome of one exact MGF evaluation: E[exp(...)] and the <= 1 verdict."""

    mgf_value: float
    holds: bool
    margin: float


def _result_from_mgf(mgf: float) -> EsiCheckResult:
    return EsiCheckResult(mgf_value=mgf, holds=mgf <= 1.0 + ESI_TOL, margin=1.0 - mgf)


def _exact_mgf(exponents: np.ndarray, masses: np.ndarray) -> float:
    """Exact E[exp(exponent)] over atoms, in log space when exponents are huge."""
    exponents = np.asarray(exponents, dtype=np.float64)
    masses = np.asarray(masses, dtype=np.float64)
    if float(np.max(exponents)) > _EXP_GUARD:
        keep = masses > 0.0
        log_mgf = logsumexp(exponents[keep] + np.log(masses[keep]))
        with np.errstate(over="ignore"):
            return float(np.exp(log_mgf))
    return float(np.dot(masses, np.exp(exponents)))


def esi_mgf(dist: DiscreteDistribution, eta: float, transform: Transform) -> EsiCheckResult:
    """Exactly evaluate E[exp(eta * transform(x, E[X], E[X^2]))] over the atoms.

    ``transform`` receives each atom value together with the distribution's
    exact first and second moments.
    """
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    m1 = dist.mean
    m2 = dist.second_moment
    values = dist.values
    exponents = eta * np.array([transform(v, m1, m2) for v in values])
    return _result_from_mgf(_exact_mgf(exponents, dist.masses))


def check_unexpected_bernstein(
    dist: DiscreteDistribution, eta: float, c: float
) -> EsiCheckResult:
    """Exact check of E[exp(eta*(E[X] - X - c*X^2))] <= 1.

    The quadratic penalty sits on the realized value, not its expectation.
    Requires eta * max(X) < 1 whenever the support reaches above zero.
    """
    if c < 0.0:
        raise ValueError("c must be nonnegative")
    max_value = float(np.max(dist.values))
    if max_value > 0.0 and eta * max_value >= 1.0:
        raise ValueError(f"eta * max atom value must be < 1, got {eta * max_value}")
    return esi_mgf(dist, eta, lambda x, m1, m2: m1 - x - c * x * x)


def check_standard_bernstein(
    dist: DiscreteDistribution, eta: float, s: float
) -> EsiCheckResult:
    """Exact check of E[exp(eta*(E[X] - X - s*E[X^2]))] <= 1 (penalty in expectation)."""
    if s < 0.0:
        raise ValueError("s must be nonnegative")
    return esi_mgf(dist, eta, lambda x, m1, m2: m1 - x - s * m2)


def find_tightness_witness(
    eta: float, b: float, c: float
) -> Optional[DiscreteDistribution]:
    """Search for a two-point distribution violating the quadratic-penalty ESI.

    Scans supports {0, b} with mass p = 1 - 10**-k on the zero atom,
    k = 1..12 (the violating region sits at p slightly below 1, with a
    vanishing sliver of mass on b).  Returns the first distribution whose
    exact MGF exceeds 1 + 1e-15, or None when the penalty c is large enough
    that no scanned distribution violates.
    """
    if not 0.0 < eta * b < 1.0:
        raise ValueError("need 0 < eta * b < 1")
    if c < 0.0:
        raise ValueError("c must be nonnegative")
    for k in range(1, 13):
        sliver = 10.0**-k
        dist = DiscreteDistribution([(0.0, 1.0 - sliver), (float(b), sliver)])
        result = check_unexpected_bernstein(dist, eta, c)
        if result.mgf_value > 1.0 + 1e-15:
            return dist
    return None


def _product_support(
    value_arrays: Sequence[np.ndarray], mass_arrays: Sequence[np.ndarray]
) -> tuple[np.ndarray, np.ndarray]:
    """Enumerate sums of values and products of masses over the product support."""
    size = 1
    for vals in value_arrays:
        size *= len(vals)
        if size > PRODUCT_SUPPORT_CAP:
            raise ValueError(
                f"product support exceeds cap of {PRODUCT_SUPPORT_CAP} atoms"
            )
    totals = np.zeros(1)
    weights = np.ones(1)
    for vals, masses in zip(value_arrays, mass_arrays):
        totals = (totals[:, None] + vals[None, :]).ravel()
        weights = (weights[:, None] * masses[None, :]).ravel()
    return totals, weights


def check_esi_chain(
    dists: Sequence[DiscreteDistribution],
    gammas: Sequence[float],
    transform: Transform,
) -> EsiCheckResult:
    """Verify the summed ESI over independent components at the harmonic rate.

    Each component must individually satisfy its ESI at gamma_i (checked
    first); the sum is then verified at nu = 1 / sum(1/gamma_i) by exact
    expectation over the product support.
    """
    if len(dists) != len(gammas):
        raise ValueError("need one gamma per distribution")
    if len(dists) == 0:
        raise ValueError("need at least one distribution")
    for i, (dist, gamma) in enumerate(zip(dists, gammas)):
        if gamma <= 0.0:
            raise ValueError("gammas must be positive")
        individual = esi_mgf(dist, gamma, transform)
        if not individual.holds:
            raise ValueError(
                f"component {i} fails its individual ESI (mgf={individual.mgf_value})"
            )
    nu = 1.0 / sum(1.0 / g for g in gammas)
    value_arrays = []
    mass_arrays = []
    for dist in dists:
        m1, m2 = dist.mean, dist.second_moment
        value_arrays.append(np.array([transform(v, m1, m2) for v in dist.values]))
        mass_arrays.append(dist.masses)
    totals, weights = _product_support(value_arrays, mass_arrays)
    return _result_from_mgf(_exact_mgf(nu * totals, weights))


def check_pac_bayes_esi(
    hypothesis_dists: Sequence[DiscreteDistribution],
    prior: Sequence[float],
    posterior: Sequence[float],
    eta: float,
    transform: Transform,
) -> EsiCheckResult:
    """Verify the posterior-averaged ESI against the KL(posterior || prior) budget.

    Each hypothesis carries its own finite-support distribution of the
    transformed variable; all must pass the individual ESI at ``eta``.  The
    check then exactly evaluates, over the product support,
    E[exp(eta * E_{h~posterior}[Y_h] - KL(posterior || prior))] <= 1
    for a fixed (data-independent) posterior.  Infinite KL (posterior mass
    outside the prior support) yields a vacuous pass with MGF 0.
    """
    prior = np.asarray(prior, dtype=np.float64)
    posterior = np.asarray(posterior, dtype=np.float64)
    if len(hypothesis_dists) != prior.size or prior.shape != posterior.shape:
        raise ValueError("prior/posterior must match the hypothesis list in length")
    for vec, name in ((prior, "prior"), (posterior, "posterior")):
        if np.any(vec < 0.0) or abs(float(vec.sum()) - 1.0) > ESI_TOL:
            raise ValueError(f"{name} must be a probability vector")
    for i, dist in enumerate(hypothesis_dists):
        individual = esi_mgf(dist, eta, transform)
        if not individual.holds:
            raise ValueError(
                f"hypothesis {i} fails its individual ESI (mgf={individual.mgf_value})"
            )
    if np.any((posterior > 0.0) & (prior == 0.0)):
        return EsiCheckResult(mgf_value=0.0, holds=True, margin=1.0)
    active = posterior > 0.0
    kl = float(np.sum(posterior[active] * np.log(posterior[active] / prior[active])))
    value_arrays = []
    mass_arrays = []
    for weight, dist in zip(posterior, hypothesis_dists):
        if weight == 0.0:
            continue
        m1, m2 = dist.mean, dist.second_moment
        value_arrays.append(
            weight * np.array([transform(v, m1, m2) for v in dist.values])
        )
        mass_arrays.append(dist.masses)
    totals, weights = _product_support(value_arrays, mass_arrays)
    return _result_from_mgf(_exact_mgf(eta * totals - kl, weights))


def check_grid_mixture(etas: EtaGrid, per_eta_mgfs: Sequence[float]) -> bool:
    """Check the prior-weighted MGF mixture sum(pi(eta) * mgf(eta)) <= 1.

    This is the step that licenses tuning the rate over the grid after
    seeing the data.
    """
    mgfs = np.asarray(per_eta_mgfs, dtype=np.float64)
    if mgfs.shape != etas.prior_weights.shape:
        raise ValueError("need one MGF value per grid point")
    return float(np.dot(etas.prior_weights, mgfs)) <= 1.0 + ESI_TOL


def empirical_bernstein_mean_bound(samples, delta: float) -> float:
    """Deviation bound for the mean of n samples in [0, 1] at confidence 1-delta.

    With G the geometric rate grid for n and delta, l = ln(2|G|/delta) and
    biased sample variance v, the bound is

        max(3*sqrt(v*l/(2n)) + 11*l/(10n), 11*l/(4n)) + theta(1/2)/2 * ln(2/delta)/(2n).
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty sample")
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("samples must lie in [0, 1]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    n = x.size
    grid = build_mean_grid(n, delta)
    log_term = math.log(2.0 * len(grid) / delta)
    var_n = float(np.var(x))
    arm_small = 3.0 * math.sqrt(var_n * log_term / (2.0 * n)) + 11.0 * log_term / (10.0 * n)
    arm_large = 11.0 * log_term / (4.0 * n)
    anchor = theta(0.5) / 2.0 * math.log(2.0 / delta) / (2.0 * n)
    return max(arm_small, arm_large) + anchor
