"""Bound computations: grid-tuned second-order bound, kl-style bounds with
informed priors, the empirical-variance variant, the generic informed-prior
combinator, and the irreducible-term diagnostic."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

from .posteriors import IsotropicGaussian
from .scalar import EtaGrid, c_eta, gaussian_kl, invert_kl_upper, empirical_bernstein_constants


@dataclass(frozen=True)
class BoundComponents:
    """Every ingredient of one grid-tuned bound evaluation."""

    empirical_loss: float
    v_n: float
    v_n_prime: float
    comp_n: float
    eta_star: float
    nu_star: float
    delta: float
    n: int
    m: int
    b: float
    total: float


@dataclass(frozen=True)
class EmpiricalBernsteinComponents:
    """Ingredients of one empirical-variance bound evaluation."""

    g_n: float
    g_n_prime: float
    comp_n: float
    eta_star: float
    nu_star: float
    delta: float
    n: int
    m: int
    total: float


@dataclass(frozen=True)
class SliceEval:
    """Per-half inputs for the informed-prior combinator."""

    count: int
    empirical_loss: float
    complexity: float
    epsilon: float


SliceEvaluator = Callable[[Literal["first", "second"], float], SliceEval]


def comp_informed(
    posterior: IsotropicGaussian,
    prior_first_half: IsotropicGaussian,
    prior_second_half: IsotropicGaussian,
) -> float:
    """Complexity KL(posterior || prior_1) + KL(posterior || prior_2).

    Passing the data-free prior for both halves gives the uninformed mode,
    where this reduces to twice the single KL.
    """
    return gaussian_kl(
        posterior.mean, posterior.variance, prior_first_half.mean, prior_first_half.variance
    ) + gaussian_kl(
        posterior.mean, posterior.variance, prior_second_half.mean, prior_second_half.variance
    )


def _grid_infimum(grid: EtaGrid, term) -> tuple[float, float]:
    """Minimize ``term(point, weight)`` over the grid; ties keep the larger rate.

    Grid points are stored in decreasing order, so a strict-improvement scan
    resolves ties toward the larger rate.
    """
    best_value = math.inf
    best_point = float(grid.points[0])
    for point, weight in zip(grid.points, grid.prior_weights):
        value = term(float(point), float(weight))
        if value < best_value:
            best_value = value
            best_point = float(point)
    return best_value, best_point


def main_bound(
    L_n: float,
    v_n: float,
    v_n_prime: float,
    comp_n: float,
    n: int,
    delta: float,
    grid: EtaGrid,
    m: int | None = None,
) -> BoundComponents:
    """Grid-tuned second-order bound on the posterior risk.

    total = L_n + inf_eta { c_eta * v_n + (comp_n + 2 ln(1/(delta pi(eta)))) / (eta n) }
                + inf_nu  { c_nu * v_n_prime + ln(1/(delta pi(nu))) / (nu n) }

    Both infima are exhaustive scans over the grid.
    """
    if len(grid) == 0:
        raise ValueError("grid must be nonempty")
    if min(L_n, v_n, v_n_prime, comp_n) < 0.0:
        raise ValueError("inputs must be nonnegative")
    b = grid.loss_bound

    def eta_term(eta: float, weight: float) -> float:
        return c_eta(eta, b) * v_n + (comp_n + 2.0 * math.log(1.0 / (delta * weight))) / (
            eta * n
        )

    def nu_term(nu: float, weight: float) -> float:
        return c_eta(nu, b) * v_n_prime + math.log(1.0 / (delta * weight)) / (nu * n)

    eta_value, eta_star = _grid_infimum(grid, eta_term)
    nu_value, nu_star = _grid_infimum(grid, nu_term)
    return BoundComponents(
        empirical_loss=float(L_n),
        v_n=float(v_n),
        v_n_prime=float(v_n_prime),
        comp_n=float(comp_n),
        eta_star=eta_star,
        nu_star=nu_star,
        delta=float(delta),
        n=int(n),
        m=int(m) if m is not None else int(n) // 2,
        b=float(b),
        total=float(L_n) + eta_value + nu_value,
    )


def maurer_bound(L_n: float, kl_complexity: float, n: int, delta: float) -> float:
    """kl-style risk bound: invert the binary KL at budget (KL + ln(2 sqrt(n)/delta))/n.

    Requires n >= 8.
    """
    if n < 8:
        raise ValueError("the kl bound requires n >= 8")
    if kl_complexity < 0.0:
        raise ValueError("kl_complexity must be nonnegative")
    budget = (kl_complexity + math.log(2.0 * math.sqrt(n) / delta)) / n
    return invert_kl_upper(L_n, budget)


def maurer_informed_bound(
    L_n: float, comp_n: float, n: int, m: int, delta: float
) -> float:
    """Informed-prior kl bound with budget (comp_n + ln(4 sqrt(m(n-m))/delta))/n."""
    if not 1 <= m <= n - 1:
        raise ValueError("m must satisfy 1 <= m <= n-1")
    if comp_n < 0.0:
        raise ValueError("comp_n must be nonnegative")
    budget = (comp_n + math.log(4.0 * math.sqrt(m * (n - m)) / delta)) / n
    return invert_kl_upper(L_n, budget)


def informed_combine(
    bound_eval_on_slice: SliceEvaluator,
    P_script: float,
    A_script: float,
    n: int,
    m: int,
    delta: float,
) -> float:
    """Merge two half-sample bounds of the generic sqrt/linear shape.

    Evaluates the slice bound on each half at confidence delta/2 with the
    swapped informed priors, weights the halves by m/n and (n-m)/n, and
    merges the square roots via sqrt(x) + sqrt(y) <= sqrt(2(x+y)), giving

        P * sqrt(2 L_n (comp + eps_bar) / n) + A * (comp + eps_bar) / n

    with comp the sum of the two half complexities and
    eps_bar = eps_1 + eps_2 the per-half epsilon terms at delta/2.
    Returns the bound on the risk gap (not including L_n itself).
    """
    if not 1 <= m <= n - 1:
        raise ValueError("m must satisfy 1 <= m <= n-1")
    first = bound_eval_on_slice("first", delta / 2.0)
    second = bound_eval_on_slice("second", delta / 2.0)
    if first.count != m or second.count != n - m:
        raise ValueError("slice sizes must be m and n - m")
    p = m / n
    q = (n - m) / n
    pooled_loss = p * first.empirical_loss + q * second.empirical_loss
    budget = first.complexity + second.complexity + first.epsilon + second.epsilon
    return P_script * math.sqrt(2.0 * pooled_loss * budget / n) + A_script * budget / n


def empirical_bernstein_risk_bound(
    L_n: float,
    g_n: float,
    g_n_prime: float,
    comp_n: float,
    n: int,
    m: int,
    delta: float,
    grid: EtaGrid,
) -> EmpiricalBernsteinComponents:
    """Grid-tuned empirical-variance bound on the posterior risk.

    total = L_n + inf_eta { c~_eta * g_n + (comp_n + 2 ln(1/(delta pi(eta)))) / (lambda(eta) n) }
                + inf_nu  { c~_nu * g_n_prime + ln(1/(delta pi(nu))) / (lambda(nu) n) }

    ``g_n`` and ``g_n_prime`` are sums of the two per-half biased empirical
    variances (not divided by n).
    """
    if n % 2 != 0 or m != n // 2 or m <= 1:
        raise ValueError("requires even n with m = n/2 > 1")
    if min(L_n, g_n, g_n_prime, comp_n) < 0.0:
        raise ValueError("inputs must be nonnegative")
    b = grid.loss_bound

    def eta_term(eta: float, weight: float) -> float:
        consts = empirical_bernstein_constants(eta, b, m)
        return consts.tilde_c * g_n + (
            comp_n + 2.0 * math.log(1.0 / (delta * weight))
        ) / (consts.lambda_eta * n)

    def nu_term(nu: float, weight: float) -> float:
        consts = empirical_bernstein_constants(nu, b, m)
        return consts.tilde_c * g_n_prime + math.log(1.0 / (delta * weight)) / (
            consts.lambda_eta * n
        )

    eta_value, eta_star = _grid_infimum(grid, eta_term)
    nu_value, nu_star = _grid_infimum(grid, nu_term)
    return EmpiricalBernsteinComponents(
        g_n=float(g_n),
        g_n_prime=float(g_n_prime),
        comp_n=float(comp_n),
        eta_star=eta_star,
        nu_star=nu_star,
        delta=float(delta),
        n=int(n),
        m=int(m),
        total=float(L_n) + eta_value + nu_value,
    )


def irreducible_term_bound(
    risk_first_half_estimator: float,
    risk_second_half_estimator: float,
    n: int,
    delta: float,
) -> float:
    """Diagnostic upper bound on sqrt(V'_n / n) for losses bounded by 1.

    rhs = sqrt(2 (risk_1 + risk_2) / n) + 4 sqrt(ln(4/delta)) / n for even n.
    """
    if n % 2 != 0:
        raise ValueError("n must be even")
    r1, r2 = float(risk_first_half_estimator), float(risk_second_half_estimator)
    if min(r1, r2) < 0.0:
        raise ValueError("risks must be nonnegative")
    return math.sqrt(2.0 * (r1 + r2) / n) + 4.0 * math.sqrt(math.log(4.0 / delta)) / n
