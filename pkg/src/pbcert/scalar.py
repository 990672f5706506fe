"""Closed-form scalar machinery shared by every bound.

Moment-coefficient functions, the binary KL divergence and its numeric
inversion, isotropic-Gaussian KL, and the geometric rate grids used to tune
the bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Below this argument magnitude the closed forms for ``theta`` and ``kappa``
# lose all significant digits to cancellation; switch to 4-term Taylor series.
_SERIES_CUTOFF = 1e-4

_WEIGHT_SUM_TOL = 1e-12


def theta(u: float) -> float:
    """Evaluate (-ln(1-u) - u) / u**2 on [0, 1).

    Monotone increasing, with limit 1/2 at u = 0 (handled by a Taylor
    series to avoid cancellation for small u).
    """
    u = float(u)
    if u < 0.0 or u >= 1.0:
        raise ValueError(f"theta requires 0 <= u < 1, got {u}")
    if u < _SERIES_CUTOFF:
        return 0.5 + u / 3.0 + u * u / 4.0 + u**3 / 5.0
    return (-math.log1p(-u) - u) / (u * u)


def kappa(x: float) -> float:
    """Evaluate (e**x - x - 1) / x**2, nondecreasing over the reals.

    The limit at x = 0 is 1/2 (Taylor series below the cancellation
    cutoff).  Large positive x overflows to ``inf`` rather than raising.
    """
    x = float(x)
    if abs(x) < _SERIES_CUTOFF:
        return 0.5 + x / 6.0 + x * x / 24.0 + x**3 / 120.0
    return (math.expm1(x) - x) / (x * x)


def c_eta(eta: float, b: float) -> float:
    """Quadratic-penalty coefficient eta * theta(eta * b).

    Valid for 0 < eta < 1/b; satisfies c_eta <= eta/2 + 11*b*eta**2/20
    whenever eta <= 1/(2b).
    """
    eta, b = float(eta), float(b)
    if eta <= 0.0 or b <= 0.0:
        raise ValueError("eta and b must be positive")
    if eta * b >= 1.0:
        raise ValueError(f"eta*b must be < 1, got {eta * b}")
    return eta * theta(eta * b)


def s_eta(eta: float, b: float) -> float:
    """Second-moment coefficient eta * kappa(eta * b), for eta > 0."""
    eta, b = float(eta), float(b)
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    return eta * kappa(eta * b)


def binary_kl(q: float, p: float) -> float:
    """KL divergence between Bernoulli(q) and Bernoulli(p).

    Uses the convention 0*ln(0) = 0 and returns ``inf`` when p lies on the
    boundary {0, 1} while q disagrees with it.
    """
    q, p = float(q), float(p)
    if not (0.0 <= q <= 1.0 and 0.0 <= p <= 1.0):
        raise ValueError(f"arguments must be probabilities, got q={q}, p={p}")
    if q == 0.0:
        first = 0.0
    elif p == 0.0:
        return math.inf
    else:
        first = q * math.log(q / p)
    if q == 1.0:
        second = 0.0
    elif p == 1.0:
        return math.inf
    else:
        second = (1.0 - q) * math.log((1.0 - q) / (1.0 - p))
    return first + second


def invert_kl_upper(q_hat: float, budget: float, max_iters: int = 200) -> float:
    """Largest p in [q_hat, 1] with binary_kl(q_hat, p) <= budget.

    Bisection on p; binary_kl(q_hat, .) is increasing on [q_hat, 1], so the
    returned lower bracket always satisfies the budget.  The bracket is
    shrunk until it stops making floating-point progress (well below the
    1e-10 contract), so the round-trip binary_kl(q_hat, result) recovers
    the budget to ~1e-9 for moderate budgets.
    """
    q_hat, budget = float(q_hat), float(budget)
    if budget < 0.0:
        raise ValueError("budget must be nonnegative")
    if q_hat >= 1.0:
        return 1.0
    if budget == 0.0:
        return q_hat
    if math.isinf(budget):
        return 1.0
    lo, hi = q_hat, 1.0
    for _ in range(max_iters):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if binary_kl(q_hat, mid) <= budget:
            lo = mid
        else:
            hi = mid
    return lo


def relaxed_kl_upper(q_hat: float, budget: float) -> float:
    """Closed-form relaxation q_hat + sqrt(2*q_hat*budget) + 2*budget.

    Always dominates :func:`invert_kl_upper` and may exceed 1; callers clamp
    for display.
    """
    q_hat, budget = float(q_hat), float(budget)
    if budget < 0.0:
        raise ValueError("budget must be nonnegative")
    return q_hat + math.sqrt(2.0 * q_hat * budget) + 2.0 * budget


@dataclass(frozen=True)
class EtaGrid:
    """Finite geometric grid of candidate rates with prior weights.

    ``points`` is strictly decreasing with every element in ]0, 1/loss_bound[,
    and ``prior_weights`` is a probability vector of the same length.
    """

    points: np.ndarray
    prior_weights: np.ndarray
    loss_bound: float

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        wts = np.asarray(self.prior_weights, dtype=np.float64)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "prior_weights", wts)
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("grid must contain at least one point")
        if wts.shape != pts.shape:
            raise ValueError("weights must match points in length")
        if self.loss_bound <= 0.0:
            raise ValueError("loss_bound must be positive")
        if np.any(pts <= 0.0) or np.any(pts >= 1.0 / self.loss_bound):
            raise ValueError("grid points must lie in ]0, 1/loss_bound[")
        if np.any(np.diff(pts) >= 0.0):
            raise ValueError("grid points must be strictly decreasing")
        if np.any(wts < 0.0) or abs(float(wts.sum()) - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError("prior weights must be a probability vector")

    def __len__(self) -> int:
        return int(self.points.size)


def build_eta_grid(n: int, delta: float, b: float) -> EtaGrid:
    """Geometric rate grid {1/(2b), ..., 1/(2**K b)} with uniform weights.

    K = ceil(log2(sqrt(n / ln(1/delta)) / 2)), clamped to at least 1 so that
    tiny samples still produce a usable grid.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if b <= 0.0:
        raise ValueError("b must be positive")
    k = math.ceil(math.log2(0.5 * math.sqrt(n / math.log(1.0 / delta))))
    k = max(k, 1)
    points = np.array([1.0 / (2.0**j * b) for j in range(1, k + 1)])
    weights = np.full(k, 1.0 / k)
    return EtaGrid(points=points, prior_weights=weights, loss_bound=float(b))


def build_mean_grid(n: int, delta: float) -> EtaGrid:
    """Rate grid {1/2, ..., 1/2**K} for the mean confidence bound.

    K = ceil(log2(sqrt(n / (2 ln(2/delta))))), clamped to at least 1.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    k = math.ceil(math.log2(math.sqrt(n / (2.0 * math.log(2.0 / delta)))))
    k = max(k, 1)
    points = np.array([0.5**j for j in range(1, k + 1)])
    weights = np.full(k, 1.0 / k)
    return EtaGrid(points=points, prior_weights=weights, loss_bound=1.0)


def gaussian_kl(mean1, var1: float, mean2, var2: float) -> float:
    """KL divergence between isotropic Gaussians N(mean1, var1*I), N(mean2, var2*I)."""
    m1 = np.asarray(mean1, dtype=np.float64)
    m2 = np.asarray(mean2, dtype=np.float64)
    if m1.shape != m2.shape:
        raise ValueError(f"dimension mismatch: {m1.shape} vs {m2.shape}")
    if var1 <= 0.0 or var2 <= 0.0:
        raise ValueError("variances must be positive")
    d = m1.size
    ratio = var1 / var2
    sq = float(np.dot(m1 - m2, m1 - m2))
    return 0.5 * d * (ratio - 1.0 + math.log(1.0 / ratio)) + sq / (2.0 * var2)


@dataclass(frozen=True)
class EmpiricalBernsteinConstants:
    """Rate constants for the empirical-variance bound at half-sample size m."""

    m: int
    eta: float
    tilde_c: float
    beta_eta: float
    lambda_eta: float


def empirical_bernstein_constants(eta: float, b: float, m: int) -> EmpiricalBernsteinConstants:
    """Constants c~, beta, lambda for the empirical-variance bound.

    Uses beta(eta) = eta + eta**2 * m / (2m - 2), the form under which the
    chaining argument goes through (the alternative m**2 variant is not
    used; the choice is echoed in report metadata).
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    eta, b = float(eta), float(b)
    if eta <= 0.0 or eta * b >= 1.0:
        raise ValueError("eta must lie in ]0, 1/b[")
    denom = 2.0 * m - 2.0
    s = s_eta(eta, b)
    tilde_c = s * m / denom / (1.0 + eta * m / denom)
    beta = eta + eta * eta * m / denom
    lam = eta * beta / (eta + beta)
    return EmpiricalBernsteinConstants(m=int(m), eta=eta, tilde_c=tilde_c, beta_eta=beta, lambda_eta=lam)
