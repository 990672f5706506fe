"""Regularized logistic regression and the 0-1 classification loss."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize


@dataclass(frozen=True)
class Hypothesis:
    """A linear classifier, identified with its weight vector."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or not np.all(np.isfinite(w)):
            raise ValueError("weights must be a finite 1-D vector")


@dataclass(frozen=True)
class TrainOptions:
    """Training knobs: L2 strength ``lam``, stopping rule, and seed echo."""

    lam: float = 0.01
    max_iters: int = 500
    grad_tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self) -> None:
        if self.grad_tolerance <= 0.0:
            raise ValueError("grad_tolerance must be positive")
        if self.lam < 0.0:
            raise ValueError("lam must be nonnegative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")


def sigmoid(w):
    """Numerically stable logistic function 1 / (1 + exp(-w))."""
    scalar = np.isscalar(w) or getattr(w, "ndim", 0) == 0
    arr = np.atleast_1d(np.asarray(w, dtype=np.float64))
    out = np.empty_like(arr)
    pos = arr >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    ew = np.exp(arr[~pos])
    out[~pos] = ew / (1.0 + ew)
    return float(out[0]) if scalar else out


def zero_one_loss(h, x, y) -> int:
    """0-1 loss |y - 1{w.x > 0}|; the decision boundary w.x = 0 predicts 0."""
    w = h.weights if isinstance(h, Hypothesis) else np.asarray(h, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if w.shape != x.shape:
        raise ValueError(f"dimension mismatch: {w.shape} vs {x.shape}")
    pred = 1 if float(np.dot(w, x)) > 0.0 else 0
    return abs(int(y) - pred)


def zero_one_losses(h, features: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Vector of 0-1 losses of one hypothesis over a dataset."""
    w = h.weights if isinstance(h, Hypothesis) else np.asarray(h, dtype=np.float64)
    preds = (features @ w) > 0.0
    return (preds != (np.asarray(labels) > 0.5)).astype(np.float64)


def logistic_objective(
    weights: np.ndarray, features: np.ndarray, labels: np.ndarray, lam: float
) -> tuple[float, np.ndarray]:
    """Value and gradient of lam*||w||^2/2 + mean cross-entropy.

    The cross-entropy term is evaluated as logaddexp(0, z) - y*z with
    z = X @ w, which is exact and overflow-free for any margin.
    """
    z = features @ weights
    y = np.asarray(labels, dtype=np.float64)
    n = y.size
    value = 0.5 * lam * float(np.dot(weights, weights)) + float(
        np.mean(np.logaddexp(0.0, z) - y * z)
    )
    grad = lam * weights + features.T @ (sigmoid(z) - y) / n
    return value, grad


def train_logistic(
    features: np.ndarray, labels: np.ndarray, opts: TrainOptions | None = None
) -> Hypothesis:
    """Fit L2-regularized logistic regression by quasi-Newton descent.

    Starts from the zero vector and runs BFGS until the gradient inf-norm
    drops below ``opts.grad_tolerance`` or ``opts.max_iters`` is hit, so the
    returned objective never exceeds the objective at zero.  Deterministic
    for fixed inputs.
    """
    opts = opts or TrainOptions()
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("features must be a nonempty 2-D matrix")
    if not np.all(np.isfinite(X)):
        raise ValueError("features contain non-finite values")
    if y.shape != (X.shape[0],) or not np.all(np.isin(y, (0.0, 1.0))):
        raise ValueError("labels must be a {0,1} vector matching the features")
    result = minimize(
        logistic_objective,
        np.zeros(X.shape[1]),
        args=(X, y, opts.lam),
        jac=True,
        method="BFGS",
        options={"gtol": opts.grad_tolerance, "maxiter": opts.max_iters},
    )
    return Hypothesis(weights=result.x)
