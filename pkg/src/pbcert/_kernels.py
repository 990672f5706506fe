"""Hot numeric kernels for Monte Carlo loss evaluation.

The per-hypothesis 0-1 loss sweep (M posterior samples x n data points)
dominates experiment runtime, so it is JIT-compiled with numba when
available.  Set ``PBCERT_NO_NUMBA=1`` to force the pure-numpy fallback;
``benchmarks/bench_kernels.py`` compares the two paths.

Every kernel writes one independent output slot per hypothesis row, so
results are deterministic regardless of thread count.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_requested() -> bool:
    return os.environ.get("PBCERT_NO_NUMBA", "").strip() in ("", "0")


try:
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and _numba_requested()


def error_rates_numpy(weights: np.ndarray, features: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Mean 0-1 loss of each weight row on (features, labels); labels in {0, 1}."""
    preds = (features @ weights.T) > 0.0  # (n, M)
    return np.mean(preds != (labels > 0.5)[:, None], axis=0)


def loss_stats_numpy(
    weights: np.ndarray,
    features: np.ndarray,
    labels: np.ndarray,
    ref_losses: np.ndarray,
    m: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-hypothesis loss statistics against per-index reference losses.

    Returns three (M,) arrays:
      err  - mean 0-1 loss,
      vn   - mean squared deviation from ``ref_losses`` over all n points,
      gn   - biased variance of the deviation on rows [:m] plus rows [m:].
    """
    losses = ((features @ weights.T) > 0.0) != (labels > 0.5)[:, None]  # (n, M)
    err = losses.mean(axis=0)
    diff = losses.astype(np.float64) - ref_losses[:, None]
    vn = np.mean(diff * diff, axis=0)
    gn = diff[:m].var(axis=0) + diff[m:].var(axis=0)
    return err, vn, gn


if HAS_NUMBA:

    @njit(cache=True, parallel=True)
    def _error_rates_nb(weights, features, labels):  # pragma: no cover - jitted
        n_hyp, dim = weights.shape
        n = features.shape[0]
        out = np.empty(n_hyp)
        for k in prange(n_hyp):
            errors = 0.0
            for i in range(n):
                score = 0.0
                for j in range(dim):
                    score += features[i, j] * weights[k, j]
                pred = 1.0 if score > 0.0 else 0.0
                if pred != labels[i]:
                    errors += 1.0
            out[k] = errors / n
        return out

    @njit(cache=True, parallel=True)
    def _loss_stats_nb(weights, features, labels, ref_losses, m):  # pragma: no cover
        n_hyp, dim = weights.shape
        n = features.shape[0]
        err = np.empty(n_hyp)
        vn = np.empty(n_hyp)
        gn = np.empty(n_hyp)
        for k in prange(n_hyp):
            errors = 0.0
            sq_all = 0.0
            sum_lo = 0.0
            sq_lo = 0.0
            sum_hi = 0.0
            sq_hi = 0.0
            for i in range(n):
                score = 0.0
                for j in range(dim):
                    score += features[i, j] * weights[k, j]
                pred = 1.0 if score > 0.0 else 0.0
                loss = 1.0 if pred != labels[i] else 0.0
                errors += loss
                d = loss - ref_losses[i]
                sq_all += d * d
                if i < m:
                    sum_lo += d
                    sq_lo += d * d
                else:
                    sum_hi += d
                    sq_hi += d * d
            err[k] = errors / n
            vn[k] = sq_all / n
            var_lo = sq_lo / m - (sum_lo / m) ** 2
            var_hi = sq_hi / (n - m) - (sum_hi / (n - m)) ** 2
            gn[k] = max(var_lo, 0.0) + max(var_hi, 0.0)
        return err, vn, gn

    def error_rates_numba(weights, features, labels):
        return _error_rates_nb(
            np.ascontiguousarray(weights, dtype=np.float64),
            np.ascontiguousarray(features, dtype=np.float64),
            np.ascontiguousarray(labels, dtype=np.float64),
        )

    def loss_stats_numba(weights, features, labels, ref_losses, m):
        return _loss_stats_nb(
            np.ascontiguousarray(weights, dtype=np.float64),
            np.ascontiguousarray(features, dtype=np.float64),
            np.ascontiguousarray(labels, dtype=np.float64),
            np.ascontiguousarray(ref_losses, dtype=np.float64),
            int(m),
        )


if USE_NUMBA:
    error_rates = error_rates_numba
    loss_stats = loss_stats_numba
else:
    error_rates = error_rates_numpy
    loss_stats = loss_stats_numpy
