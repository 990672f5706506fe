"""Numba kernels agree with the numpy fallback and with direct oracles."""

import os
import subprocess
import sys

import numpy as np
import pytest

from pbcert import _kernels
from pbcert.learners import zero_one_losses


def workload(seed=0, n=257, d=7, m_samples=23):
    rng = np.random.default_rng(seed)
    features = rng.standard_normal((n, d))
    labels = (rng.random(n) < 0.4).astype(np.float64)
    weights = rng.standard_normal((m_samples, d))
    ref = (rng.random(n) < 0.2).astype(np.float64)
    return weights, features, labels, ref, n // 2


def test_error_rates_matches_per_row_oracle():
    weights, features, labels, _, _ = workload()
    rates = _kernels.error_rates_numpy(weights, features, labels)
    for k in range(weights.shape[0]):
        expected = zero_one_losses(weights[k], features, labels).mean()
        assert rates[k] == pytest.approx(expected, abs=1e-15)


def test_loss_stats_matches_direct_computation():
    weights, features, labels, ref, m = workload(seed=1)
    err, vn, gn = _kernels.loss_stats_numpy(weights, features, labels, ref, m)
    for k in range(weights.shape[0]):
        losses = zero_one_losses(weights[k], features, labels)
        diff = losses - ref
        assert err[k] == pytest.approx(losses.mean(), abs=1e-15)
        assert vn[k] == pytest.approx(np.mean(diff**2), abs=1e-12)
        assert gn[k] == pytest.approx(np.var(diff[:m]) + np.var(diff[m:]), abs=1e-12)


@pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba unavailable")
def test_numba_matches_numpy():
    for seed in range(3):
        weights, features, labels, ref, m = workload(seed=seed)
        np.testing.assert_allclose(
            _kernels.error_rates_numba(weights, features, labels),
            _kernels.error_rates_numpy(weights, features, labels),
            rtol=1e-12,
            atol=1e-14,
        )
        for got, want in zip(
            _kernels.loss_stats_numba(weights, features, labels, ref, m),
            _kernels.loss_stats_numpy(weights, features, labels, ref, m),
        ):
            np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-12)


def test_env_flag_selects_numpy_path():
    env = dict(os.environ, PBCERT_NO_NUMBA="1")
    code = (
        "from pbcert import _kernels; "
        "assert not _kernels.USE_NUMBA; "
        "assert _kernels.error_rates is _kernels.error_rates_numpy"
    )
    subprocess.run([sys.executable, "-c", code], check=True, env=env)


def test_active_path_is_deterministic():
    weights, features, labels, ref, m = workload(seed=2)
    first = _kernels.loss_stats(weights, features, labels, ref, m)
    second = _kernels.loss_stats(weights, features, labels, ref, m)
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a, b)
