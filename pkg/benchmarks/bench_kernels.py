"""Benchmark the numba kernels against the pure-numpy fallback.

Run: python benchmarks/bench_kernels.py [--n 8000] [--d 10] [--mc 1000]

Times the two hot kernels on a workload shaped like one posterior-variance
scan step of the experiment harness.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from pbcert import _kernels


def _workload(n: int, d: int, m_samples: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    features = rng.standard_normal((n, d))
    labels = (rng.random(n) < 0.5).astype(np.float64)
    weights = rng.standard_normal((m_samples, d))
    ref = (rng.random(n) < 0.1).astype(np.float64)
    return weights, features, labels, ref, n // 2


def _time(fn, repeats: int = 5) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeats))


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=8000)
    parser.add_argument("--d", type=int, default=10)
    parser.add_argument("--mc", type=int, default=1000)
    args = parser.parse_args()

    weights, features, labels, ref, m = _workload(args.n, args.d, args.mc)
    print(f"workload: n={args.n} d={args.d} mc={args.mc}")

    rows = []
    rows.append(
        (
            "error_rates",
            "numpy",
            _time(lambda: _kernels.error_rates_numpy(weights, features, labels)),
        )
    )
    rows.append(
        (
            "loss_stats",
            "numpy",
            _time(lambda: _kernels.loss_stats_numpy(weights, features, labels, ref, m)),
        )
    )
    if _kernels.HAS_NUMBA:
        # First calls trigger JIT compilation; warm up before timing.
        _kernels.error_rates_numba(weights, features, labels)
        _kernels.loss_stats_numba(weights, features, labels, ref, m)
        rows.append(
            (
                "error_rates",
                "numba",
                _time(lambda: _kernels.error_rates_numba(weights, features, labels)),
            )
        )
        rows.append(
            (
                "loss_stats",
                "numba",
                _time(lambda: _kernels.loss_stats_numba(weights, features, labels, ref, m)),
            )
        )

        e_np, e_nb = _kernels.error_rates_numpy(
            weights, features, labels
        ), _kernels.error_rates_numba(weights, features, labels)
        np.testing.assert_allclose(e_np, e_nb, rtol=1e-10, atol=1e-12)
    else:
        print("numba unavailable; timing only the numpy path")

    print(f"{'kernel':<14}{'path':<8}{'best of 5 (s)':>14}")
    for kernel, path, seconds in rows:
        print(f"{kernel:<14}{path:<8}{seconds:>14.4f}")
    by_kernel = {}
    for kernel, path, seconds in rows:
        by_kernel.setdefault(kernel, {})[path] = seconds
    for kernel, paths in by_kernel.items():
        if "numba" in paths and "numpy" in paths:
            print(f"{kernel}: numba speedup x{paths['numpy'] / paths['numba']:.2f}")


if __name__ == "__main__":
    main()
