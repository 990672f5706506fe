"""Unit tests for the scalar math layer.

Frozen expected values were computed independently with mpmath at 30
significant digits from the defining closed forms.
"""

import math

import numpy as np
import pytest

from pbcert.scalar import (
    EtaGrid,
    binary_kl,
    build_eta_grid,
    build_mean_grid,
    c_eta,
    gaussian_kl,
    invert_kl_upper,
    kappa,
    relaxed_kl_upper,
    s_eta,
    theta,
    empirical_bernstein_constants,
)


class TestTheta:
    def test_spot_values(self):
        assert theta(0.0) == 0.5
        assert theta(0.5) == pytest.approx(0.7725887222397812, abs=1e-12)
        assert theta(0.9) == pytest.approx(1.7315865345605502, abs=1e-12)

    def test_matches_closed_form_above_cutoff(self):
        # High-precision direct evaluation; plain double arithmetic on the
        # raw formula loses digits to cancellation near the low end.
        import mpmath as mp

        mp.mp.dps = 50
        u = np.linspace(1e-3, 0.999, 200)
        direct = [float((-mp.log(1 - mp.mpf(x)) - mp.mpf(x)) / mp.mpf(x) ** 2) for x in u]
        ours = [theta(x) for x in u]
        np.testing.assert_allclose(ours, direct, rtol=1e-12)

    def test_series_branch_continuity(self):
        # Around the switch point both branches must agree with the exact
        # value to 1e-12 absolute (double arithmetic on the raw formula
        # cancels catastrophically down here, hence mpmath as oracle).
        import mpmath as mp

        mp.mp.dps = 50
        for u in (1e-6, 5e-5, 9.9e-5, 1.01e-4, 2e-4):
            exact = float((-mp.log(1 - mp.mpf(u)) - mp.mpf(u)) / mp.mpf(u) ** 2)
            assert theta(u) == pytest.approx(exact, abs=1e-12)

    def test_monotone_increasing(self):
        grid = np.linspace(0.0, 0.99, 1000)
        values = [theta(u) for u in grid]
        assert np.all(np.diff(values) > 0)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            theta(-0.1)
        with pytest.raises(ValueError):
            theta(1.0)


class TestKappa:
    def test_spot_values(self):
        assert kappa(0.0) == 0.5
        assert kappa(1.0) == pytest.approx(math.e - 2.0, abs=1e-15)
        assert kappa(-1.0) == pytest.approx(0.36787944117144233, abs=1e-12)

    def test_nondecreasing(self):
        grid = np.linspace(-10.0, 10.0, 2000)
        values = [kappa(x) for x in grid]
        assert np.all(np.diff(values) >= 0)

    def test_series_branch_continuity(self):
        import mpmath as mp

        mp.mp.dps = 50
        for x in (-2e-4, -9e-5, 1e-7, 9.9e-5, 1.5e-4):
            exact = float((mp.e ** mp.mpf(x) - mp.mpf(x) - 1) / mp.mpf(x) ** 2)
            assert kappa(x) == pytest.approx(exact, abs=1e-12)


class TestRateCoefficients:
    def test_c_eta_spots(self):
        assert c_eta(0.5, 1.0) == pytest.approx(0.5 * theta(0.5), abs=1e-15)
        assert c_eta(0.25, 2.0) == pytest.approx(0.25 * theta(0.5), abs=1e-15)
        # c_eta(eps, 1) -> eps/2 + O(eps^2)
        eps = 1e-7
        assert c_eta(eps, 1.0) == pytest.approx(eps / 2.0, rel=1e-6)

    def test_c_eta_relaxation(self):
        # c_eta(eta, b) <= eta/2 + 11 b eta^2 / 20 whenever eta <= 1/(2b).
        rng = np.random.default_rng(11)
        for _ in range(1000):
            b = rng.uniform(0.1, 3.0)
            eta = rng.uniform(1e-6, 0.5 / b)
            assert c_eta(eta, b) <= eta / 2.0 + 11.0 * b * eta * eta / 20.0 + 1e-15

    def test_c_eta_domain(self):
        with pytest.raises(ValueError):
            c_eta(1.0, 1.0)
        with pytest.raises(ValueError):
            c_eta(-0.1, 1.0)

    def test_s_eta_spots(self):
        assert s_eta(0.5, 1.0) == pytest.approx(0.29744254140025629, abs=1e-14)
        assert s_eta(1.0, 1.0) == pytest.approx(math.e - 2.0, abs=1e-14)
        eps = 1e-7
        assert s_eta(eps, 1.0) == pytest.approx(eps / 2.0, rel=1e-6)


class TestBinaryKl:
    def test_identical_arguments(self):
        assert binary_kl(0.3, 0.3) == 0.0

    def test_spot_values(self):
        assert binary_kl(0.0, 0.5) == pytest.approx(math.log(2.0), abs=1e-14)
        assert binary_kl(0.5, 0.25) == pytest.approx(0.14384103622589046, abs=1e-14)

    def test_boundary_infinities(self):
        assert binary_kl(0.5, 0.0) == math.inf
        assert binary_kl(0.5, 1.0) == math.inf
        assert binary_kl(0.0, 0.0) == 0.0
        assert binary_kl(1.0, 1.0) == 0.0

    def test_joint_convexity(self):
        rng = np.random.default_rng(23)
        for _ in range(500):
            q1, q2, p1, p2 = rng.uniform(0.01, 0.99, size=4)
            lam = rng.uniform(0.0, 1.0)
            mixed = binary_kl(lam * q1 + (1 - lam) * q2, lam * p1 + (1 - lam) * p2)
            assert mixed <= lam * binary_kl(q1, p1) + (1 - lam) * binary_kl(q2, p2) + 1e-12

    def test_rejects_non_probabilities(self):
        with pytest.raises(ValueError):
            binary_kl(1.2, 0.5)


class TestKlInversion:
    def test_zero_budget(self):
        assert invert_kl_upper(0.2, 0.0) == 0.2

    def test_closed_form_at_zero(self):
        assert invert_kl_upper(0.0, 0.1) == pytest.approx(1.0 - math.exp(-0.1), abs=1e-10)

    def test_round_trip(self):
        # binary_kl(q, invert(q, B)) recovers B to 1e-9 when the result is < 1.
        rng = np.random.default_rng(37)
        for _ in range(300):
            q = rng.uniform(0.0, 0.9)
            budget = rng.uniform(1e-4, 1.0)
            p = invert_kl_upper(q, budget)
            if p < 1.0:
                recovered = binary_kl(q, p)
                assert budget - 1e-9 <= recovered <= budget

    def test_monotone_in_budget(self):
        budgets = np.linspace(0.0, 2.0, 50)
        values = [invert_kl_upper(0.1, b) for b in budgets]
        assert np.all(np.diff(values) >= 0)

    def test_infinite_budget(self):
        assert invert_kl_upper(0.3, math.inf) == 1.0

    def test_q_hat_one(self):
        assert invert_kl_upper(1.0, 0.5) == 1.0


class TestRelaxedKl:
    def test_spots(self):
        assert relaxed_kl_upper(0.0, 0.1) == pytest.approx(0.2, abs=1e-15)
        assert relaxed_kl_upper(0.5, 0.0) == 0.5

    def test_dominates_exact_inversion(self):
        for q in np.linspace(0.0, 0.99, 34):
            for budget in np.linspace(0.0, 2.0, 34):
                assert relaxed_kl_upper(q, budget) >= invert_kl_upper(q, budget) - 1e-12


class TestGrids:
    def test_eta_grid_spec_cases(self):
        grid = build_eta_grid(1000, 0.05, 1.0)
        np.testing.assert_allclose(grid.points, [0.5, 0.25, 0.125, 0.0625])
        np.testing.assert_allclose(grid.prior_weights, [0.25] * 4)

        clamped = build_eta_grid(4, 0.5, 1.0)
        np.testing.assert_allclose(clamped.points, [0.5])

        scaled = build_eta_grid(1000, 0.05, 2.0)
        np.testing.assert_allclose(scaled.points, [0.25, 0.125, 0.0625, 0.03125])

    def test_eta_grid_range(self):
        for n in (16, 100, 5000):
            for b in (0.5, 1.0, 2.0):
                grid = build_eta_grid(n, 0.05, b)
                assert grid.points[0] == 1.0 / (2.0 * b)
                assert np.all(grid.points > 0) and np.all(grid.points < 1.0 / b)

    def test_mean_grid_cases(self):
        assert len(build_mean_grid(100, 0.05)) == 2
        np.testing.assert_allclose(build_mean_grid(100, 0.05).points, [0.5, 0.25])
        assert len(build_mean_grid(2, 0.5)) == 1
        assert len(build_mean_grid(10000, 0.05)) == 6

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            EtaGrid(points=np.array([0.25, 0.5]), prior_weights=np.array([0.5, 0.5]), loss_bound=1.0)
        with pytest.raises(ValueError):
            EtaGrid(points=np.array([0.5]), prior_weights=np.array([0.9]), loss_bound=1.0)
        with pytest.raises(ValueError):
            EtaGrid(points=np.array([1.5]), prior_weights=np.array([1.0]), loss_bound=1.0)


class TestGaussianKl:
    def test_identical(self):
        mean = np.array([1.0, -2.0, 0.5])
        assert gaussian_kl(mean, 0.3, mean, 0.3) == 0.0

    def test_mean_shift(self):
        assert gaussian_kl([0.0], 0.5, [1.0], 0.5) == pytest.approx(1.0, abs=1e-14)

    def test_variance_ratio(self):
        expected = 0.5 - 1.0 + math.log(2.0)
        assert gaussian_kl([0.0, 0.0], 0.25, [0.0, 0.0], 0.5) == pytest.approx(expected, abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            gaussian_kl([0.0, 1.0], 1.0, [0.0], 1.0)

    def test_nonnegative(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            d = rng.integers(1, 6)
            kl = gaussian_kl(
                rng.standard_normal(d),
                rng.uniform(0.05, 2.0),
                rng.standard_normal(d),
                rng.uniform(0.05, 2.0),
            )
            assert kl >= 0.0


class TestEmpiricalBernsteinConstants:
    def test_worked_example(self):
        consts = empirical_bernstein_constants(0.5, 1.0, 2)
        assert consts.tilde_c == pytest.approx(0.19829502760017086, abs=1e-14)

    def test_beta_large_m_limit(self):
        eta = 0.3
        consts = empirical_bernstein_constants(eta, 1.0, 10**9)
        assert consts.beta_eta == pytest.approx(eta + eta * eta / 2.0, rel=1e-8)

    def test_lambda_identity_and_range(self):
        rng = np.random.default_rng(71)
        for _ in range(200):
            b = rng.uniform(0.2, 2.0)
            eta = rng.uniform(1e-4, 0.99 / b)
            m = int(rng.integers(2, 500))
            consts = empirical_bernstein_constants(eta, b, m)
            expected = consts.eta * consts.beta_eta / (consts.eta + consts.beta_eta)
            assert consts.lambda_eta == pytest.approx(expected, abs=1e-12)
            assert 0.0 < consts.lambda_eta < consts.eta

    def test_m_domain(self):
        with pytest.raises(ValueError):
            empirical_bernstein_constants(0.5, 1.0, 1)
