"""Exact ESI verification: MGF evaluation, witnesses, chaining, mixtures."""

import math

import numpy as np
import pytest

from pbcert.esi import (
    DiscreteDistribution,
    check_esi_chain,
    check_grid_mixture,
    check_pac_bayes_esi,
    check_standard_bernstein,
    check_unexpected_bernstein,
    empirical_bernstein_mean_bound,
    esi_mgf,
    find_tightness_witness,
)
from pbcert.scalar import build_eta_grid, c_eta, s_eta
from pbcert.verify import random_distribution


def quadratic_penalty(c):
    return lambda x, m1, m2: m1 - x - c * x * x


class TestDiscreteDistribution:
    def test_moments(self):
        dist = DiscreteDistribution([(0.0, 0.25), (2.0, 0.75)])
        assert dist.mean == pytest.approx(1.5)
        assert dist.second_moment == pytest.approx(3.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            DiscreteDistribution([])
        with pytest.raises(ValueError):
            DiscreteDistribution([(0.0, 0.5), (1.0, 0.6)])
        with pytest.raises(ValueError):
            DiscreteDistribution([(math.inf, 1.0)])
        with pytest.raises(ValueError):
            DiscreteDistribution([(0.0, -0.2), (1.0, 1.2)])


class TestEsiMgf:
    def test_point_mass_is_neutral(self):
        dist = DiscreteDistribution([(0.0, 1.0)])
        result = esi_mgf(dist, 0.7, lambda x, m1, m2: m1 - x)
        assert result.mgf_value == pytest.approx(1.0, abs=1e-15)
        assert result.holds

    def test_bernoulli_with_penalty_holds(self):
        dist = DiscreteDistribution([(0.0, 0.5), (1.0, 0.5)])
        c = c_eta(0.5, 1.0)
        result = esi_mgf(dist, 0.5, quadratic_penalty(c))
        assert result.holds and result.mgf_value <= 1.0

    def test_bernoulli_without_penalty_fails(self):
        # E[exp(0.5*(E[X]-X))] = e^0.25 (1 + e^-0.5)/2 > 1: Jensen slack is strict.
        dist = DiscreteDistribution([(0.0, 0.5), (1.0, 0.5)])
        result = esi_mgf(dist, 0.5, lambda x, m1, m2: m1 - x)
        expected = math.exp(0.25) * 0.5 * (1.0 + math.exp(-0.5))
        assert result.mgf_value == pytest.approx(expected, rel=1e-12)
        assert not result.holds

    def test_log_space_guard(self):
        # Exponent ~ eta*(mean - x) = 1000 for the low atom; must not overflow.
        dist = DiscreteDistribution([(-2000.0, 0.5), (0.0, 0.5)])
        result = esi_mgf(dist, 1.0, lambda x, m1, m2: m1 - x)
        assert result.mgf_value == math.inf
        assert not result.holds

    def test_rejects_nonpositive_eta(self):
        dist = DiscreteDistribution([(0.0, 1.0)])
        with pytest.raises(ValueError):
            esi_mgf(dist, 0.0, lambda x, m1, m2: 0.0)


class TestUnexpectedBernstein:
    def test_random_corpus_at_critical_penalty(self):
        rng = np.random.default_rng(42)
        for b in (0.5, 1.0, 2.0):
            grid = build_eta_grid(1000, 0.05, b)
            for _ in range(50):
                dist = random_distribution(rng, -5.0, b)
                for eta in grid.points:
                    result = check_unexpected_bernstein(dist, float(eta), c_eta(float(eta), b))
                    assert result.mgf_value <= 1.0 + 1e-12

    def test_point_mass_zero_penalty(self):
        dist = DiscreteDistribution([(0.0, 1.0)])
        result = check_unexpected_bernstein(dist, 0.9, 0.0)
        assert result.mgf_value == pytest.approx(1.0, abs=1e-15)

    def test_eta_domain_guard(self):
        dist = DiscreteDistribution([(0.0, 0.5), (2.0, 0.5)])
        with pytest.raises(ValueError):
            check_unexpected_bernstein(dist, 0.5, 0.1)

    def test_mgf_nonincreasing_in_penalty(self):
        dist = DiscreteDistribution([(-1.0, 0.3), (0.2, 0.4), (0.9, 0.3)])
        values = [
            check_unexpected_bernstein(dist, 0.5, c).mgf_value
            for c in np.linspace(0.0, 1.0, 40)
        ]
        assert np.all(np.diff(values) <= 1e-15)


class TestStandardBernstein:
    def test_random_corpus(self):
        rng = np.random.default_rng(43)
        for b in (0.5, 1.0, 2.0):
            grid = build_eta_grid(1000, 0.05, b)
            for _ in range(50):
                dist = random_distribution(rng, -5.0, b)
                b_low = abs(float(np.min(dist.values)))
                for eta in grid.points:
                    result = check_standard_bernstein(dist, float(eta), s_eta(float(eta), b_low))
                    assert result.mgf_value <= 1.0 + 1e-12

    def test_point_mass_holds(self):
        dist = DiscreteDistribution([(1.5, 1.0)])
        result = check_standard_bernstein(dist, 0.4, 0.2)
        assert result.mgf_value == pytest.approx(math.exp(-0.4 * 0.2 * 1.5**2), rel=1e-12)
        assert result.holds

    def test_symmetric_without_penalty_fails(self):
        dist = DiscreteDistribution([(-1.0, 0.5), (1.0, 0.5)])
        result = check_standard_bernstein(dist, 0.5, 0.0)
        assert result.mgf_value == pytest.approx(math.cosh(0.5), rel=1e-12)
        assert not result.holds


class TestTightnessWitness:
    def test_witness_below_critical(self):
        witness = find_tightness_witness(0.5, 1.0, 0.5 * c_eta(0.5, 1.0))
        assert witness is not None
        result = check_unexpected_bernstein(witness, 0.5, 0.5 * c_eta(0.5, 1.0))
        assert result.mgf_value > 1.0

    def test_no_witness_at_critical(self):
        assert find_tightness_witness(0.5, 1.0, c_eta(0.5, 1.0)) is None

    def test_witness_at_zero_penalty(self):
        witness = find_tightness_witness(0.5, 1.0, 0.0)
        assert witness is not None
        # Mass sits almost entirely on the zero atom.
        masses = dict(witness.atoms)
        assert masses[0.0] > 0.85

    def test_domain(self):
        with pytest.raises(ValueError):
            find_tightness_witness(2.0, 1.0, 0.1)


class TestChaining:
    def test_single_reduces_to_individual(self):
        rng = np.random.default_rng(3)
        dist = random_distribution(rng, -2.0, 1.0)
        c = c_eta(0.5, 1.0)
        chained = check_esi_chain([dist], [0.5], quadratic_penalty(c))
        single = esi_mgf(dist, 0.5, quadratic_penalty(c))
        assert chained.mgf_value == pytest.approx(single.mgf_value, rel=1e-12)

    def test_equal_gammas_use_gamma_over_n(self):
        # For identical point masses the chain MGF equals the individual MGF
        # at gamma/n raised to the n-th power.
        dist = DiscreteDistribution([(0.5, 1.0)])
        c = 0.1
        chained = check_esi_chain([dist] * 4, [0.8] * 4, quadratic_penalty(c))
        single_at_nu = esi_mgf(dist, 0.2, quadratic_penalty(c))
        assert chained.mgf_value == pytest.approx(single_at_nu.mgf_value**4, rel=1e-10)

    def test_random_triples_pass(self):
        rng = np.random.default_rng(44)
        for _ in range(50):
            dists = [random_distribution(rng, -2.0, 1.0, max_atoms=4) for _ in range(3)]
            gammas = rng.choice([0.5, 0.25, 0.125], size=3).tolist()
            c = c_eta(max(gammas), 1.0)
            result = check_esi_chain(dists, gammas, quadratic_penalty(c))
            assert result.holds

    def test_individual_failure_raises(self):
        dist = DiscreteDistribution([(0.0, 0.5), (1.0, 0.5)])
        with pytest.raises(ValueError, match="individual"):
            check_esi_chain([dist], [0.5], lambda x, m1, m2: m1 - x)

    def test_product_support_cap(self):
        values = np.linspace(0.0, 1.0, 101)
        big = DiscreteDistribution([(v, 1.0 / 101) for v in values])
        with pytest.raises(ValueError, match="cap"):
            check_esi_chain([big] * 3, [0.5] * 3, quadratic_penalty(c_eta(0.5, 1.0)))


class TestPacBayes:
    def test_posterior_equals_prior(self):
        rng = np.random.default_rng(45)
        dists = [random_distribution(rng, -2.0, 1.0, max_atoms=3) for _ in range(3)]
        weights = [0.2, 0.5, 0.3]
        c = c_eta(0.25, 1.0)
        result = check_pac_bayes_esi(dists, weights, weights, 0.25, quadratic_penalty(c))
        assert result.holds

    def test_single_hypothesis_reduces(self):
        rng = np.random.default_rng(46)
        dist = random_distribution(rng, -2.0, 1.0, max_atoms=3)
        c = c_eta(0.25, 1.0)
        combined = check_pac_bayes_esi([dist], [1.0], [1.0], 0.25, quadratic_penalty(c))
        single = esi_mgf(dist, 0.25, quadratic_penalty(c))
        assert combined.mgf_value == pytest.approx(single.mgf_value, rel=1e-12)

    def test_random_pairs(self):
        rng = np.random.default_rng(47)
        c = c_eta(0.25, 1.0)
        for _ in range(50):
            dists = [random_distribution(rng, -2.0, 1.0, max_atoms=3) for _ in range(3)]
            prior = rng.dirichlet(np.ones(3))
            posterior = rng.dirichlet(np.ones(3))
            result = check_pac_bayes_esi(dists, prior, posterior, 0.25, quadratic_penalty(c))
            assert result.holds

    def test_infinite_kl_is_vacuous(self):
        rng = np.random.default_rng(48)
        dists = [random_distribution(rng, -2.0, 1.0, max_atoms=3) for _ in range(2)]
        c = c_eta(0.25, 1.0)
        result = check_pac_bayes_esi(dists, [1.0, 0.0], [0.5, 0.5], 0.25, quadratic_penalty(c))
        assert result.holds and result.mgf_value == 0.0

    def test_length_mismatch(self):
        rng = np.random.default_rng(49)
        dists = [random_distribution(rng, -2.0, 1.0) for _ in range(2)]
        with pytest.raises(ValueError):
            check_pac_bayes_esi(dists, [1.0], [1.0], 0.25, quadratic_penalty(0.2))


class TestGridMixture:
    def test_trivial_cases(self):
        grid = build_eta_grid(1000, 0.05, 1.0)
        assert check_grid_mixture(grid, [1.0] * len(grid))
        assert check_grid_mixture(grid, [0.9, 0.95, 1.0, 0.8])
        assert not check_grid_mixture(grid, [1.1, 1.1, 1.1, 1.1])

    def test_length_mismatch(self):
        grid = build_eta_grid(1000, 0.05, 1.0)
        with pytest.raises(ValueError):
            check_grid_mixture(grid, [1.0])

    def test_composition_with_verified_mgfs(self):
        rng = np.random.default_rng(50)
        grid = build_eta_grid(1000, 0.05, 1.0)
        for _ in range(20):
            dist = random_distribution(rng, -5.0, 1.0)
            mgfs = [
                check_unexpected_bernstein(dist, float(eta), c_eta(float(eta), 1.0)).mgf_value
                for eta in grid.points
            ]
            assert check_grid_mixture(grid, mgfs)


class TestMeanBound:
    def test_identical_samples_value(self):
        # Frozen from the closed form at n=100, delta=0.05 (|G|=2, var=0).
        bound = empirical_bernstein_mean_bound(np.full(100, 0.3), 0.05)
        assert bound == pytest.approx(0.12763069911340791, abs=1e-12)

    def test_zero_variance_scaling(self):
        # Every term is O(1/n): growing n by 100x shrinks the bound ~100x.
        small = empirical_bernstein_mean_bound(np.full(100, 0.5), 0.05)
        large = empirical_bernstein_mean_bound(np.full(10_000, 0.5), 0.05)
        assert large < small / 50.0

    def test_bernoulli_plugin(self):
        rng = np.random.default_rng(51)
        x = (rng.random(100) < 0.5).astype(float)
        bound = empirical_bernstein_mean_bound(x, 0.05)
        assert 0.0 < bound < 1.0

    def test_errors(self):
        with pytest.raises(ValueError):
            empirical_bernstein_mean_bound([], 0.05)
        with pytest.raises(ValueError):
            empirical_bernstein_mean_bound([0.5, 1.2], 0.05)
