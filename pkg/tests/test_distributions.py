import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from pagraphs.distributions import (DirichletParams, StickSequence, crp_conditional_draws,
                                    crp_simulate, diversity_estimate, generalized_urn,
                                    generalized_urn_limit, ml_moment, polya_urn, sample_dirichlet,
                                    sample_gem, sample_ml, sample_mlmc)
from pagraphs.errors import ParameterError, ResolutionError, ValidationError

from conftest import pooled_chi2

# frozen from tests/oracles/distributions_oracle.py
DIR21_MEANS = (0.6666666666666667, 0.33333333333333326)
DIR123_MEANS = (0.16666666666666666, 0.3333333333333333, 0.4999999999999999)
GEM_P1_MEAN = 0.3333333333333336
ML_HALF_HALF = {0: 1.0, 1: 1.77245385090552, 2: 4.0}
ML_HALF_THREEHALVES_MEAN = 2.65868077635827
ML_03_17_P25 = 72.8147462183195
DIVERSITY_SYNTHETIC = 0.792665459521202      # Gamma(1/2) * 0.2^(1/2)
STICK200_FRACTION = 0.6338                   # reference stick breaking, 10^4 draws
EXPECTED_K2 = 1.6666666666666665


def gens(seed=1):
    return np.random.default_rng(seed)


# ---------------------------------------------------------------- Dirichlet

def test_dirichlet_symmetric_mean():
    x = sample_dirichlet(DirichletParams((1.0, 1.0)), gens(), size=10**5)
    assert np.allclose(x.mean(axis=0), 0.5, atol=0.01)


def test_dirichlet_single_weight_is_one():
    x = sample_dirichlet(DirichletParams((3.7,)), gens(), size=100)
    assert np.all(x == 1.0)


def test_dirichlet_2_1_means():
    x = sample_dirichlet(DirichletParams((2.0, 1.0)), gens(), size=10**5)
    assert np.allclose(x.mean(axis=0), DIR21_MEANS, atol=0.01)


def test_dirichlet_sums_to_one_with_tiny_weights():
    x = sample_dirichlet((1e-3, 1e-3, 2.0), gens(), size=1000)
    assert np.all(np.abs(x.sum(axis=1) - 1) < 1e-12)
    assert np.all(x >= 0)


@pytest.mark.parametrize("bad", [(1.0, 0.0), (-1.0,), ()])
def test_dirichlet_rejects_bad_weights(bad):
    with pytest.raises(ParameterError):
        DirichletParams(bad)


# ---------------------------------------------------------------- GEM and diversity

def test_gem_first_stick_mean():
    rng = gens()
    p1 = np.array([sample_gem(0.5, 0.5, 1, rng).fractions[0] for _ in range(10**5)])
    assert abs(p1.mean() - GEM_P1_MEAN) < 0.01


@pytest.mark.parametrize("alpha,theta", [(0.0, 0.5), (1.0, 0.5), (0.5, -0.5), (0.5, -1.0)])
def test_gem_parameter_boundary(alpha, theta):
    with pytest.raises(ParameterError):
        sample_gem(alpha, theta, 10, gens())


def test_gem_partial_sums_match_reference_stick_breaking():
    rng = gens(3)
    hits = np.mean([sample_gem(0.5, 0.5, 200, rng).fractions.sum() >= 0.99 for _ in range(10**4)])
    # binomial sd at 10^4 draws is about 0.005 per sample
    assert abs(hits - STICK200_FRACTION) < 0.02


def test_gem_lazy_extension_reaches_residual():
    s = sample_gem(0.5, 0.5, None, gens(), residual_tol=1e-4)
    assert s.residual < 1e-4
    assert abs(s.fractions.sum() + s.residual - 1) < 1e-10


def test_diversity_synthetic_power_law():
    i = np.arange(1, 501)
    sticks = StickSequence(0.5, 0.5, 0.2 * i ** -2.0, residual=0.0)
    d = diversity_estimate(sticks)
    assert d == pytest.approx(DIVERSITY_SYNTHETIC, rel=1e-12)
    assert d.index == 500
    assert not d.truncation_biased


def test_diversity_gem_mean():
    rng = gens()
    est = [diversity_estimate(sample_gem(0.5, 0.5, 10**4, rng)) for _ in range(1000)]
    assert abs(np.mean(est) / ML_HALF_HALF[1] - 1) < 0.05
    assert all(e.truncation_biased for e in est)


def test_diversity_too_few_sticks():
    with pytest.raises(ResolutionError):
        diversity_estimate(sample_gem(0.5, 0.5, 10, gens()))


# ---------------------------------------------------------------- Mittag-Leffler

@pytest.mark.parametrize("p", [0, 1, 2])
def test_ml_moment_half_half(p):
    assert ml_moment(0.5, 0.5, p) == pytest.approx(ML_HALF_HALF[p], rel=1e-12)


def test_ml_moment_other_points():
    assert ml_moment(0.5, 1.5, 1) == pytest.approx(ML_HALF_THREEHALVES_MEAN, rel=1e-12)
    assert ml_moment(0.3, 1.7, 2.5) == pytest.approx(ML_03_17_P25, rel=1e-12)


def test_ml_moment_large_arguments_do_not_overflow():
    assert math.isfinite(ml_moment(0.1, 50.0, 3))


@pytest.mark.parametrize("alpha,theta", [(0.3, 1.0), (0.7, -0.2), (0.5, 10.0)])
def test_ml_moment_zeroth(alpha, theta):
    assert ml_moment(alpha, theta, 0) == pytest.approx(1.0, rel=1e-14)


def test_ml_moment_rejects_bad():
    with pytest.raises(ParameterError):
        ml_moment(0.5, -0.6, 1)
    with pytest.raises(ParameterError):
        ml_moment(0.5, 0.5, -1)


def test_sample_ml_first_two_moments():
    w = sample_ml(0.5, 0.5, 10**5, gens(), size=1000, normalization="power")
    assert abs(w.mean() / ML_HALF_HALF[1] - 1) < 0.05
    assert abs((w ** 2).mean() / ML_HALF_HALF[2] - 1) < 0.07


def test_sample_ml_martingale_normalization_mean():
    w = sample_ml(0.5, 0.5, 10**4, gens(), size=1000)
    assert abs(w.mean() / ML_HALF_HALF[1] - 1) < 0.05


def test_sample_ml_low_resolution():
    with pytest.raises(ResolutionError):
        sample_ml(0.5, 0.5, 10, gens())


def test_mlmc_first_marginal_and_ratio():
    rng = gens()
    paths = np.array([sample_mlmc(0.5, 0.5, 5, rng).values for _ in range(1000)])
    assert abs(paths[:, 0].mean() / ML_HALF_HALF[1] - 1) < 0.05
    ratio = paths[:, 1].mean() / paths[:, 0].mean()
    assert abs(ratio / (ml_moment(0.5, 1.5, 1) / ml_moment(0.5, 0.5, 1)) - 1) < 0.05


def test_mlmc_rejects_bad():
    with pytest.raises(ParameterError):
        sample_mlmc(1.0, 0.5, 5, gens())
    with pytest.raises(ParameterError):
        sample_mlmc(0.5, 0.5, 0, gens())


@given(st.floats(0.05, 0.95), st.floats(0.0, 3.0), st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_mlmc_paths_positive_nondecreasing(alpha, theta_shift, n, seed):
    s = sample_mlmc(alpha, theta_shift - alpha * 0.9, n, gens(seed), resolution=1000)
    assert np.all(s.values > 0)
    assert np.all(s.increments >= 0)
    assert np.allclose(np.cumsum(s.increments), s.values)


# ---------------------------------------------------------------- CRP

def test_crp_single_customer():
    c = crp_simulate(0.5, 0.5, 1, gens())
    assert c.num_tables == 1 and list(c.table_counts) == [1] and list(c.draws) == [1]


def test_crp_two_customers_expected_tables():
    rng = gens()
    k = np.array([crp_simulate(0.5, 0.5, 2, rng).num_tables for _ in range(10**5)])
    assert abs(k.mean() - EXPECTED_K2) < 0.01


def test_crp_table_growth_constant():
    rng = gens()
    w = np.array([crp_simulate(0.5, 0.5, 10**4, rng).num_tables for _ in range(1000)]) / 100.0
    assert abs(w.mean() / ML_HALF_HALF[1] - 1) < 0.05


@given(st.floats(0.05, 0.95), st.floats(0.0, 5.0), st.integers(1, 300), st.integers(0, 2**32 - 1))
def test_crp_state_invariants(alpha, theta_shift, n, seed):
    c = crp_simulate(alpha, theta_shift - alpha * 0.9, n, gens(seed))
    assert c.table_counts.sum() == n
    assert c.num_tables == np.count_nonzero(c.table_counts)
    running = np.maximum.accumulate(c.draws)
    assert c.draws[0] == 1
    assert np.all(c.draws[1:] <= 1 + running[:-1])
    assert np.array_equal(np.bincount(c.draws)[1:], c.table_counts)


def test_conditional_draws_first_label_and_forced_sticks():
    rng = gens()
    for _ in range(20):
        assert crp_conditional_draws(sample_gem(0.5, 0.5, 50, rng), 50, rng)[0] == 1
    forced = StickSequence(0.5, 0.5, np.array([1.0, 0.0, 0.0]), residual=0.0)
    assert np.all(crp_conditional_draws(forced, 200, rng) == 1)


def test_conditional_draws_match_crp_in_law():
    rng_a, rng_b = gens(11), gens(12)
    k_cond = [crp_conditional_draws(sample_gem(0.5, 0.5, 100, rng_a), 100, rng_a).max()
              for _ in range(10**4)]
    k_crp = [crp_simulate(0.5, 0.5, 100, rng_b).num_tables for _ in range(10**4)]
    assert pooled_chi2(k_cond, k_crp) > 0.01


def test_conditional_draws_need_resolution():
    with pytest.raises(ResolutionError):
        crp_conditional_draws(sample_gem(0.5, 0.5, 10, gens()), 100, gens())


# ---------------------------------------------------------------- urns

def test_urn_one_colour():
    u = polya_urn([2.0], 1.0, 500, gens())
    assert np.all(u.proportions() == 1.0) and np.all(u.draw_history == 0)


def test_urn_two_colours_uniform_limit():
    rng = gens()
    # 10^4 replicates: at 10^3 the 0.01 tolerance is only about one standard error
    p = np.array([polya_urn([1.0, 1.0], 1.0, 10**5, rng).proportions()[0] for _ in range(10**4)])
    assert abs(p.mean() - 0.5) < 0.01
    assert stats.kstest(p, "uniform").pvalue > 0.01


def test_urn_dirichlet_means():
    rng = gens()
    p = np.array([polya_urn([1.0, 2.0, 3.0], 0.5, 2000, rng).proportions() for _ in range(4000)])
    assert np.all(np.abs(p.mean(axis=0) - DIR123_MEANS) < 0.01)


def test_urn_rejects_bad_beta():
    with pytest.raises(ParameterError):
        polya_urn([1.0, 1.0], 0.0, 10, gens())


@given(st.lists(st.integers(1, 20), min_size=1, max_size=5), st.integers(1, 8),
       st.integers(0, 500), st.integers(0, 2**32 - 1))
def test_urn_total_weight_exact(weights, beta, steps, seed):
    u = polya_urn([float(w) for w in weights], float(beta), steps, gens(seed))
    assert u.weights.sum() == sum(weights) + steps * beta
    assert np.all(u.weights >= 0)


def test_urn_limit_examples():
    lam, v = generalized_urn_limit([[1, 1], [1, 1]])
    assert lam == 2 and np.allclose(v, [0.5, 0.5])
    a = 1.5
    lam, v = generalized_urn_limit([[2 * (a - 1), 2 - a], [a - 1, 1]])
    assert lam == pytest.approx(1.5) and np.allclose(v, [0.5, 0.5])
    a, g = 0.5, 0.3
    lam, v = generalized_urn_limit([[a, 1 - a], [a - g, 1 - a + g]])
    assert v[1] == pytest.approx(5 / 7, abs=1e-12)   # sympy null space: (2/7, 5/7)


def test_urn_limit_unbalanced():
    with pytest.raises(ValidationError):
        generalized_urn_limit([[1, 2], [1, 1]])


@given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.01, 10))
def test_urn_limit_is_left_eigenvector(a, b, c):
    m = np.array([[a, b], [c, a + b - c]]) if c < a + b else np.array([[a, b], [a + b, 0.0]])
    if np.any(m <= 0):
        return
    lam, v = generalized_urn_limit(m)
    assert np.allclose(v @ m, lam * v, atol=1e-10)
    assert abs(v.sum() - 1) < 1e-12


def test_generalized_urn_balanced_growth():
    u = generalized_urn([0.5, 0.0], [[1.0, 0.5], [0.5, 1.0]], 1000, gens())
    assert u.weights.sum() == pytest.approx(0.5 + 1.5 * 1000)


# ---------------------------------------------------------------- determinism

def test_seeded_samplers_bit_exact():
    def run(seed):
        r = gens(seed)
        return np.concatenate([sample_dirichlet((1.0, 2.0), r), sample_gem(0.4, 1.0, 30, r).fractions,
                               sample_mlmc(0.5, 0.5, 5, r, resolution=2000).values,
                               crp_simulate(0.5, 0.5, 50, r).draws,
                               polya_urn([1.0, 1.0], 1.0, 50, r).draw_history])
    assert np.array_equal(run(5), run(5))
    assert not np.array_equal(run(5), run(6))
