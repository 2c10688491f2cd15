import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from dobrushin_lab import gibbs, mrf
from dobrushin_lab.errors import InputError, InvalidConditioning

from conftest import random_model

seeds = st.integers(0, 2**32 - 1)


def _freq(samples, q):
    return np.bincount(mrf.encode(samples, q), minlength=q ** samples.shape[1]) / samples.shape[0]


# -- single chains -----------------------------------------------------------

def test_product_model_chi_square(psi_zero):
    draws = gibbs.gibbs_sample(psi_zero, burn_in=5, thin=1, count=20_000, rng=1)
    expected = mrf.exact_joint(psi_zero).probabilities * draws.shape[0]
    observed = _freq(draws, 2) * draws.shape[0]
    assert stats.chisquare(observed, expected).pvalue > 1e-4


def test_uncoupled_theta_chain_is_uniform():
    model = gibbs.ThetaChainModel(5, 0.0)
    draws = gibbs.gibbs_sample(model, burn_in=3, thin=1, count=4000, rng=2)
    assert stats.kstest(draws[:, 2], stats.uniform(-1, 2).cdf).pvalue > 1e-4


def test_two_node_ising_tv(ising2):
    draws = gibbs.gibbs_sample(ising2, burn_in=20, thin=2, count=50_000, rng=3)
    tv = 0.5 * np.abs(_freq(draws, 2) - mrf.exact_joint(ising2).probabilities).sum()
    assert tv < 0.01


def test_three_node_pair_marginals():
    model = random_model(11, 3, 3)
    table = mrf.exact_joint(model)
    draws = gibbs.gibbs_sample(model, burn_in=20, thin=2, count=40_000, rng=4)
    for i, j in [(0, 1), (1, 2)]:
        emp = np.zeros((3, 3))
        np.add.at(emp, (draws[:, i], draws[:, j]), 1)
        assert 0.5 * np.abs(emp / emp.sum() - table.pair_marginal(i, j)).sum() < 0.02


def test_gibbs_sample_shapes_and_errors(ising2):
    assert gibbs.gibbs_sample(ising2, 1, 1, 0, rng=0).shape == (0, 2)
    with pytest.raises(InputError):
        gibbs.gibbs_sample(ising2, -1, 1, 3, rng=0)


def test_gibbs_sample_deterministic(ising2):
    a = gibbs.gibbs_sample(ising2, 3, 1, 50, rng=9)
    b = gibbs.gibbs_sample(ising2, 3, 1, 50, rng=9)
    assert np.array_equal(a, b)


def test_gibbs_step_counts_and_rejects_bad_state(ising2):
    state = gibbs.ChainState(np.array([0, 1]))
    nxt = gibbs.gibbs_step(ising2, state, np.random.default_rng(0))
    assert nxt.sweeps == 1 and np.count_nonzero(nxt.config != state.config) <= 1
    with pytest.raises(InputError):
        gibbs.gibbs_step(ising2, gibbs.ChainState(np.array([0, 1, 0])), np.random.default_rng(0))


# -- tilted conditionals -----------------------------------------------------

def _density(x, a):
    return math.exp(a * x) / integrate.quad(lambda y: math.exp(a * y), -1, 1)[0]


def test_tilted_mean_matches_closed_form():
    draws = gibbs.tilted_interval_sample(1.0, np.random.default_rng(5), size=200_000)
    target = 1 / math.tanh(1.0) - 1.0
    assert abs(draws.mean() - target) < 4 * draws.std() / math.sqrt(draws.size)
    quad = integrate.quad(lambda x: x * _density(x, 1.0), -1, 1)[0]
    assert abs(quad - target) <= 1e-12


@given(st.floats(-30, 30), st.floats(-1, 1))
def test_tilted_cdf_matches_quadrature(a, t):
    ref = integrate.quad(lambda x: _density(x, a), -1, t)[0]
    assert abs(float(gibbs.tilted_cdf(t, a)) - ref) <= 1e-9


@given(st.floats(-30, 30), st.floats(-1, 1))
def test_tilted_cdf_mirror(a, t):
    assert abs(float(gibbs.tilted_cdf(t, a)) - (1 - float(gibbs.tilted_cdf(-t, -a)))) <= 1e-12


def test_tilted_cdf_extremes():
    assert float(gibbs.tilted_cdf(1.0, 800.0)) == pytest.approx(1.0)
    assert float(gibbs.tilted_cdf(0.0, 800.0)) == pytest.approx(0.0, abs=1e-300)
    with pytest.raises(InputError):
        gibbs.tilted_interval_sample(math.inf, np.random.default_rng(0))


# -- theta chain -------------------------------------------------------------

def test_theta_tuning_hits_row_sum():
    model = gibbs.ThetaChainModel.tuned(4096, 0.4)
    assert model.max_row_sum == pytest.approx(0.4, rel=1e-12)
    small = gibbs.ThetaChainModel.tuned(256, 0.4, reference_m=4096)
    assert small.c == model.c and small.max_row_sum < 0.4


def test_theta_row_sums_match_matrix():
    model = gibbs.ThetaChainModel(37, 0.2)
    assert np.allclose(model.row_sums(), model.theta_matrix().sum(axis=1), atol=1e-14, rtol=0)
    assert model.theta(3, 3) == 0 and model.theta(2, 7) == model.theta(7, 2)


def test_theta_half_width_and_validation():
    assert gibbs.ThetaChainModel.from_half_width(3, 0.1).m == 7
    with pytest.raises(InputError):
        gibbs.ThetaChainModel(0, 0.1)
    with pytest.raises(InputError):
        gibbs.ThetaChainModel(3, -1.0)


def test_theta_chain_symmetric_under_flip():
    model = gibbs.ThetaChainModel.tuned(33, 0.4)
    draws = np.array([gibbs.theta_chain_draw(model, 20, s) for s in range(300)])
    assert abs(draws.mean()) < 4 * draws.std() / math.sqrt(draws.size) + 0.02
    assert np.all(np.abs(draws) <= 1)


def test_site_fields_match_matrix():
    model = gibbs.ThetaChainModel(20, 0.3)
    x = np.random.default_rng(0).uniform(-1, 1, 20)
    assert np.allclose(gibbs.site_fields(model, x), model.theta_matrix() @ x, atol=1e-12, rtol=0)


def test_certified_burn_in():
    assert gibbs.certified_burn_in(100, 0.5, 1e-3) == math.ceil((math.log(100) + math.log(1e3)) / 0.5)
    with pytest.raises(InputError):
        gibbs.certified_burn_in(10, 1.0)


# -- coupling ----------------------------------------------------------------

def test_maximal_coupling_examples():
    p, q = np.array([0.5, 0.5]), np.array([0.7, 0.3])
    rng = np.random.default_rng(0)
    pairs = np.array([gibbs.tv_optimal_coupled_draw(p, q, rng) for _ in range(40_000)])
    assert abs(np.mean(pairs[:, 0] != pairs[:, 1]) - 0.2) < 0.01
    assert abs(pairs[:, 0].mean() - 0.5) < 0.01
    assert abs(pairs[:, 1].mean() - 0.3) < 0.01
    same = np.array([gibbs.tv_optimal_coupled_draw(p, p, rng) for _ in range(500)])
    assert np.all(same[:, 0] == same[:, 1])


def test_maximal_coupling_validates():
    with pytest.raises(InputError):
        gibbs.tv_optimal_coupled_draw([0.5, 0.5], [1.0], 0)
    with pytest.raises(InputError):
        gibbs.tv_optimal_coupled_draw([0.9, 0.5], [0.5, 0.5], 0)


@given(seeds)
def test_identical_prefixes_never_diverge(seed):
    model = random_model(seed, 4, 2)
    trace = gibbs.coupled_gibbs_run(model, 2, [1, 0], [1, 0], 10, seed, trace=True)
    assert np.all(trace == 0)


def test_product_model_coupling_collapses(psi_zero):
    stats_ = gibbs.coupling_experiment(psi_zero, 1, [0], [1], runs=200, sweeps=30, rng=0)
    assert stats_.alpha == 0 and stats_.bound == 0
    assert stats_.mean_hamming == 0.0


def test_coupled_chains_have_correct_marginals():
    model = random_model(21, 3, 2)
    conditioned = mrf.condition(mrf.exact_joint(model), {0: 1})
    finals = [gibbs.coupled_gibbs_run(model, 1, [1], [0], 30, s, return_states=True)[1]
              for s in range(6000)]
    emp = _freq(np.array(finals)[:, 1:], 2)
    assert 0.5 * np.abs(emp - conditioned.probabilities).sum() < 0.03


def test_coupling_experiment_independent_of_workers():
    model = mrf.chain_ising(6, 0.25)
    a = gibbs.coupling_experiment(model, 2, [1, 1], [0, 0], runs=1200, sweeps=20, rng=7, workers=1)
    b = gibbs.coupling_experiment(model, 2, [1, 1], [0, 0], runs=1200, sweeps=20, rng=7, workers=3)
    assert np.array_equal(a.trace_mean, b.trace_mean)
    assert a.to_dict() == b.to_dict()


def test_coupling_trace_shape_and_start():
    model = mrf.chain_ising(5, 0.25)
    trace = gibbs.coupled_gibbs_run(model, 1, [1], [0], 7, 0, trace=True)
    assert trace.shape == (8,) and trace[0] == 0


def test_coupling_input_errors(ising2):
    with pytest.raises(InvalidConditioning):
        gibbs.coupled_gibbs_run(ising2, 1, [0, 1], [1], 3, 0)
    with pytest.raises(InvalidConditioning):
        gibbs.coupled_gibbs_run(ising2, 1, [5], [1], 3, 0)
    with pytest.raises(InputError):
        gibbs.coupled_gibbs_run(ising2, 2, [0, 1], [1, 1], 3, 0)
    with pytest.raises(InputError):
        gibbs.coupled_gibbs_run(gibbs.ThetaChainModel(3, 0.1), 1, [0], [1], 3, 0)


def test_coupling_stats_pass_flag():
    model = mrf.chain_ising(8, 0.25)
    s = gibbs.coupling_experiment(model, 2, [1, 1], [0, 0], runs=2000, sweeps=60, rng=1, burn_in=25)
    assert s.passed and s.to_dict()["pass"] is True
    assert s.bound == pytest.approx(2 * s.alpha / (1 - s.alpha))
