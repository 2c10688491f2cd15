import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dobrushin_lab import complexity as cx
from dobrushin_lab.errors import EnumerationTooLarge, InputError

seeds = st.integers(0, 2**32 - 1)


def _brute_rademacher(values):
    m = values.shape[1]
    total = 0.0
    for signs in product((-1.0, 1.0), repeat=m):
        total += max(float(np.dot(f, signs)) for f in values) / m
    return total / 2**m


def test_all_sign_patterns_exact_one():
    for m in range(1, 9):
        assert cx.exact_rademacher(cx.all_sign_patterns(m)) == 1.0


def test_singleton_class_is_zero():
    assert cx.exact_rademacher(cx.zero_class(5)) == 0.0
    f = cx.FunctionClass(np.array([[0.3, -1.0, 2.0, 0.5]]))
    assert cx.exact_rademacher(f) == 0.0


@given(seeds, st.integers(1, 6), st.integers(1, 5))
def test_exact_rademacher_matches_loop(seed, m, size):
    vals = np.random.default_rng(seed).uniform(-1, 1, size=(size, m))
    assert abs(cx.exact_rademacher(cx.FunctionClass(vals)) - _brute_rademacher(vals)) <= 1e-12


@given(seeds, st.integers(1, 6), st.floats(0.1, 5.0))
def test_scaling_and_shift(seed, m, c):
    vals = np.random.default_rng(seed).uniform(-1, 1, size=(4, m))
    cls = cx.FunctionClass(vals)
    base = cx.exact_rademacher(cls)
    assert abs(cx.exact_rademacher(cls.scaled(c)) - c * base) <= 1e-12
    shift = np.random.default_rng(seed + 1).uniform(-1, 1, size=m)
    assert abs(cx.exact_rademacher(cls.shifted(shift)) - base) <= 1e-12


@given(seeds, st.integers(2, 6))
def test_monotone_under_inclusion(seed, m):
    vals = np.random.default_rng(seed).uniform(-1, 1, size=(5, m))
    cls = cx.FunctionClass(vals)
    assert cx.exact_rademacher(cls.subset([0, 2])) <= cx.exact_rademacher(cls) + 1e-12


def test_gaussian_all_sign_patterns_m16():
    est = cx.gaussian_complexity(cx.all_sign_patterns(16), draws=10_000, rng=0)
    # max over sign patterns of <f, g>/m is mean |g_i|, whose expectation is sqrt(2/pi)
    assert abs(est.mean - math.sqrt(2 / math.pi)) <= 3 * est.stderr


def test_monte_carlo_rademacher_close_to_exact():
    vals = np.random.default_rng(3).uniform(-1, 1, size=(6, 8))
    cls = cx.FunctionClass(vals)
    est = cx.tau_complexity(cls, draws=20_000, rng=1)
    assert abs(est.mean - cx.exact_rademacher(cls)) <= 4 * est.stderr


def test_suprema_chunking_invariant(monkeypatch):
    cls = cx.all_sign_patterns(6)
    tau = cx.noise_draws(cx.GAUSSIAN, 6, 100, 0)
    full = cx.suprema(cls, tau)
    monkeypatch.setattr(cx, "_SUP_BUDGET", 64)
    # BLAS may round block products differently; agreement is to the last few ulps
    assert np.max(np.abs(full - cx.suprema(cls, tau))) <= 1e-14


def test_noise_draws_prefix_stable():
    a = cx.noise_draws(cx.RADEMACHER, 4, 300, 5)
    b = cx.noise_draws(cx.RADEMACHER, 4, 600, 5)
    assert np.array_equal(a[:256], b[:256])
    assert set(np.unique(a)) == {-1.0, 1.0}


def test_custom_noise():
    spec = cx.NoiseSpec("custom", lambda g, n, m: np.ones((n, m)))
    est = cx.tau_complexity(cx.all_sign_patterns(3), spec, draws=10, rng=0)
    assert est.mean == 1.0 and est.stderr == 0.0
    bad = cx.NoiseSpec("custom", lambda g, n, m: np.ones((n, m + 1)))
    with pytest.raises(InputError):
        cx.tau_complexity(cx.all_sign_patterns(3), bad, draws=10, rng=0)
    with pytest.raises(InputError):
        cx.NoiseSpec("custom")
    with pytest.raises(InputError):
        cx.NoiseSpec("cauchy")


def test_class_validation_and_cap():
    with pytest.raises(InputError):
        cx.FunctionClass(np.zeros((0, 3)))
    with pytest.raises(InputError):
        cx.FunctionClass(np.array([[np.nan, 1.0]]))
    with pytest.raises(InputError):
        cx.FunctionClass(np.zeros((2, 2)), labels=("a",))
    with pytest.raises(EnumerationTooLarge):
        cx.all_sign_patterns(30)
    with pytest.raises(InputError):
        cx.suprema(cx.zero_class(3), np.zeros((2, 4)))


def test_threshold_class_behaviors():
    cls = cx.threshold_class([0.3, -1.0, 2.0])
    assert cls.size == 4
    assert {tuple(r) for r in cls.values} == {(1, 1, 1), (1, -1, 1), (-1, -1, 1), (-1, -1, -1)}


def test_from_functions():
    cls = cx.FunctionClass.from_functions([abs, lambda v: -v], [-1.0, 2.0])
    assert np.array_equal(cls.values, [[1.0, 2.0], [1.0, -2.0]])


def test_unnormalized():
    assert cx.unnormalized(0.25, 8) == 2.0


def test_distributional_complexity_stderr_paths():
    sampler = lambda g: g.uniform(-1, 1, 5)  # noqa: E731
    one = cx.distributional_complexity(sampler, cx.threshold_class, 1, 200, 0)
    many = cx.distributional_complexity(sampler, cx.threshold_class, 20, 200, 0)
    assert one.draws == 200 and many.draws == 4000
    assert 0 < many.mean < 1 and many.stderr > 0
    with pytest.raises(InputError):
        cx.distributional_complexity(sampler, cx.threshold_class, 0, 1, 0)


def test_sigma_shuffle_selects():
    out = cx.sigma_shuffle([1, 2, 3], [7, 8, 9], [1, -1, 1])
    assert out.tolist() == [1, 8, 3]


def test_mixture_check_iid_passes():
    sampler = lambda g: np.where(g.random(3) < 0.5, -1.0, 1.0)  # noqa: E731
    res = cx.gc_mixture_inequality_check(sampler, lambda s: cx.threshold_class(s), 2000, 0)
    assert res.passed and res.to_dict()["pass"] is True
    with pytest.raises(InputError):
        cx.gc_mixture_inequality_check(sampler, cx.threshold_class, 1, 0)
