import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dobrushin_lab import mrf

settings.register_profile(
    "repo", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@pytest.fixture
def ising2():
    """Two spins on {-1, +1} with psi(a, b) = 0.5 a b and no fields."""
    return mrf.ising_model(2, {(0, 1): 0.5})


@pytest.fixture
def psi_zero():
    return mrf.independent_model([[0.0, 0.0], [0.3, -0.3], [-0.5, 0.5]], mrf.Alphabet.ising())


def softmax(v):
    v = np.asarray(v, dtype=float)
    e = np.exp(v - v.max())
    return e / e.sum()


def random_model(seed, m, q, **kw):
    return mrf.random_pairwise_mrf(np.random.default_rng(seed), m, q, **kw)


E = math.e


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
