import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import example, given, strategies as st

from dobrushin_lab import gibbs, kernels

from conftest import random_model

try:
    compiled = kernels.load("compiled")
except ImportError:  # pragma: no cover - extension not built
    compiled = None

python = kernels.load("python")
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")
seeds = st.integers(0, 2**32 - 1)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.load("fortran")


def test_env_var_forces_fallback():
    env = dict(os.environ, DOBRUSHIN_LAB_PURE_PYTHON="1")
    code = "import dobrushin_lab.kernels as k; print(k.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_compiled
def test_default_backend_is_compiled():
    if os.environ.get("DOBRUSHIN_LAB_PURE_PYTHON", "") in ("", "0"):
        assert kernels.BACKEND == "compiled"


@pytest.mark.parametrize("backend", [python, compiled], ids=["python", "compiled"])
@given(a=st.floats(-50, 50), u=st.floats(0, 1))
@example(a=1.192092896e-07, u=0.0)
def test_tilted_inverse_in_range_and_monotone(backend, a, u):
    if backend is None:
        pytest.skip("compiled extension not built")
    x = backend.tilted_inverse(a, u)
    assert -1 - 1e-12 <= x <= 1 + 1e-12
    assert backend.tilted_inverse(a, min(1.0, u + 0.01)) >= x - 1e-12


@pytest.mark.parametrize("a", [-20.0, -1.0, -0.999, -3e-6, -1e-9, 0.0, 1e-9, 1.2e-7, 0.3, 1.0, 20.0])
def test_tilted_inverse_inverts_cdf(a):
    for u in np.linspace(0.01, 0.99, 11):
        x = python.tilted_inverse(a, u)
        assert abs(gibbs.tilted_cdf(x, a) - u) <= 1e-9


@needs_compiled
@given(seeds, st.integers(2, 5), st.integers(2, 4))
def test_site_conditional_agrees(seed, m, q):
    model = random_model(seed, m, q)
    phi, ptr, idx, psi = gibbs._kernel_args(model)
    x = np.random.default_rng(seed).integers(0, q, size=m).astype(np.int64)
    for i in range(m):
        a = python.site_conditional(i, x, phi, ptr, idx, psi)
        b = np.asarray(compiled.site_conditional(i, x, phi, ptr, idx, psi))
        assert np.max(np.abs(a - b)) <= 1e-14


@needs_compiled
@given(seeds, st.integers(2, 5))
def test_maximal_draw_agrees(seed, q):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(q))
    r = rng.dirichlet(np.ones(q))
    for u in rng.random((20, 3)):
        assert python.maximal_coupled_draw(p, r, *u) == tuple(compiled.maximal_coupled_draw(p, r, *u))


@needs_compiled
@given(seeds, st.integers(2, 6), st.integers(2, 3))
def test_discrete_chain_bit_identical(seed, m, q):
    model = random_model(seed, m, q)
    args = gibbs._kernel_args(model)
    rng = np.random.default_rng(seed)
    x0 = rng.integers(0, q, size=m).astype(np.int64)
    sites = rng.integers(0, m, size=300).astype(np.int64)
    u = rng.random(300)
    xa, xb = x0.copy(), x0.copy()
    python.discrete_gibbs_steps(xa, *args, sites, u)
    compiled.discrete_gibbs_steps(xb, *args, sites, u)
    assert np.array_equal(xa, xb)


@needs_compiled
@given(seeds, st.integers(3, 6))
def test_coupled_runs_bit_identical(seed, m):
    model = random_model(seed, m, 2)
    args = gibbs._kernel_args(model)
    rng = np.random.default_rng(seed)
    k, runs, sweeps = 1, 4, 5
    free = np.arange(k, m, dtype=np.int64)
    steps = sweeps * free.size
    U = rng.integers(0, 2, size=(runs, m)).astype(np.int64)
    V = U.copy()
    V[:, 0] = 1 - U[:, 0]
    sites = free[rng.integers(0, free.size, size=(runs, steps))]
    u = rng.random((runs, steps, 3))
    outs = []
    for backend in (python, compiled):
        Ub, Vb = U.copy(), V.copy()
        out = np.zeros((runs, sweeps + 1), dtype=np.int64)
        backend.discrete_coupled_runs(Ub, Vb, *args, free, sites, u, free.size, out)
        outs.append((out, Ub, Vb))
    for a, b in zip(*outs):
        assert np.array_equal(a, b)


@needs_compiled
@given(seeds, st.integers(2, 40), st.floats(0, 1))
def test_theta_chain_agrees(seed, m, c):
    model = gibbs.ThetaChainModel(m, c)
    w = np.ascontiguousarray(model.weights)
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(-1, 1, size=m)
    sites = rng.integers(0, m, size=5 * m).astype(np.int64)
    u = rng.random(5 * m)
    xa, xb = x0.copy(), x0.copy()
    python.theta_chain_steps(xa, w, sites, u)
    compiled.theta_chain_steps(xb, w, sites, u)
    assert np.max(np.abs(xa - xb)) <= 1e-12
    fa = python.toeplitz_fields(xa, w)
    fb = np.asarray(compiled.toeplitz_fields(xa, w))
    assert np.max(np.abs(fa - fb)) <= 1e-12
    assert np.allclose(fa, model.theta_matrix() @ xa, atol=1e-12, rtol=0)


@needs_compiled
def test_benchmark_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    bench = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(bench)
    bench.main(["--repeat", "1"])
    assert "speedup" in capsys.readouterr().out
