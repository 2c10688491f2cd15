"""Compiled versus pure-Python kernels on identical pre-drawn randomness.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Each row
times one kernel in both backends and checks that they produce the same
result before reporting the speedup.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dobrushin_lab import gibbs, kernels, mrf


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def case_discrete_gibbs(backend, steps=20_000):
    model = mrf.chain_ising(32, 0.25)
    args = gibbs._kernel_args(model)
    rng = np.random.default_rng(0)
    x0 = rng.integers(0, 2, size=32).astype(np.int64)
    sites = rng.integers(0, 32, size=steps).astype(np.int64)
    u = rng.random(steps)

    def run():
        x = x0.copy()
        backend.discrete_gibbs_steps(x, *args, sites, u)
        return x

    return run


def case_coupled(backend, runs=50, sweeps=50):
    model = mrf.chain_ising(8, 0.25)
    args = gibbs._kernel_args(model)
    rng = np.random.default_rng(1)
    free = np.arange(2, 8, dtype=np.int64)
    steps = sweeps * free.size
    U = rng.integers(0, 2, size=(runs, 8)).astype(np.int64)
    U[:, :2] = 1
    V = U.copy()
    V[:, :2] = 0
    sites = free[rng.integers(0, free.size, size=(runs, steps))]
    u = rng.random((runs, steps, 3))

    def run():
        out = np.zeros((runs, sweeps + 1), dtype=np.int64)
        backend.discrete_coupled_runs(U.copy(), V.copy(), *args, free, sites, u, free.size, out)
        return out

    return run


def case_theta_chain(backend, m=256, sweeps=5):
    w = np.ascontiguousarray(gibbs.ThetaChainModel.tuned(m, 0.4).weights)
    rng = np.random.default_rng(2)
    x0 = rng.uniform(-1, 1, size=m)
    sites = rng.integers(0, m, size=sweeps * m).astype(np.int64)
    u = rng.random(sweeps * m)

    def run():
        x = x0.copy()
        backend.theta_chain_steps(x, w, sites, u)
        return x

    return run


CASES = {
    "discrete_gibbs_steps (m=32, 2e4 steps)": case_discrete_gibbs,
    "discrete_coupled_runs (m=8, 50 runs x 50 sweeps)": case_coupled,
    "theta_chain_steps (m=256, 5 sweeps)": case_theta_chain,
}


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    try:
        compiled = kernels.load("compiled")
    except ImportError:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    python = kernels.load("python")
    print(f"{'kernel':52s} {'python s':>10s} {'compiled s':>11s} {'speedup':>8s}")
    for name, case in CASES.items():
        tp, op = _time(case(python), args.repeat)
        tc, oc = _time(case(compiled), args.repeat)
        if not np.allclose(op, oc, atol=1e-12, rtol=0):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:52s} {tp:10.4f} {tc:11.5f} {tp / tc:7.0f}x")


if __name__ == "__main__":
    main()
