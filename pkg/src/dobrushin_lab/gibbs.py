"""Random-scan Gibbs sampling and greedy coupling of conditioned chains.

Two model families are supported: discrete ``PairwiseMrf`` instances and the
continuous interval chain ``ThetaChainModel`` whose single-site conditionals
have density proportional to ``exp(a * x)`` on [-1, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from . import kernels
from ._config import DEFAULT_BURN_IN
from ._parallel import ordered_map
from .errors import InputError, InvalidConditioning
from .mrf import PairwiseMrf, coefficients
from .rng import as_generator, child_seed, stream

Model = Any  # PairwiseMrf | ThetaChainModel

_CHUNK_RUNS = 500


@dataclass(frozen=True)
class ChainState:
    config: np.ndarray
    sweeps: int = 0

    def __post_init__(self):
        cfg = np.array(self.config)
        cfg.setflags(write=False)
        object.__setattr__(self, "config", cfg)


def _unit_weights(m: int) -> np.ndarray:
    d = np.arange(m, dtype=float)
    w = np.zeros(m)
    w[1:] = 1.0 / (d[1:] * np.log(d[1:] + 1.0) ** 2)
    return w


@dataclass(frozen=True)
class ThetaChainModel:
    """Interval-valued chain with couplings c / (|i-j| log^2(|i-j|+1)).

    Sites are stored 0..m-1; only distances matter, so this is the same law
    as indexing them -n..n. Labels are ``+1`` iff ``x > label_threshold``.
    """

    m: int
    c: float
    label_threshold: float = 0.0

    def __post_init__(self):
        if self.m < 1:
            raise InputError("ThetaChainModel needs m >= 1")
        if not math.isfinite(self.c) or self.c < 0:
            raise InputError("coupling constant c must be finite and nonnegative")

    @classmethod
    def from_half_width(cls, n: int, c: float, label_threshold: float = 0.0) -> "ThetaChainModel":
        return cls(2 * n + 1, c, label_threshold)

    @classmethod
    def tuned(cls, m: int, row_sum: float, reference_m: int | None = None, **kw) -> "ThetaChainModel":
        """Pick c so the largest row sum at ``reference_m`` (default m) equals ``row_sum``.

        Row sums grow with m, so tuning on the largest member of a family
        keeps every smaller member under the same ceiling.
        """
        ref = reference_m or m
        unit = float(_row_sums(_unit_weights(ref)).max()) if ref > 1 else 0.0
        c = row_sum / unit if unit > 0 else 0.0
        return cls(m, c, **kw)

    @cached_property
    def weights(self) -> np.ndarray:
        """``weights[d]`` is the coupling at distance ``d``; ``weights[0] = 0``."""
        w = self.c * _unit_weights(self.m)
        w.setflags(write=False)
        return w

    def theta(self, i: int, j: int) -> float:
        return 0.0 if i == j else float(self.weights[abs(i - j)])

    def theta_matrix(self) -> np.ndarray:
        idx = np.arange(self.m)
        return self.weights[np.abs(idx[:, None] - idx[None, :])]

    def row_sums(self) -> np.ndarray:
        return _row_sums(self.weights)

    @property
    def max_row_sum(self) -> float:
        return float(self.row_sums().max())

    def label_fn(self, x):
        return np.where(np.asarray(x) > self.label_threshold, 1, -1)


def _row_sums(w: np.ndarray) -> np.ndarray:
    # sum_{j != i} w[|i-j|] = C[i] + C[m-1-i] with C the cumulative sum of w[1:]
    m = w.size
    cum = np.concatenate([[0.0], np.cumsum(w[1:])])
    i = np.arange(m)
    return cum[i] + cum[m - 1 - i]


def _is_theta(model) -> bool:
    return isinstance(model, ThetaChainModel)


def _model_m(model) -> int:
    return model.m


def _kernel_args(model: PairwiseMrf):
    ptr, idx, psi = model.csr
    phi = np.ascontiguousarray(model.node_potentials)
    return phi, ptr, idx, psi


def random_initial_state(model: Model, rng: np.random.Generator) -> np.ndarray:
    if _is_theta(model):
        return rng.uniform(-1.0, 1.0, size=model.m)
    return rng.integers(0, model.q, size=model.m).astype(np.int64)


def _advance(model: Model, x: np.ndarray, sites: np.ndarray, u: np.ndarray) -> None:
    if _is_theta(model):
        kernels.theta_chain_steps(x, np.ascontiguousarray(model.weights), sites, u)
    else:
        kernels.discrete_gibbs_steps(x, *_kernel_args(model), sites, u)


def tilted_interval_sample(a: float, rng: np.random.Generator, size: int | None = None):
    """Exact draw(s) from the density proportional to exp(a x) on [-1, 1]."""
    if not math.isfinite(a):
        raise InputError("tilt must be finite")
    if size is None:
        return kernels.tilted_inverse(float(a), float(rng.random()))
    u = rng.random(size)
    return np.array([kernels.tilted_inverse(float(a), float(v)) for v in u])


def tilted_cdf(t, a):
    """CDF at ``t`` of the density proportional to exp(a x) on [-1, 1] (vectorized in a)."""
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    a = np.asarray(a, dtype=float)
    small = np.abs(a) < 1e-8
    safe = np.where(small, 1.0, a)
    # (e^{a t} - e^{-a}) / (e^{a} - e^{-a}) written without overflow
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return _tilted_cdf_core(t, a, small, safe)


def _tilted_cdf_core(t, a, small, safe):
    pos = safe > 0
    num_pos = np.expm1(safe * (t - 1.0)) - np.expm1(-2.0 * safe)
    den_pos = -np.expm1(-2.0 * safe)
    num_neg = np.expm1(safe * (t + 1.0))
    den_neg = np.expm1(2.0 * safe)
    exact = np.where(pos, num_pos / den_pos, num_neg / np.where(pos, 1.0, den_neg))
    approx = (t + 1.0) / 2.0 + a * (t * t - 1.0) / 4.0
    return np.where(small, approx, exact)


def gibbs_step(model: Model, state: ChainState, rng: np.random.Generator) -> ChainState:
    """Resample one uniformly chosen site from its exact conditional."""
    x = np.array(state.config, dtype=float if _is_theta(model) else np.int64)
    if x.shape != (_model_m(model),):
        raise InputError(f"state has shape {x.shape}, model has m={_model_m(model)}")
    sites = np.array([rng.integers(model.m)], dtype=np.int64)
    u = np.array([rng.random()])
    _advance(model, x, sites, u)
    return ChainState(x, state.sweeps + 1)


def run_chain(model: Model, x: np.ndarray, steps: int, rng: np.random.Generator,
              block: int = 1 << 16) -> np.ndarray:
    """Advance ``x`` in place by ``steps`` single-site updates."""
    m = model.m
    done = 0
    while done < steps:
        n = min(block, steps - done)
        sites = rng.integers(0, m, size=n).astype(np.int64)
        u = rng.random(n)
        _advance(model, x, sites, u)
        done += n
    return x


def gibbs_sample(model: Model, burn_in: int, thin: int, count: int, rng,
                 init: Sequence | None = None) -> np.ndarray:
    """``count`` configurations: first after ``burn_in*m`` steps, then every ``thin*m``."""
    if burn_in < 0 or thin < 0 or count < 0:
        raise InputError("burn_in, thin and count must be nonnegative")
    rng = as_generator(rng)
    m = model.m
    dtype = float if _is_theta(model) else np.int64
    out = np.empty((count, m), dtype=dtype)
    if count == 0:
        return out
    x = random_initial_state(model, rng) if init is None else np.array(init, dtype=dtype)
    run_chain(model, x, burn_in * m, rng)
    for s in range(count):
        if s > 0:
            run_chain(model, x, thin * m, rng)
        out[s] = x
    return out


def certified_burn_in(m: int, alpha: float, eps: float = 1e-3) -> int:
    """Sweeps after which the coupling bound m exp(-(1-alpha) T) drops below ``eps``.

    Each random-scan step shrinks the expected Hamming distance between two
    greedily coupled chains by a factor ``1 - (1-alpha)/m``.
    """
    if not 0 <= alpha < 1:
        raise InputError("a certified burn-in needs alpha < 1")
    return max(1, math.ceil((math.log(max(m, 1)) - math.log(eps)) / (1.0 - alpha)))


def doubling_agrees(first: float, first_se: float, second: float, second_se: float,
                    z: float = 3.0) -> bool:
    """Statistics at burn-in and at twice the burn-in agree within z combined stderr."""
    return abs(first - second) <= z * math.hypot(first_se, second_se) + 1e-12


def tv_optimal_coupled_draw(p, q, rng) -> tuple[int, int]:
    """Draw (a, b) with marginals p and q and Pr[a != b] = d_TV(p, q)."""
    p = np.ascontiguousarray(p, dtype=float)
    q = np.ascontiguousarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise InputError("p and q must be vectors over the same alphabet")
    if np.any(p < 0) or np.any(q < 0) or abs(p.sum() - 1) > 1e-9 or abs(q.sum() - 1) > 1e-9:
        raise InputError("p and q must be probability vectors")
    u0, u1, u2 = as_generator(rng).random(3)
    a, b = kernels.maximal_coupled_draw(p, q, float(u0), float(u1), float(u2))
    return int(a), int(b)


def _prefix(model: PairwiseMrf, k: int, a: Sequence[int], name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=np.int64).reshape(-1)
    if arr.size != k:
        raise InvalidConditioning(f"{name} has {arr.size} entries, expected k={k}")
    if np.any(arr < 0) or np.any(arr >= model.q):
        raise InvalidConditioning(f"{name} has states outside the alphabet")
    return arr


def _coupled_setup(model: PairwiseMrf, k: int, a, a_prime):
    if not isinstance(model, PairwiseMrf):
        raise InputError("coupled runs need a discrete PairwiseMrf")
    if not 0 <= k < model.m:
        raise InputError(f"prefix size k={k} must leave at least one free site (m={model.m})")
    return _prefix(model, k, a, "a"), _prefix(model, k, a_prime, "a_prime")


def _coupled_chunk(model: PairwiseMrf, k: int, pa: np.ndarray, pb: np.ndarray, sweeps: int,
                   seed: int, first: int, count: int, return_states: bool = False):
    """Runs ``first .. first+count-1``, each on its own stream; trace has sweeps+1 columns."""
    m = model.m
    free = np.arange(k, m, dtype=np.int64)
    nfree = free.size
    steps = sweeps * nfree
    U = np.empty((count, m), dtype=np.int64)
    sites = np.empty((count, steps), dtype=np.int64)
    u = np.empty((count, steps, 3))
    for r in range(count):
        g = stream(seed, first + r)
        U[r, k:] = g.integers(0, model.q, size=nfree)
        sites[r] = free[g.integers(0, nfree, size=steps)]
        u[r] = g.random((steps, 3))
    U[:, :k] = pa
    V = U.copy()
    V[:, :k] = pb
    out = np.zeros((count, sweeps + 1), dtype=np.int64)
    if steps:
        kernels.discrete_coupled_runs(U, V, *_kernel_args(model), free, sites, u, nfree, out)
    if return_states:
        return out, U, V
    return out


def coupled_gibbs_run(model: PairwiseMrf, k: int, a, a_prime, sweeps: int, rng,
                      trace: bool = False, return_states: bool = False):
    """Two conditioned chains from a shared start, coupled site by site.

    Nodes ``0..k-1`` are pinned to ``a`` (first chain) and ``a_prime``
    (second). Each step picks the same free site in both chains and draws
    the pair from the maximal coupling of the two conditionals. A sweep is
    ``m - k`` steps. Returns the final Hamming distance over free sites, or
    the per-sweep distances when ``trace`` is set.
    """
    pa, pb = _coupled_setup(model, k, a, a_prime)
    seed = child_seed(as_generator(rng))
    out, U, V = _coupled_chunk(model, k, pa, pb, sweeps, seed, 0, 1, return_states=True)
    result = out[0] if trace else int(out[0, -1])
    if return_states:
        return result, U[0], V[0]
    return result


@dataclass(frozen=True)
class CouplingStats:
    k: int
    alpha: float
    runs: int
    sweeps: int
    mean_hamming: float
    stderr: float
    bound: float
    trace_mean: np.ndarray = field(repr=False)
    trace_stderr: np.ndarray = field(repr=False)
    burn_in: int = 0
    doubling_ok: bool = True

    @property
    def passed(self) -> bool:
        """Bound respected at 3 stderr at every recorded sweep."""
        if not math.isfinite(self.bound):
            return False
        return bool(np.all(self.trace_mean <= self.bound + 3.0 * self.trace_stderr))

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "alpha": self.alpha,
            "runs": self.runs,
            "sweeps": self.sweeps,
            "burn_in": self.burn_in,
            "mean": self.mean_hamming,
            "stderr": self.stderr,
            "bound": self.bound if math.isfinite(self.bound) else "inf",
            "doubling_ok": bool(self.doubling_ok),
            "pass": self.passed,
        }


def _chunk_task(args):
    return _coupled_chunk(*args)


def coupling_experiment(model: PairwiseMrf, k: int, a, a_prime, runs: int, sweeps: int, rng,
                        burn_in: int | None = None, workers: int = 1,
                        alpha: float | None = None) -> CouplingStats:
    """Aggregate ``runs`` coupled runs; run r uses the stream keyed by r."""
    if runs < 1 or sweeps < 0:
        raise InputError("runs must be >= 1 and sweeps >= 0")
    pa, pb = _coupled_setup(model, k, a, a_prime)
    if alpha is None:
        alpha = coefficients(model).alpha
    seed = child_seed(as_generator(rng))
    tasks = [
        (model, k, pa, pb, sweeps, seed, first, min(_CHUNK_RUNS, runs - first))
        for first in range(0, runs, _CHUNK_RUNS)
    ]
    traces = np.concatenate(ordered_map(_chunk_task, tasks, workers), axis=0).astype(float)
    mean = traces.mean(axis=0)
    se = traces.std(axis=0, ddof=1) / math.sqrt(runs) if runs > 1 else np.zeros_like(mean)
    bound = k * alpha / (1.0 - alpha) if alpha < 1 else math.inf
    if burn_in is None:
        burn_in = min(DEFAULT_BURN_IN, sweeps // 2)
    ok = True
    if 0 < burn_in and 2 * burn_in <= sweeps:
        ok = bool(doubling_agrees(mean[burn_in], se[burn_in], mean[2 * burn_in], se[2 * burn_in]))
    return CouplingStats(
        k=k,
        alpha=float(alpha),
        runs=runs,
        sweeps=sweeps,
        mean_hamming=float(mean[-1]),
        stderr=float(se[-1]),
        bound=bound,
        trace_mean=mean,
        trace_stderr=se,
        burn_in=burn_in,
        doubling_ok=ok,
    )


def theta_chain_draw(model: ThetaChainModel, sweeps: int, rng) -> np.ndarray:
    """One configuration after ``sweeps`` sweeps from a uniform start."""
    rng = as_generator(rng)
    x = rng.uniform(-1.0, 1.0, size=model.m)
    return run_chain(model, x, sweeps * model.m, rng)


def site_fields(model: ThetaChainModel, x: np.ndarray) -> np.ndarray:
    """Tilt ``sum_j theta_ij x_j`` of every site's conditional."""
    return kernels.toeplitz_fields(np.ascontiguousarray(x, dtype=float),
                                   np.ascontiguousarray(model.weights))


__all__ = [
    "ChainState",
    "ThetaChainModel",
    "CouplingStats",
    "gibbs_step",
    "gibbs_sample",
    "run_chain",
    "random_initial_state",
    "tilted_interval_sample",
    "tilted_cdf",
    "certified_burn_in",
    "doubling_agrees",
    "tv_optimal_coupled_draw",
    "coupled_gibbs_run",
    "coupling_experiment",
    "theta_chain_draw",
    "site_fields",
]
