"""Empirical and distributional tau/Rademacher/Gaussian complexities.

All quantities use the 1/m-normalized form

    Com_S(F) = E_tau [ sup_f (1/m) sum_i tau_i f(s_i) ].

The unnormalized variant is ``m * Com_S(F)`` (see ``unnormalized``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Sequence

import numpy as np

from ._config import DEFAULT_DRAWS, ENUMERATION_CAP
from .errors import EnumerationTooLarge, InputError
from .rng import as_generator

_NOISE_CHUNK = 256
_SUP_BUDGET = 1 << 22  # entries of the (|F|, draws) product held at once


@dataclass(frozen=True, eq=False)
class FunctionClass:
    """Finite class materialized as ``values[f, i] = f(s_i)``."""

    values: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise InputError(f"class values must be a nonempty |F| x m matrix, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InputError("class values must be finite")
        if self.labels is not None and len(self.labels) != v.shape[0]:
            raise InputError("one label per function")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    def scaled(self, factor: float) -> "FunctionClass":
        return FunctionClass(factor * self.values, self.labels)

    def shifted(self, vector) -> "FunctionClass":
        return FunctionClass(self.values + np.asarray(vector, dtype=float)[None, :], self.labels)

    def subset(self, rows: Sequence[int]) -> "FunctionClass":
        rows = list(rows)
        labels = None if self.labels is None else tuple(self.labels[r] for r in rows)
        return FunctionClass(self.values[rows], labels)

    @classmethod
    def from_functions(cls, functions: Sequence[Callable], points) -> "FunctionClass":
        pts = np.asarray(points)
        return cls(np.array([[f(p) for p in pts] for f in functions], dtype=float))


def zero_class(m: int) -> FunctionClass:
    return FunctionClass(np.zeros((1, m)))


def all_sign_patterns(m: int, cap: int = ENUMERATION_CAP) -> FunctionClass:
    if 2**m > cap:
        raise EnumerationTooLarge(2**m, cap)
    return FunctionClass(np.array(list(product((-1.0, 1.0), repeat=m))))


def threshold_class(points) -> FunctionClass:
    """Every behavior of x -> +1 iff x > t on the sample (at most m+1 rows)."""
    x = np.asarray(points, dtype=float).reshape(-1)
    cuts = np.concatenate([[-np.inf], np.unique(x)])
    return FunctionClass(np.where(x[None, :] > cuts[:, None], 1.0, -1.0))


@dataclass(frozen=True, eq=False)
class NoiseSpec:
    kind: str = "rademacher"
    sampler: Callable[[np.random.Generator, int, int], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("rademacher", "gaussian", "custom"):
            raise InputError(f"unknown noise kind {self.kind!r}")
        if self.kind == "custom" and self.sampler is None:
            raise InputError("custom noise needs a sampler(rng, n, m)")

    def draw(self, rng: np.random.Generator, n: int, m: int) -> np.ndarray:
        if self.kind == "rademacher":
            return np.where(rng.random((n, m)) < 0.5, -1.0, 1.0)
        if self.kind == "gaussian":
            return rng.standard_normal((n, m))
        out = np.asarray(self.sampler(rng, n, m), dtype=float)
        if out.shape != (n, m):
            raise InputError(f"custom sampler returned shape {out.shape}, expected {(n, m)}")
        return out


RADEMACHER = NoiseSpec("rademacher")
GAUSSIAN = NoiseSpec("gaussian")


@dataclass(frozen=True)
class ComplexityEstimate:
    mean: float
    stderr: float
    draws: int
    noise: NoiseSpec

    def to_dict(self) -> dict[str, Any]:
        return {"mean": self.mean, "stderr": self.stderr, "draws": self.draws, "kind": self.noise.kind}


def suprema(cls: FunctionClass, tau: np.ndarray) -> np.ndarray:
    """Per-draw ``max_f (1/m) <f, tau_d>`` for noise rows ``tau[d]``."""
    tau = np.atleast_2d(np.asarray(tau, dtype=float))
    if tau.shape[1] != cls.m:
        raise InputError(f"noise has {tau.shape[1]} coordinates, class has m={cls.m}")
    step = max(1, _SUP_BUDGET // cls.size)
    out = np.empty(tau.shape[0])
    for s in range(0, tau.shape[0], step):
        block = tau[s:s + step]
        out[s:s + step] = (cls.values @ block.T).max(axis=0) / cls.m
    return out


def noise_draws(noise: NoiseSpec, m: int, draws: int, rng) -> np.ndarray:
    """``draws`` noise vectors, generated in fixed-size chunks from ``rng``."""
    rng = as_generator(rng)
    parts = [noise.draw(rng, min(_NOISE_CHUNK, draws - s), m) for s in range(0, draws, _NOISE_CHUNK)]
    return np.concatenate(parts, axis=0) if parts else np.empty((0, m))


def _estimate(values: np.ndarray, noise: NoiseSpec) -> ComplexityEstimate:
    n = values.size
    se = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return ComplexityEstimate(float(values.mean()), se, n, noise)


def tau_complexity(cls: FunctionClass, noise: NoiseSpec = RADEMACHER, draws: int = DEFAULT_DRAWS,
                   rng=None) -> ComplexityEstimate:
    if draws < 1:
        raise InputError("draws must be >= 1")
    tau = noise_draws(noise, cls.m, draws, rng)
    return _estimate(suprema(cls, tau), noise)


def gaussian_complexity(cls: FunctionClass, draws: int = DEFAULT_DRAWS, rng=None) -> ComplexityEstimate:
    return tau_complexity(cls, GAUSSIAN, draws, rng)


def exact_rademacher(cls: FunctionClass, cap: int = ENUMERATION_CAP) -> float:
    """Average over all 2^m sign vectors of the per-vector supremum."""
    if 2**cls.m > cap:
        raise EnumerationTooLarge(2**cls.m, cap)
    signs = np.array(list(product((-1.0, 1.0), repeat=cls.m)))
    return float(suprema(cls, signs).mean())


def unnormalized(value: float, m: int) -> float:
    """Convert a 1/m-normalized complexity to the unnormalized convention."""
    return m * value


def distributional_complexity(sampler: Callable[[np.random.Generator], Sequence],
                              builder: Callable[[Sequence], FunctionClass],
                              outer_draws: int, inner_draws: int, rng,
                              noise: NoiseSpec = RADEMACHER) -> ComplexityEstimate:
    """Nested estimate of E_S[Com_S(F)] over samples S from ``sampler``.

    The stderr comes from the spread of the outer replicates; with a single
    outer draw it falls back to the inner estimate's stderr.
    """
    if outer_draws < 1 or inner_draws < 1:
        raise InputError("outer_draws and inner_draws must be >= 1")
    rng = as_generator(rng)
    inner = []
    for _ in range(outer_draws):
        cls = builder(sampler(rng))
        inner.append(tau_complexity(cls, noise, inner_draws, rng))
    means = np.array([e.mean for e in inner])
    if outer_draws == 1:
        return ComplexityEstimate(inner[0].mean, inner[0].stderr, inner_draws, noise)
    se = float(means.std(ddof=1) / math.sqrt(outer_draws))
    return ComplexityEstimate(float(means.mean()), se, outer_draws * inner_draws, noise)


def sigma_shuffle(s, s_prime, sigma):
    """T_i = s_i where sigma_i = +1, else s'_i."""
    s = np.asarray(s)
    s_prime = np.asarray(s_prime)
    return np.where(np.asarray(sigma) > 0, s, s_prime)


@dataclass(frozen=True)
class MixtureCheck:
    gc_shuffled: ComplexityEstimate
    gc_distribution: ComplexityEstimate
    factor: float
    difference_mean: float
    difference_stderr: float
    z: float = 3.0

    @property
    def passed(self) -> bool:
        return self.difference_mean <= self.z * self.difference_stderr + 1e-12

    def to_dict(self) -> dict[str, Any]:
        return {
            "gc_shuffled": self.gc_shuffled.to_dict(),
            "gc_distribution": self.gc_distribution.to_dict(),
            "factor": self.factor,
            "difference_mean": self.difference_mean,
            "difference_stderr": self.difference_stderr,
            "pass": self.passed,
        }


def gc_mixture_inequality_check(sampler: Callable[[np.random.Generator], Sequence],
                                builder: Callable[[Sequence], FunctionClass],
                                draws: int, rng, factor: float = 2.0) -> MixtureCheck:
    """Compare GC of the sigma-shuffled sample T with ``factor`` times GC of D^(m).

    Each draw uses one pair (S, S'), one sign vector and one Gaussian vector
    g; GC_T uses (T, g) and GC_D uses (S, g), so the difference is estimated
    with common random numbers and its stderr is the paired one.
    """
    if draws < 2:
        raise InputError("draws must be >= 2")
    rng = as_generator(rng)
    gt = np.empty(draws)
    gd = np.empty(draws)
    for d in range(draws):
        s = np.asarray(sampler(rng))
        s2 = np.asarray(sampler(rng))
        sigma = np.where(rng.random(s.shape[0]) < 0.5, -1, 1)
        g = rng.standard_normal((1, s.shape[0]))
        gt[d] = suprema(builder(sigma_shuffle(s, s2, sigma)), g)[0]
        gd[d] = suprema(builder(s), g)[0]
    diff = gt - factor * gd
    return MixtureCheck(
        gc_shuffled=_estimate(gt, GAUSSIAN),
        gc_distribution=_estimate(gd, GAUSSIAN),
        factor=factor,
        difference_mean=float(diff.mean()),
        difference_stderr=float(diff.std(ddof=1) / math.sqrt(draws)),
    )


__all__ = [
    "FunctionClass",
    "NoiseSpec",
    "ComplexityEstimate",
    "MixtureCheck",
    "RADEMACHER",
    "GAUSSIAN",
    "zero_class",
    "all_sign_patterns",
    "threshold_class",
    "suprema",
    "noise_draws",
    "tau_complexity",
    "gaussian_complexity",
    "exact_rademacher",
    "unnormalized",
    "distributional_complexity",
    "sigma_shuffle",
    "gc_mixture_inequality_check",
]
