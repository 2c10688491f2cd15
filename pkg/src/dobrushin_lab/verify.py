"""Exact and tail-frequency checks of the influence, coupling and complexity lemmas.

Every check returns a ``LemmaCheckReport`` whose ``max_violation`` is the
largest signed amount by which an inequality was broken (negative means
slack), so ``passed`` is simply ``max_violation <= tolerance``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from scipy import integrate

from . import gibbs
from ._config import ENUMERATION_CAP, TOL
from .errors import EnumerationTooLarge, GuardFailure, InputError, PositivityViolation, SchemaError
from .mrf import (
    Alphabet,
    JointTable,
    PairwiseMrf,
    all_configs,
    coefficients,
    condition,
    conditioning_events,
    dobrushin_coefficient,
    exact_joint,
    log_influence,
    random_pairwise_mrf,
)
from .rng import as_generator, stream


@dataclass(frozen=True)
class LemmaCheckReport:
    lemma: str
    instances: int
    max_violation: float
    tolerance: float
    details: dict = field(default_factory=dict)
    seed: int | None = None

    @property
    def passed(self) -> bool:
        return bool(self.max_violation <= self.tolerance)

    def to_dict(self) -> dict[str, Any]:
        return {
            "lemma": self.lemma,
            "instances": self.instances,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "seed": self.seed,
            "details": _jsonable(self.details),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def merge_reports(lemma: str, reports: Sequence[LemmaCheckReport], seed: int | None = None) -> LemmaCheckReport:
    """Combine per-instance reports in instance order."""
    if not reports:
        return LemmaCheckReport(lemma, 0, -math.inf, TOL.compare, {}, seed)
    worst = max(range(len(reports)), key=lambda r: reports[r].max_violation)
    return LemmaCheckReport(
        lemma,
        sum(r.instances for r in reports),
        reports[worst].max_violation,
        max(r.tolerance for r in reports),
        {"worst_instance": worst, "worst": reports[worst].details},
        seed,
    )


# -- bounded differences -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class BoundedDifferenceSpec:
    """``f`` maps a configuration of alphabet labels to a real number."""

    f: Callable[[np.ndarray], float]
    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lambdas, dtype=float)
        if lam.ndim != 1 or np.any(lam < 0) or not np.all(np.isfinite(lam)):
            raise InputError("lambdas must be a vector of finite nonnegative reals")
        object.__setattr__(self, "lambdas", lam)

    @property
    def m(self) -> int:
        return self.lambdas.size

    def evaluate(self, configs: np.ndarray) -> np.ndarray:
        configs = np.atleast_2d(configs)
        return np.array([float(self.f(c)) for c in configs])

    def spot_check(self, labels: Sequence, rng, pairs: int = 1000) -> None:
        """Test the Lipschitz certificate on random configuration pairs."""
        rng = as_generator(rng)
        vals = np.asarray(labels)
        a = rng.integers(0, len(vals), size=(pairs, self.m))
        b = a.copy()
        for r in range(pairs):
            flip = rng.random(self.m) < rng.random()
            b[r, flip] = rng.integers(0, len(vals), size=int(flip.sum()))
        fa = self.evaluate(vals[a])
        fb = self.evaluate(vals[b])
        allowed = ((a != b) * self.lambdas[None, :]).sum(axis=1)
        excess = np.abs(fa - fb) - allowed
        if np.any(excess > TOL.identity):
            r = int(np.argmax(excess))
            raise GuardFailure(
                f"bounded-difference certificate fails: |f(w)-f(w')| exceeds "
                f"sum lambda_i 1[w_i != w'_i] by {excess[r]:.3g} on pair {r}"
            )


# -- influence and conditioning ---------------------------------------------

def check_influence_chain(model: PairwiseMrf) -> LemmaCheckReport:
    """Dobrushin influence <= log-influence <= beta for every ordered pair."""
    rep = coefficients(model)
    first = rep.dobrushin - rep.log_influence
    second = rep.log_influence - rep.beta
    off = ~np.eye(model.m, dtype=bool)
    worst = max(float(first[off].max(initial=-math.inf)), float(second[off].max(initial=-math.inf)))
    if model.m == 1:
        worst = 0.0
    return LemmaCheckReport(
        "influence_chain", 1, worst, TOL.compare,
        {"alpha": rep.alpha, "alpha_log": rep.alpha_log, "beta": rep.beta_total},
    )


def check_conditioning_preserves_alpha(model: PairwiseMrf, fixed: Mapping[int, int]) -> LemmaCheckReport:
    table = exact_joint(model)
    base = dobrushin_coefficient(table)
    cond = dobrushin_coefficient(condition(table, fixed))
    return LemmaCheckReport(
        "conditioning", 1, cond - base, TOL.compare,
        {"alpha": base, "alpha_conditioned": cond, "fixed": dict(fixed)},
    )


def check_conditioning_all(model: PairwiseMrf, sizes=(1, 2)) -> LemmaCheckReport:
    """Every assignment to 1 or 2 nodes (all have positive mass for finite potentials)."""
    table = exact_joint(model)
    base = dobrushin_coefficient(table)
    worst, count, worst_fixed = -math.inf, 0, None
    for fixed in conditioning_events(model.m, model.q, [s for s in sizes if s < model.m]):
        v = dobrushin_coefficient(condition(table, fixed)) - base
        count += 1
        if v > worst:
            worst, worst_fixed = v, fixed
    return LemmaCheckReport("conditioning", count, worst, TOL.compare,
                            {"alpha": base, "worst_fixed": worst_fixed})


# -- cross-ratio inequality --------------------------------------------------

def _lemma8_sides(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m11, m1n, mn1, mnn = M[:, 0], M[:, 1], M[:, 2], M[:, 3]
    lhs = np.abs(m11 / (m11 + mn1) - m1n / (m1n + mnn))
    log_ratio = np.log(m11) + np.log(mnn) - np.log(m1n) - np.log(mn1)
    return lhs, np.abs(log_ratio) / 4.0


def check_lemma8(M) -> LemmaCheckReport:
    """``M`` is (M[1,1], M[1,-1], M[-1,1], M[-1,-1]), or an (n, 4) batch.

    Checks |M11/(M11+M-11) - M1-1/(M1-1+M-1-1)| <= |log cross-ratio| / 4.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[1] != 4:
        raise InputError("the cross-ratio check takes quadruples (M11, M1-1, M-11, M-1-1)")
    if not np.all(np.isfinite(M)) or np.any(M <= 0):
        bad = int(np.argmax(~(np.isfinite(M).all(axis=1) & (M > 0).all(axis=1))))
        raise PositivityViolation(f"quadruple {bad} has a nonpositive entry: {M[bad].tolist()}")
    lhs, rhs = _lemma8_sides(M)
    v = lhs - rhs
    r = int(np.argmax(v))
    return LemmaCheckReport("lemma8", M.shape[0], float(v[r]), TOL.identity,
                            {"worst_M": M[r], "lhs": float(lhs[r]), "rhs": float(rhs[r])})


def random_lemma8_quadruples(rng, n: int, low: float = -5.0, high: float = 5.0) -> np.ndarray:
    return np.exp(as_generator(rng).uniform(low, high, size=(n, 4)))


# -- sigma shuffle -----------------------------------------------------------

def sigma_shuffle_laws(table: JointTable):
    """Exact conditional law of sigma given each (T, T') with positive mass.

    Yields ``(T, T', probs)`` with ``probs`` over sign vectors in the order of
    ``all_configs(2, m)`` (index 0 is -1, index 1 is +1).
    """
    q, m = table.q, table.m
    cfgs = all_configs(q, m)
    signs = all_configs(2, m)
    p = table.probabilities
    for t_code, tp_code in product(range(q**m), repeat=2):
        t, tp = cfgs[t_code], cfgs[tp_code]
        keep = signs == 1
        s = np.where(keep, t[None, :], tp[None, :])
        s2 = np.where(keep, tp[None, :], t[None, :])
        mass = p[_codes(s, q)] * p[_codes(s2, q)]
        total = mass.sum()
        if total > 0:
            yield t, tp, mass / total


def _codes(cfgs: np.ndarray, q: int) -> np.ndarray:
    w = q ** np.arange(cfgs.shape[1] - 1, -1, -1)
    return cfgs @ w


def check_sigma_shuffle(model: PairwiseMrf, cap: int = ENUMERATION_CAP) -> LemmaCheckReport:
    """Zero mean, sign symmetry and log-influence at most twice that of D^(m)."""
    q, m = model.q, model.m
    if m > 3 or q != 2:
        raise InputError("sigma-shuffle enumeration is for binary models with m <= 3")
    if (q**m) ** 2 * 2**m > cap:
        raise EnumerationTooLarge((q**m) ** 2 * 2**m, cap)
    table = exact_joint(model)
    base = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            if i != j:
                base[i, j] = log_influence(table, j, i)
    sign_vals = 2 * all_configs(2, m) - 1
    mean_dev, sym_dev, ratio_excess, max_ratio, laws = 0.0, 0.0, -math.inf, 0.0, 0
    pm1 = Alphabet.ising()
    for _, _, probs in sigma_shuffle_laws(table):
        laws += 1
        mean_dev = max(mean_dev, float(np.abs(probs @ sign_vals).max()))
        sym_dev = max(sym_dev, float(np.abs(probs - probs[::-1]).max()))
        law = JointTable.from_probabilities(pm1, m, probs)
        for i in range(m):
            for j in range(m):
                if i == j:
                    continue
                li = log_influence(law, j, i)
                ratio_excess = max(ratio_excess, li - 2.0 * base[i, j])
                if base[i, j] > 0:
                    max_ratio = max(max_ratio, li / base[i, j])
    if m == 1:
        ratio_excess = 0.0
    # the zero-mean and symmetry identities are exact arithmetic: tolerance 1e-12
    worst = max(mean_dev - TOL.identity, sym_dev - TOL.identity, ratio_excess - TOL.compare)
    return LemmaCheckReport(
        "sigma_shuffle", laws, worst, 0.0,
        {"mean_deviation": mean_dev, "symmetry_deviation": sym_dev,
         "log_influence_excess": ratio_excess, "max_ratio": max_ratio},
    )


# -- concentration -----------------------------------------------------------

def _binomial_slack(bound: np.ndarray, n: int, z: float = 3.0) -> np.ndarray:
    b = np.clip(bound, 0.0, 1.0)
    return b + z * np.sqrt(b * (1.0 - b) / n)


def check_concentration(model: PairwiseMrf, spec: BoundedDifferenceSpec, samples: int,
                        t_grid: Sequence[float], rng, alpha: float | None = None,
                        guard_pairs: int = 1000) -> LemmaCheckReport:
    """Empirical P(|f - E f| >= t) against 2 exp(-(1-alpha) t^2 / (2 sum lambda^2)).

    Draws are exact (inverse CDF over the enumerated joint) when the joint
    is enumerable, in which case E f is also exact; otherwise a Gibbs chain
    with certified burn-in supplies draws and E f is the sample mean.
    """
    if spec.m != model.m:
        raise InputError("bounded-difference spec and model disagree on m")
    rng = as_generator(rng)
    labels = np.asarray(model.alphabet.labels)
    spec.spot_check(labels, rng, guard_pairs)
    exact = model.q**model.m <= ENUMERATION_CAP
    if exact:
        table = exact_joint(model)
        if alpha is None:
            alpha = coefficients(model).alpha
        fvals = spec.evaluate(labels[table.configs()])
        mean = float(table.probabilities @ fvals)
        draws = table.sample(rng, samples)
        fx = fvals[_codes(draws, model.q)]
    else:
        if alpha is None:
            raise InputError("alpha must be supplied when the joint is not enumerable")
        burn = gibbs.certified_burn_in(model.m, alpha)
        draws = gibbs.gibbs_sample(model, burn, 1, samples, rng)
        fx = spec.evaluate(labels[draws])
        mean = float(fx.mean())
    if not alpha < 1:
        raise InputError("the concentration bound needs alpha < 1")
    t = np.asarray(t_grid, dtype=float)
    lam2 = float(np.sum(spec.lambdas**2))
    if lam2 == 0:
        bound = np.where(t > 0, 0.0, 2.0)
    else:
        bound = 2.0 * np.exp(-(1.0 - alpha) * t**2 / (2.0 * lam2))
    freq = np.array([np.mean(np.abs(fx - mean) >= tt) for tt in t])
    v = freq - _binomial_slack(bound, samples)
    return LemmaCheckReport(
        "concentration", samples, float(v.max()), 0.0,
        {"alpha": alpha, "t": t, "frequency": freq, "bound": bound, "exact_sampling": exact, "mean": mean},
    )


# -- conditional mean shift --------------------------------------------------

def check_conditional_mean_shift(model: PairwiseMrf, loss_values: Sequence[float],
                                 subset: Sequence[int], R: float = 1.0) -> LemmaCheckReport:
    """|E L_S(h) - E[L_S(h) | S_I]| <= (2 - alpha) R |I| / ((1 - alpha) m) for every S_I.

    ``loss_values[z]`` is the loss of h at an example whose state is z, so
    L_S(h) = (1/m) sum_i loss_values[z_i].
    """
    loss = np.asarray(loss_values, dtype=float)
    if loss.shape != (model.q,):
        raise InputError(f"loss_values must have length q={model.q}")
    if np.any(np.abs(loss) > R + TOL.identity):
        raise InputError("loss values exceed the stated range R")
    subset = sorted(set(int(i) for i in subset))
    table = exact_joint(model)
    alpha = dobrushin_coefficient(table)
    if alpha >= 1:
        raise InputError("the mean-shift bound needs alpha < 1")
    m = model.m
    base = sum(float(table.marginal(i) @ loss) for i in range(m)) / m
    bound = (2.0 - alpha) * R * len(subset) / ((1.0 - alpha) * m)
    worst = 0.0
    for states in product(range(model.q), repeat=len(subset)):
        fixed = dict(zip(subset, states))
        if not fixed:
            break
        cond = condition(table, fixed)
        total = sum(loss[z] for z in states)
        total += sum(float(cond.marginal(a) @ loss) for a in range(cond.m))
        worst = max(worst, abs(total / m - base))
    return LemmaCheckReport(
        "conditional_mean_shift", 1, worst - bound, TOL.compare,
        {"shift": worst, "bound": bound, "alpha": alpha, "subset": subset},
    )


# -- symmetrization ----------------------------------------------------------

def check_symmetrization(model: PairwiseMrf, class_values, cap: int = ENUMERATION_CAP) -> LemmaCheckReport:
    """E sup_f (1/m)(sum f(s_i) - E sum f) <= E sup_f (1/m)(sum f(s_i) - sum f(s'_i)).

    ``class_values[f, z]`` is f evaluated at state z. Both sides are exact
    sums over the enumerated laws of S and of the independent pair (S, S').
    """
    vals = np.atleast_2d(np.asarray(class_values, dtype=float))
    q, m = model.q, model.m
    if vals.shape[1] != q:
        raise InputError(f"class values must have q={q} columns")
    if q ** (2 * m) > cap:
        raise EnumerationTooLarge(q ** (2 * m), cap)
    table = exact_joint(model)
    p = table.probabilities
    cfgs = table.configs()
    sums = vals[:, cfgs].sum(axis=2) / m  # [f, config]
    means = sums @ p
    lhs = float(p @ (sums - means[:, None]).max(axis=0))
    diff = sums[:, :, None] - sums[:, None, :]
    rhs = float(np.einsum("a,b,ab->", p, p, diff.max(axis=0)))
    v = max(lhs - rhs, -lhs)
    return LemmaCheckReport("symmetrization", 1, v, TOL.identity, {"lhs": lhs, "rhs": rhs})


# -- slow-mixing claim -------------------------------------------------------

def joint_positive_probability(theta: float, epsabs: float = 1e-12) -> tuple[float, float]:
    """Pr(x > 0, y > 0) under the density proportional to exp(theta x y) on [-1, 1]^2.

    Returns the value and a bound on its absolute quadrature error.
    """
    f = lambda y, x: math.exp(theta * x * y)  # noqa: E731
    num, e1 = integrate.dblquad(f, 0.0, 1.0, 0.0, 1.0, epsabs=epsabs, epsrel=1e-13)
    den, e2 = integrate.dblquad(f, -1.0, 1.0, -1.0, 1.0, epsabs=epsabs, epsrel=1e-13)
    err = e1 / den + num * e2 / den**2
    if not err <= 1e-10:
        raise ArithmeticError(f"quadrature did not converge for theta={theta} (error {err:.3g})")
    return num / den, err


def check_claim_slow_mixing(theta_grid: Sequence[float], small: float = 0.1) -> LemmaCheckReport:
    """|Pr(E_0, E_k) - 1/4 - theta/16| <= theta^2 for theta <= ``small``; increasing in theta."""
    thetas = np.asarray(sorted(theta_grid), dtype=float)
    if np.any(thetas < 0) or np.any(thetas > 0.5):
        raise InputError("theta must lie in [0, 0.5]")
    probs, errs = zip(*(joint_positive_probability(t) for t in thetas)) if thetas.size else ((), ())
    probs = np.array(probs)
    dev = np.abs(probs - 0.25 - thetas / 16.0)
    excess = np.where(thetas <= small, dev - thetas**2, -np.inf)
    mono = float(np.max(probs[:-1] - probs[1:], initial=-np.inf)) if probs.size > 1 else -np.inf
    worst = float(max(np.max(excess, initial=-np.inf), mono))
    return LemmaCheckReport(
        "slow_mixing", int(thetas.size), worst, 0.0,
        {"theta": thetas, "probability": probs, "deviation": dev, "quadrature_error": np.array(errs)},
    )


# -- subGaussian directions --------------------------------------------------

def check_subgaussian_direction(sampler: Callable[[np.random.Generator, int], np.ndarray], K2: float,
                                directions, t_grid: Sequence[float], draws: int, rng) -> LemmaCheckReport:
    """P(|<theta, X>| >= t) <= 2 exp(-t^2 / (2 K2 |theta|^2)) + 3 binomial stderr."""
    if K2 <= 0:
        raise InputError("K2 must be positive")
    rng = as_generator(rng)
    X = np.asarray(sampler(rng, draws), dtype=float)
    dirs = np.atleast_2d(np.asarray(directions, dtype=float))
    if dirs.shape[1] != X.shape[1]:
        raise InputError("directions must match the sample dimension")
    t = np.asarray(t_grid, dtype=float)
    proj = np.abs(X @ dirs.T)  # [draw, direction]
    norms2 = (dirs**2).sum(axis=1)
    freq = (proj[:, :, None] >= t[None, None, :]).mean(axis=0)
    bound = 2.0 * np.exp(-t[None, :] ** 2 / (2.0 * K2 * norms2[:, None]))
    v = freq - _binomial_slack(bound, draws)
    return LemmaCheckReport("subgaussian", draws, float(v.max()), 0.0, {"frequency": freq, "bound": bound})


# -- random instances and suites ---------------------------------------------

def random_model(rng, m: int, q: int, alpha_target: float | None = None,
                 low: float = math.exp(-2), high: float = math.exp(2)) -> PairwiseMrf:
    """Log-uniform potentials; with ``alpha_target`` the pair potentials are rescaled by bisection."""
    rng = as_generator(rng)
    model = random_pairwise_mrf(rng, m, q, low, high)
    if alpha_target is None or m < 2:
        return model
    if not 0 < alpha_target < 1:
        raise InputError("alpha_target must lie in (0, 1)")
    lo, hi = -30.0, 10.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if coefficients(model.scaled(math.exp(mid))).alpha < alpha_target:
            lo = mid
        else:
            hi = mid
    return model.scaled(math.exp(lo))


def _instances(entry: Mapping[str, Any]):
    n = int(entry.get("instances", 1))
    seed = int(entry.get("seed", 0))
    params = dict(entry.get("generator", {}))
    ms = params.get("m", [3])
    qs = params.get("q", [2])
    ms = ms if isinstance(ms, list) else [ms]
    qs = qs if isinstance(qs, list) else [qs]
    for r in range(n):
        g = stream(seed, r)
        m = int(ms[int(g.integers(len(ms)))])
        q = int(qs[int(g.integers(len(qs)))])
        yield r, g, random_model(g, m, q, params.get("alpha_target"))


def ising_chain_model(m: int, theta: float) -> PairwiseMrf:
    from .mrf import chain_ising

    return chain_ising(m, theta)


def run_entry(entry: Mapping[str, Any]) -> LemmaCheckReport:
    """One manifest entry: ``{lemma, generator, instances, seed, ...}``."""
    try:
        return _run_entry(entry)
    except (TypeError, KeyError, IndexError) as exc:
        raise SchemaError(f"manifest entry {entry.get('lemma')!r} is malformed: {exc}") from None


def _run_entry(entry: Mapping[str, Any]) -> LemmaCheckReport:
    lemma = entry.get("lemma")
    seed = int(entry.get("seed", 0))
    if lemma == "influence_chain":
        return merge_reports(lemma, [check_influence_chain(mod) for _, _, mod in _instances(entry)], seed)
    if lemma == "conditioning":
        return merge_reports(lemma, [check_conditioning_all(mod) for _, _, mod in _instances(entry)], seed)
    if lemma == "lemma8":
        parts = []
        if "M" in entry:
            parts.append(check_lemma8(entry["M"]))
        n = int(entry.get("instances", 0))
        if n:
            parts.append(check_lemma8(random_lemma8_quadruples(stream(seed, 0), n)))
        return merge_reports(lemma, parts, seed)
    if lemma == "sigma_shuffle":
        thetas = entry.get("thetas", [0.1, 0.3, 0.5])
        sizes = entry.get("m", [2, 3])
        from .mrf import ising_model

        reps = []
        for m in sizes:
            for th in thetas:
                couplings = {(i, j): th for i in range(m) for j in range(i + 1, m)}
                reps.append(check_sigma_shuffle(ising_model(m, couplings)))
        return merge_reports(lemma, reps, seed)
    if lemma == "concentration":
        m = int(entry.get("m", 6))
        theta = float(entry.get("theta", 0.25))
        model = ising_chain_model(m, theta)
        spec = BoundedDifferenceSpec(lambda z: float(np.sum(z)), np.full(m, 2.0))
        t_grid = entry.get("t", list(range(1, 7)))
        return check_concentration(model, spec, int(entry.get("samples", 100_000)), t_grid, stream(seed, 0))
    if lemma == "conditional_mean_shift":
        reps = []
        loss = entry.get("loss_values", [0.0, 1.0])
        for _, g, mod in _instances(entry):
            size = int(entry.get("subset_size", 1))
            subset = sorted(g.choice(mod.m, size=min(size, mod.m), replace=False).tolist())
            lv = (list(loss) + [1.0] * mod.q)[: mod.q]
            reps.append(check_conditional_mean_shift(mod, lv, subset))
        return merge_reports(lemma, reps, seed)
    if lemma == "symmetrization":
        reps = []
        n_f = int(entry.get("functions", 3))
        for _, g, mod in _instances(entry):
            reps.append(check_symmetrization(mod, g.uniform(-1, 1, size=(n_f, mod.q))))
        return merge_reports(lemma, reps, seed)
    if lemma == "slow_mixing":
        return check_claim_slow_mixing(entry.get("thetas", [0.01, 0.02, 0.05, 0.1]))
    if lemma == "subgaussian":
        m = int(entry.get("m", 8))
        kind = entry.get("sampler", "gaussian")
        if kind == "gaussian":
            sampler = lambda g, n: g.standard_normal((n, m))  # noqa: E731
        elif kind == "rademacher":
            sampler = lambda g, n: np.where(g.random((n, m)) < 0.5, -1.0, 1.0)  # noqa: E731
        else:
            raise InputError(f"unknown sampler {kind!r}")
        dirs = np.eye(m)[:1].tolist() + [list(np.ones(m) / math.sqrt(m))]
        return check_subgaussian_direction(sampler, float(entry.get("K2", 1.0)), dirs,
                                           entry.get("t", [0.5, 1.0, 2.0, 3.0]),
                                           int(entry.get("draws", 20_000)), stream(seed, 0))
    raise InputError(f"unknown lemma {lemma!r} in manifest")


LEMMAS = (
    "influence_chain", "conditioning", "lemma8", "sigma_shuffle", "concentration",
    "conditional_mean_shift", "symmetrization", "slow_mixing", "subgaussian",
)


__all__ = [
    "LemmaCheckReport",
    "BoundedDifferenceSpec",
    "LEMMAS",
    "merge_reports",
    "check_influence_chain",
    "check_conditioning_preserves_alpha",
    "check_conditioning_all",
    "check_lemma8",
    "random_lemma8_quadruples",
    "sigma_shuffle_laws",
    "check_sigma_shuffle",
    "check_concentration",
    "check_conditional_mean_shift",
    "check_symmetrization",
    "joint_positive_probability",
    "check_claim_slow_mixing",
    "check_subgaussian_direction",
    "random_model",
    "run_entry",
]
