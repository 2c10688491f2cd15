"""Hypothesis classes, ERM, sample compression, and generalization experiments.

Labels are in {-1, +1}. Thresholds predict ``+1`` iff ``x > t``; intervals
predict ``+1`` on the closed set ``[lo, hi]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Sequence

import numpy as np
from scipy import stats

from . import gibbs
from ._parallel import ordered_map
from .errors import EnumerationTooLarge, InputError
from .gibbs import ThetaChainModel
from .mrf import PairwiseMrf, chain_ising, exact_joint, inverse_temperature, path_marginals
from .rng import as_generator, child_seed, stream

INF = math.inf


# -- samples and losses ------------------------------------------------------

def _check_labels(y) -> np.ndarray:
    y = np.asarray(y)
    if not np.all((y == 1) | (y == -1)):
        raise InputError("labels must be -1 or +1")
    return y.astype(np.int64)


@dataclass(frozen=True, eq=False)
class LabeledSample:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(-1)
        y = _check_labels(np.array(self.y).reshape(-1))
        if x.shape != y.shape:
            raise InputError("covariates and labels must have equal length")
        if not np.all(np.isfinite(x)):
            raise InputError("covariates must be finite")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def m(self) -> int:
        return self.x.size

    def subset(self, indices: Sequence[int]) -> "LabeledSample":
        idx = np.asarray(list(indices), dtype=np.int64)
        return LabeledSample(self.x[idx], self.y[idx])

    @classmethod
    def from_pairs(cls, pairs) -> "LabeledSample":
        pairs = list(pairs)
        if not pairs:
            return cls(np.empty(0), np.empty(0, dtype=np.int64))
        x, y = zip(*pairs)
        return cls(np.array(x), np.array(y))


def zero_one_loss(y_hat, y):
    """1 where the prediction differs from the label."""
    y_hat = _check_labels(y_hat)
    y = _check_labels(y)
    out = (y_hat != y).astype(np.int64)
    return int(out) if out.ndim == 0 else out


# -- hypotheses --------------------------------------------------------------

@dataclass(frozen=True)
class Threshold:
    t: float

    def predict(self, x) -> np.ndarray:
        return np.where(np.asarray(x, dtype=float) > self.t, 1, -1)

    def positive_set(self) -> list[tuple[float, float]]:
        return [] if self.t == INF else [(self.t, INF)]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def predict(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.lo) & (x <= self.hi), 1, -1)

    def positive_set(self) -> list[tuple[float, float]]:
        return [] if self.empty else [(self.lo, self.hi)]


EMPTY_INTERVAL = Interval(INF, -INF)


@dataclass(frozen=True)
class ExplicitHypothesis:
    index: int
    domain: tuple
    table: tuple

    def predict(self, x) -> np.ndarray:
        lookup = dict(zip(self.domain, self.table))
        xs = np.atleast_1d(np.asarray(x))
        try:
            out = np.array([lookup[v.item() if hasattr(v, "item") else v] for v in xs], dtype=np.int64)
        except KeyError as exc:
            raise InputError(f"point {exc.args[0]!r} is outside the hypothesis domain") from None
        return out if np.ndim(x) else out[0]


def _groups(sample: LabeledSample):
    """Distinct sorted covariates with per-group label counts and first index."""
    values, first, inverse = np.unique(sample.x, return_index=True, return_inverse=True)
    pos = np.bincount(inverse, weights=(sample.y == 1), minlength=values.size)
    neg = np.bincount(inverse, weights=(sample.y == -1), minlength=values.size)
    # np.unique's return_index gives the first occurrence of each value
    return values, first, pos.astype(np.int64), neg.astype(np.int64)


@dataclass(frozen=True, eq=False)
class HypothesisClass:
    """``kind`` is one of ``one_sided_threshold``, ``interval``, ``finite_explicit``."""

    kind: str
    domain: tuple | None = None
    table: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("one_sided_threshold", "interval", "finite_explicit"):
            raise InputError(f"unknown hypothesis class {self.kind!r}")
        if self.kind == "finite_explicit":
            if self.domain is None or self.table is None:
                raise InputError("finite_explicit classes need a domain and a table")
            tab = _check_labels(np.atleast_2d(self.table))
            if tab.shape[1] != len(self.domain):
                raise InputError("table columns must match the domain")
            tab.setflags(write=False)
            object.__setattr__(self, "domain", tuple(self.domain))
            object.__setattr__(self, "table", tab)

    def candidates(self, sample: LabeledSample) -> list:
        """Every behavior on the sample, in canonical (tie-break) order."""
        if self.kind == "finite_explicit":
            return [self.hypothesis(r) for r in range(self.table.shape[0])]
        values = np.unique(sample.x)
        if self.kind == "one_sided_threshold":
            mids = (values[:-1] + values[1:]) / 2.0
            return [Threshold(-INF), *(Threshold(float(t)) for t in mids), Threshold(INF)]
        out = [EMPTY_INTERVAL]
        for lo in range(values.size):
            for hi in range(lo, values.size):
                out.append(Interval(float(values[lo]), float(values[hi])))
        return out

    def hypothesis(self, row: int) -> ExplicitHypothesis:
        return ExplicitHypothesis(row, self.domain, tuple(int(v) for v in self.table[row]))

    def behaviors(self, points) -> np.ndarray:
        """Prediction matrix of every canonical candidate on ``points``."""
        pts = np.asarray(points)
        if self.kind == "finite_explicit":
            col = {v: c for c, v in enumerate(self.domain)}
            return self.table[:, [col[p.item() if hasattr(p, "item") else p] for p in pts]]
        dummy = LabeledSample(pts.astype(float), np.ones(pts.size, dtype=np.int64))
        return np.array([h.predict(pts) for h in self.candidates(dummy)])


THRESHOLDS = HypothesisClass("one_sided_threshold")
INTERVALS = HypothesisClass("interval")


def empirical_loss(h, sample: LabeledSample, loss: Callable = zero_one_loss) -> float:
    if sample.m == 0:
        raise InputError("empirical loss of an empty sample is undefined")
    return float(np.mean(loss(h.predict(sample.x), sample.y)))


def _threshold_erm(sample: LabeledSample):
    values, first, pos, neg = _groups(sample)
    # cut c: groups < c predicted -1, groups >= c predicted +1
    left_pos = np.concatenate([[0], np.cumsum(pos)])
    right_neg = np.concatenate([np.cumsum(neg[::-1])[::-1], [0]])
    losses = left_pos + right_neg
    c = int(np.argmin(losses))
    return c, values, first, int(losses[c])


def _threshold_from_cut(c: int, values: np.ndarray) -> Threshold:
    if c == 0:
        return Threshold(-INF)
    if c == values.size:
        return Threshold(INF)
    return Threshold(float((values[c - 1] + values[c]) / 2.0))


def _interval_erm(sample: LabeledSample):
    values, first, pos, neg = _groups(sample)
    score = pos - neg
    prefix = np.concatenate([[0], np.cumsum(score)])
    g = values.size
    total = prefix[None, 1:] - prefix[:-1, None]  # [lo, hi] -> score of groups lo..hi
    total = np.where(np.triu(np.ones((g, g), dtype=bool)), total, np.iinfo(np.int64).min)
    flat = int(np.argmax(total)) if g else 0
    best = int(total.flat[flat]) if g else 0
    base = int(pos.sum())
    if best <= 0:
        return None, values, first, base
    lo, hi = divmod(flat, g)
    return (lo, hi), values, first, base - best


def erm(hclass: HypothesisClass, sample: LabeledSample, loss: Callable = zero_one_loss):
    """Empirical risk minimizer; ties go to the first canonical candidate."""
    if sample.m == 0:
        raise InputError("ERM needs a nonempty sample")
    if loss is zero_one_loss and hclass.kind == "one_sided_threshold":
        c, values, _, _ = _threshold_erm(sample)
        return _threshold_from_cut(c, values)
    if loss is zero_one_loss and hclass.kind == "interval":
        span, values, _, _ = _interval_erm(sample)
        if span is None:
            return EMPTY_INTERVAL
        return Interval(float(values[span[0]]), float(values[span[1]]))
    cands = hclass.candidates(sample)
    losses = [empirical_loss(h, sample, loss) for h in cands]
    return cands[int(np.argmin(losses))]


# -- compression -------------------------------------------------------------

def _threshold_compress(sample: LabeledSample) -> tuple[int, ...]:
    c, _, first, _ = _threshold_erm(sample)
    return () if c == 0 else (int(first[c - 1]),)


def _threshold_reconstruct(sub: LabeledSample) -> Threshold:
    if sub.m == 0:
        return Threshold(-INF)
    return Threshold(float(sub.x.max()))


def _interval_compress(sample: LabeledSample) -> tuple[int, ...]:
    span, _, first, _ = _interval_erm(sample)
    if span is None:
        return ()
    lo, hi = span
    return (int(first[lo]),) if lo == hi else (int(first[lo]), int(first[hi]))


def _interval_reconstruct(sub: LabeledSample) -> Interval:
    if sub.m == 0:
        return EMPTY_INTERVAL
    return Interval(float(sub.x.min()), float(sub.x.max()))


@dataclass(frozen=True)
class CompressionScheme:
    """Compressor keeps at most ``size`` points; reconstructor maps them to a hypothesis."""

    name: str
    size: int
    compress: Callable[[LabeledSample], tuple[int, ...]] = field(repr=False)
    reconstruct: Callable[[LabeledSample], Any] = field(repr=False)
    hclass: HypothesisClass = field(repr=False, default=THRESHOLDS)

    def fit(self, sample: LabeledSample):
        return self.reconstruct(sample.subset(self.compress(sample)))


THRESHOLD_SCHEME = CompressionScheme("threshold", 1, _threshold_compress, _threshold_reconstruct, THRESHOLDS)
INTERVAL_SCHEME = CompressionScheme("interval", 2, _interval_compress, _interval_reconstruct, INTERVALS)

SCHEMES = {"threshold": THRESHOLD_SCHEME, "interval": INTERVAL_SCHEME}


def threshold_compression(sample: LabeledSample):
    """(kept indices, reconstructed threshold) for the size-1 scheme."""
    idx = _threshold_compress(sample)
    return idx, _threshold_reconstruct(sample.subset(idx))


def interval_compression(sample: LabeledSample):
    """(kept indices, reconstructed interval) for the size-2 scheme."""
    idx = _interval_compress(sample)
    return idx, _interval_reconstruct(sample.subset(idx))


def vc_dimension(hclass, domain=None, cap: int = 24) -> int:
    """Largest shattered subset of ``domain``, by brute force.

    ``hclass`` is a ``HypothesisClass`` (then ``domain`` lists the points) or
    a raw ``(hypotheses, points)`` matrix of +-1 predictions.
    """
    if isinstance(hclass, HypothesisClass):
        if domain is None:
            raise InputError("a domain is required")
        mat = hclass.behaviors(domain)
    else:
        mat = _check_labels(np.atleast_2d(hclass))
    n = mat.shape[1]
    if n > cap:
        raise EnumerationTooLarge(2**n, 2**cap)
    bits = (mat > 0).astype(np.int64)
    best = 0
    for d in range(1, n + 1):
        if 2**d > mat.shape[0]:
            break
        weights = 1 << np.arange(d)
        if not any(np.unique(bits[:, list(sub)] @ weights).size == 2**d for sub in combinations(range(n), d)):
            break
        best = d
    return best


# -- population loss ---------------------------------------------------------

@dataclass(frozen=True)
class LossEstimate:
    value: float
    stderr: float
    mode: str

    def __float__(self) -> float:
        return self.value


def _default_label(v):
    return np.where(np.asarray(v, dtype=float) > 0, 1, -1)


def _expected_loss(h, x, label_fn, flip_prob, loss):
    f = label_fn(x)
    pred = h.predict(x)
    return (1.0 - flip_prob) * loss(pred, f) + flip_prob * loss(pred, -f)


def population_loss(h, model, label_fn: Callable | None = None, mode: str = "exact",
                    loss: Callable = zero_one_loss, flip_prob: float = 0.0,
                    draws: int = 10_000, burn_in: int = 100, rng=None) -> LossEstimate:
    """L_D(h) under the average single-site marginal D of ``model``.

    Covariates are the alphabet labels (discrete models) or site values
    (interval chains). Label noise flips ``label_fn(x)`` with ``flip_prob``
    and is integrated exactly.
    """
    label_fn = label_fn or (model.label_fn if isinstance(model, ThetaChainModel) else _default_label)
    if mode == "exact":
        if not isinstance(model, PairwiseMrf):
            raise InputError("exact population loss needs a discrete model")
        table = exact_joint(model)
        d = np.mean([table.marginal(i) for i in range(model.m)], axis=0)
        vals = np.asarray(model.alphabet.labels)
        per = np.asarray(_expected_loss(h, vals, label_fn, flip_prob, loss), dtype=float)
        return LossEstimate(float(d @ per), 0.0, mode)
    if mode != "monte_carlo":
        raise InputError(f"unknown mode {mode!r}")
    rng = as_generator(rng)
    if isinstance(model, ThetaChainModel):
        xs = gibbs.gibbs_sample(model, burn_in, 1, draws, rng)
    else:
        idx = gibbs.gibbs_sample(model, burn_in, 1, draws, rng)
        xs = np.asarray(model.alphabet.labels)[idx]
    per = np.asarray(_expected_loss(h, xs.reshape(-1), label_fn, flip_prob, loss), dtype=float)
    per = per.reshape(draws, -1).mean(axis=1)
    se = float(per.std(ddof=1) / math.sqrt(draws)) if draws > 1 else 0.0
    return LossEstimate(float(per.mean()), se, mode)


# -- generalization experiments ----------------------------------------------

@dataclass(frozen=True)
class ThetaChainFamily:
    """Interval chains with c tuned so the largest row sum at ``reference_m`` is ``row_sum``.

    Setting ``c`` overrides the tuning (``c=0`` is the i.i.d. control).
    """

    row_sum: float = 0.4
    reference_m: int | None = None
    c: float | None = None
    label_threshold: float = 0.0
    kind: str = "theta_chain"

    def model(self, m: int) -> ThetaChainModel:
        if self.c is not None:
            return ThetaChainModel(m, self.c, self.label_threshold)
        return ThetaChainModel.tuned(m, self.row_sum, self.reference_m or m,
                                     label_threshold=self.label_threshold)

    def alpha_bound(self, m: int) -> float:
        return self.model(m).max_row_sum


@dataclass(frozen=True)
class DiscreteChainFamily:
    """Chain Ising on {-1,+1} with uniform edge weight; covariates are the spins."""

    theta: float
    field: float = 0.0
    label_threshold: float = 0.0
    kind: str = "discrete"

    def model(self, m: int) -> PairwiseMrf:
        return chain_ising(m, self.theta, self.field)

    def alpha_bound(self, m: int) -> float:
        return inverse_temperature(self.model(m))


def _interval_mass(cdf, lo: float, hi: float) -> float:
    return float(max(0.0, cdf(hi) - cdf(lo)))


def _set_mass(cdf, intervals) -> float:
    return sum(_interval_mass(cdf, lo, hi) for lo, hi in intervals)


def _intersect(a, b):
    out = []
    for lo1, hi1 in a:
        for lo2, hi2 in b:
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if lo < hi:
                out.append((lo, hi))
    return out


class _ContinuousMarginal:
    """Average marginal CDF of an interval chain, Rao-Blackwellized over site conditionals.

    Each site's indicator 1[x_i <= t] is replaced by its conditional
    probability given the other sites, averaged over reference chains and
    symmetrized with x -> -x.
    """

    def __init__(self, fields: np.ndarray, label_threshold: float, flip_prob: float):
        self.fields = np.ascontiguousarray(fields.reshape(-1))
        self.t_star = label_threshold
        self.flip = flip_prob
        self._zero = not np.any(self.fields)

    def cdf(self, t: float) -> float:
        if t == INF:
            return 1.0
        if t == -INF:
            return 0.0
        if self._zero:
            return float(np.clip((t + 1.0) / 2.0, 0.0, 1.0))
        up = float(np.mean(gibbs.tilted_cdf(t, self.fields)))
        down = float(np.mean(gibbs.tilted_cdf(-t, self.fields)))
        return 0.5 * (up + 1.0 - down)

    def loss(self, h) -> float:
        h_pos = h.positive_set()
        f_pos = Threshold(self.t_star).positive_set()
        disagree = _set_mass(self.cdf, h_pos) + _set_mass(self.cdf, f_pos) \
            - 2.0 * _set_mass(self.cdf, _intersect(h_pos, f_pos))
        return self.flip + (1.0 - 2.0 * self.flip) * min(1.0, max(0.0, disagree))


class _DiscreteMarginal:
    def __init__(self, model: PairwiseMrf, label_threshold: float, flip_prob: float):
        self.values = np.asarray(model.alphabet.labels, dtype=float)
        self.d = path_marginals(model).mean(axis=0)
        self.t_star = label_threshold
        self.flip = flip_prob

    def loss(self, h) -> float:
        f = np.where(self.values > self.t_star, 1, -1)
        per = _expected_loss(h, self.values, lambda v: f, self.flip, zero_one_loss)
        return float(self.d @ per)


def _reference_fields(task):
    model, burn, seed, mi, first, count = task
    out = np.empty((count, model.m))
    for r in range(count):
        x = gibbs.theta_chain_draw(model, burn, stream(seed, 1, mi, first + r))
        out[r] = gibbs.site_fields(model, x)
    return out


def _trial_chunk(task):
    family, scheme, m, mi, burn, seed, first, count, flip, marginal = task
    model = family.model(m)
    gaps, train, pop = [], [], []
    for r in range(first, first + count):
        g = stream(seed, 0, mi, r)
        if isinstance(model, ThetaChainModel):
            x = gibbs.theta_chain_draw(model, burn, g)
        else:
            idx = gibbs.gibbs_sample(model, burn, 0, 1, g)[0]
            x = np.asarray(model.alphabet.labels, dtype=float)[idx]
        f = np.where(x > family.label_threshold, 1, -1)
        y = np.where(g.random(m) < flip, -f, f)
        sample = LabeledSample(x, y)
        h = scheme.fit(sample)
        ls = empirical_loss(h, sample)
        ld = marginal.loss(h)
        train.append(ls)
        pop.append(ld)
        gaps.append(abs(ls - ld))
    return np.array(gaps), np.array(train), np.array(pop)


def compression_gap_bound(m: int, k: int, delta: float, C_alpha: float = 1.0, R: float = 1.0) -> float:
    """C(alpha) R sqrt((k log m + log(1/delta)) / m)."""
    return C_alpha * R * math.sqrt((k * math.log(m) + math.log(1.0 / delta)) / m)


@dataclass(frozen=True)
class GeneralizationReport:
    m_grid: tuple[int, ...]
    trials: int
    mean_gap: np.ndarray
    stderr: np.ndarray
    bound: np.ndarray
    slope: float
    slope_stderr: float
    intercept: float
    alpha_bound: np.ndarray
    burn_in: tuple[int, ...]
    mean_train_loss: np.ndarray
    mean_population_loss: np.ndarray
    C_alpha: float = 1.0
    delta: float = 0.05
    extra: dict = field(default_factory=dict)

    @property
    def within_bound(self) -> bool:
        return bool(np.all(self.mean_gap <= self.bound))

    def rows(self) -> list[dict]:
        return [
            {"m": m, "mean_gap": float(g), "stderr": float(s), "bound": float(b)}
            for m, g, s, b in zip(self.m_grid, self.mean_gap, self.stderr, self.bound)
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "m_grid": list(self.m_grid),
            "trials": self.trials,
            "rows": self.rows(),
            "slope": self.slope,
            "slope_stderr": self.slope_stderr,
            "intercept": self.intercept,
            "alpha_bound": self.alpha_bound.tolist(),
            "burn_in": list(self.burn_in),
            "C_alpha": self.C_alpha,
            "delta": self.delta,
            "within_bound": self.within_bound,
            **self.extra,
        }


def fit_loglog_slope(m_grid, gaps) -> tuple[float, float, float]:
    """Least-squares slope, its stderr and intercept of log(gap) on log(m)."""
    lm = np.log(np.asarray(m_grid, dtype=float))
    lg = np.log(np.maximum(np.asarray(gaps, dtype=float), 1e-300))
    if lm.size < 2:
        return float("nan"), float("nan"), float("nan")
    if np.all(np.asarray(gaps) == 0):
        return 0.0, 0.0, -INF
    fit = stats.linregress(lm, lg)
    se = float(fit.stderr) if lm.size > 2 else float("nan")
    return float(fit.slope), se, float(fit.intercept)


def generalization_experiment(family, scheme: CompressionScheme, m_grid: Sequence[int], trials: int,
                              rng, flip_prob: float = 0.1, burn_in: int | None = None,
                              burn_eps: float = 1e-3, reference_sites: int = 131_072,
                              min_reference_chains: int = 20, C_alpha: float = 1.0,
                              delta: float = 0.05, workers: int = 1,
                              chunk: int = 25) -> GeneralizationReport:
    """Mean |L_S(h) - L_D(h)| of the compressed hypothesis across a grid of m.

    Trial r at grid index i draws from the stream keyed (0, i, r), and the
    reference chains for L_D use keys (1, i, r), so results do not depend on
    the worker count. Burn-in defaults to the certified value for the
    family's alpha bound.
    """
    if trials < 1 or not m_grid:
        raise InputError("need trials >= 1 and a nonempty m grid")
    if not 0 <= flip_prob < 0.5:
        raise InputError("flip_prob must lie in [0, 0.5)")
    seed = child_seed(as_generator(rng))
    means, ses, bounds, alphas, burns, tr, po = [], [], [], [], [], [], []
    for mi, m in enumerate(m_grid):
        model = family.model(m)
        alpha = family.alpha_bound(m)
        burn = burn_in if burn_in is not None else gibbs.certified_burn_in(m, alpha, burn_eps)
        if isinstance(model, ThetaChainModel):
            n_ref = max(min_reference_chains, reference_sites // m)
            if model.c == 0:
                fields = np.zeros((1, m))
            else:
                tasks = [(model, burn, seed, mi, s, min(chunk, n_ref - s)) for s in range(0, n_ref, chunk)]
                fields = np.concatenate(ordered_map(_reference_fields, tasks, workers), axis=0)
            marginal = _ContinuousMarginal(fields, family.label_threshold, flip_prob)
        else:
            marginal = _DiscreteMarginal(model, family.label_threshold, flip_prob)
        tasks = [
            (family, scheme, m, mi, burn, seed, s, min(chunk, trials - s), flip_prob, marginal)
            for s in range(0, trials, chunk)
        ]
        parts = ordered_map(_trial_chunk, tasks, workers)
        gaps = np.concatenate([p[0] for p in parts])
        means.append(gaps.mean())
        ses.append(gaps.std(ddof=1) / math.sqrt(trials) if trials > 1 else 0.0)
        tr.append(np.concatenate([p[1] for p in parts]).mean())
        po.append(np.concatenate([p[2] for p in parts]).mean())
        bounds.append(compression_gap_bound(m, scheme.size, delta, C_alpha))
        alphas.append(alpha)
        burns.append(burn)
    slope, slope_se, intercept = fit_loglog_slope(m_grid, means)
    return GeneralizationReport(
        m_grid=tuple(int(m) for m in m_grid),
        trials=trials,
        mean_gap=np.array(means),
        stderr=np.array(ses),
        bound=np.array(bounds),
        slope=slope,
        slope_stderr=slope_se,
        intercept=intercept,
        alpha_bound=np.array(alphas),
        burn_in=tuple(burns),
        mean_train_loss=np.array(tr),
        mean_population_loss=np.array(po),
        C_alpha=C_alpha,
        delta=delta,
    )


# -- closed-form bounds ------------------------------------------------------

def pac_sample_size(k: int, epsilon: float, delta: float, alpha: float, C_alpha: float = 1.0) -> float:
    """(C(alpha) k log(k/eps^2) + log(1/delta)) / ((1 - alpha) eps^2)."""
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise InputError("epsilon and delta must lie in (0, 1)")
    if not 0 <= alpha < 1:
        raise InputError("alpha must lie in [0, 1)")
    if k < 1:
        raise InputError("k must be >= 1")
    return (C_alpha * k * math.log(k / epsilon**2) + math.log(1.0 / delta)) / ((1.0 - alpha) * epsilon**2)


def mohri_bound(m: int, d: float, beta_fn: Callable[[int], float], delta: float, L: float = 1.0) -> float:
    """Best blocking bound over splits 2*mu*a = m with delta > 2(mu-1)beta(a).

    Uses sqrt(d/mu) in place of the block Rademacher complexity; returns
    infinity when no split is feasible.
    """
    best = INF
    for a in range(1, m // 2 + 1):
        if m % (2 * a):
            continue
        mu = m // (2 * a)
        slack = delta - 2.0 * (mu - 1) * beta_fn(a)
        if slack <= 0:
            continue
        val = math.sqrt(d / mu) + L * math.sqrt(math.log(2.0 / slack) / (2.0 * mu))
        best = min(best, val)
    return best


def sample_complexity_table(epsilons: Sequence[float], deltas: Sequence[float],
                            dims: Sequence[float]) -> list[dict[str, float]]:
    """Rows comparing d^2/(delta eps^4) with (d + log(1/delta))/eps^2 (unit constants)."""
    rows = []
    for d in dims:
        for eps in epsilons:
            for delta in deltas:
                if d <= 0 or eps <= 0 or delta <= 0:
                    raise InputError("grids must be positive")
                # rational arithmetic on the decimal inputs, rounded once
                fd, fe, ft = (Fraction(repr(float(v))) for v in (d, eps, delta))
                prior = float(fd**2 / (ft * fe**4))
                this = (d + math.log(1.0 / delta)) / eps**2
                rows.append({"d": d, "epsilon": eps, "delta": delta,
                             "m_prior": prior, "m_this": this, "ratio": prior / this})
    return rows


__all__ = [
    "LabeledSample",
    "Threshold",
    "Interval",
    "EMPTY_INTERVAL",
    "ExplicitHypothesis",
    "HypothesisClass",
    "THRESHOLDS",
    "INTERVALS",
    "CompressionScheme",
    "THRESHOLD_SCHEME",
    "INTERVAL_SCHEME",
    "SCHEMES",
    "LossEstimate",
    "ThetaChainFamily",
    "DiscreteChainFamily",
    "GeneralizationReport",
    "zero_one_loss",
    "empirical_loss",
    "erm",
    "threshold_compression",
    "interval_compression",
    "vc_dimension",
    "population_loss",
    "compression_gap_bound",
    "fit_loglog_slope",
    "generalization_experiment",
    "pac_sample_size",
    "mohri_bound",
    "sample_complexity_table",
]
