"""Pairwise-potential Markov random fields over finite alphabets.

Exact joints are materialized as log-weight tables over all ``q**m``
configurations (node 0 is the most significant digit), which makes every
supremum in the influence definitions a finite maximum.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from scipy.special import logsumexp

from ._config import ENUMERATION_CAP
from .errors import (
    EnumerationTooLarge,
    InputError,
    InvalidConditioning,
    PositivityViolation,
    SchemaError,
)


@dataclass(frozen=True)
class Alphabet:
    labels: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(labels) < 2:
            raise InputError("an alphabet needs at least two states")
        if len(set(labels)) != len(labels):
            raise InputError(f"alphabet labels must be distinct, got {labels}")
        object.__setattr__(self, "labels", labels)

    @property
    def q(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"{label!r} is not in the alphabet {self.labels}") from None

    def values(self) -> np.ndarray:
        """Labels as a float array (numeric alphabets only)."""
        try:
            return np.asarray(self.labels, dtype=float)
        except (TypeError, ValueError):
            raise InputError(f"alphabet {self.labels} is not numeric") from None

    @classmethod
    def ising(cls) -> "Alphabet":
        return cls((-1, 1))


def _check_cap(q: int, m: int, cap: int) -> int:
    count = q**m
    if count > cap:
        raise EnumerationTooLarge(count, cap)
    return count


def all_configs(q: int, m: int, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """Every configuration as a ``(q**m, m)`` index array, in table order."""
    count = _check_cap(q, m, cap)
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.arange(count)
    return np.stack(np.unravel_index(idx, (q,) * m), axis=1).astype(np.int64)


def encode(configs: np.ndarray, q: int) -> np.ndarray:
    """Mixed-radix code of each configuration (rows of ``configs``)."""
    configs = np.atleast_2d(configs)
    m = configs.shape[1]
    if m == 0:
        return np.zeros(configs.shape[0], dtype=np.int64)
    return np.ravel_multi_index(tuple(configs.T), (q,) * m).astype(np.int64)


@dataclass(frozen=True, eq=False)
class PairwiseMrf:
    """Distribution proportional to exp(sum_i phi_i(z_i) + sum_{i<j} psi_ij(z_i, z_j)).

    ``pair_potentials`` may be given with keys in either orientation; it is
    stored keyed by ``(min, max)``, transposing tables passed as ``(j, i)``.
    """

    alphabet: Alphabet
    node_potentials: np.ndarray
    pair_potentials: Mapping[tuple[int, int], np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        q = self.alphabet.q
        phi = np.array(self.node_potentials, dtype=float)
        if phi.ndim != 2 or phi.shape[1] != q or phi.shape[0] < 1:
            raise InputError(f"node_potentials must have shape (m, {q}), got {phi.shape}")
        if not np.all(np.isfinite(phi)):
            raise InputError("node potentials must be finite")
        m = phi.shape[0]
        pairs: dict[tuple[int, int], np.ndarray] = {}
        for key, table in dict(self.pair_potentials).items():
            i, j = (int(k) for k in key)
            if i == j or not (0 <= i < m and 0 <= j < m):
                raise InputError(f"invalid pair ({i}, {j}) for m={m}")
            t = np.array(table, dtype=float)
            if t.shape != (q, q):
                raise InputError(f"pair ({i}, {j}) table must be {q}x{q}, got {t.shape}")
            if not np.all(np.isfinite(t)):
                raise InputError(f"pair ({i}, {j}) table has non-finite entries")
            if i > j:
                i, j, t = j, i, t.T
            if (i, j) in pairs:
                raise InputError(f"pair {{{i}, {j}}} given more than once")
            t.setflags(write=False)
            pairs[(i, j)] = t
        phi.setflags(write=False)
        object.__setattr__(self, "node_potentials", phi)
        object.__setattr__(self, "pair_potentials", dict(sorted(pairs.items())))

    @property
    def m(self) -> int:
        return self.node_potentials.shape[0]

    @property
    def q(self) -> int:
        return self.alphabet.q

    def psi(self, i: int, j: int) -> np.ndarray:
        """psi_ij as a table indexed ``[z_i, z_j]``; zeros when the pair is absent."""
        if i == j:
            raise InputError("psi is defined for distinct nodes only")
        if i < j:
            t = self.pair_potentials.get((i, j))
            return np.zeros((self.q, self.q)) if t is None else t
        t = self.pair_potentials.get((j, i))
        return np.zeros((self.q, self.q)) if t is None else t.T

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Neighbor lists ``(ptr, idx, psi)`` with ``psi[e] = psi_{i, idx[e]}`` for e in row i."""
        rows: list[list[tuple[int, np.ndarray]]] = [[] for _ in range(self.m)]
        for (i, j), t in self.pair_potentials.items():
            rows[i].append((j, t))
            rows[j].append((i, t.T))
        ptr = np.zeros(self.m + 1, dtype=np.int64)
        idx, tabs = [], []
        for i, row in enumerate(rows):
            row.sort(key=lambda e: e[0])
            ptr[i + 1] = ptr[i] + len(row)
            for j, t in row:
                idx.append(j)
                tabs.append(t)
        idx_arr = np.array(idx, dtype=np.int64)
        psi = np.ascontiguousarray(np.array(tabs, dtype=float).reshape(-1, self.q, self.q))
        return ptr, idx_arr, psi

    def scaled(self, factor: float) -> "PairwiseMrf":
        """Same node potentials, every pair potential multiplied by ``factor``."""
        return PairwiseMrf(
            self.alphabet,
            self.node_potentials,
            {k: factor * t for k, t in self.pair_potentials.items()},
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "alphabet": list(self.alphabet.labels),
            "m": self.m,
            "node_potentials": self.node_potentials.tolist(),
            "pair_potentials": [
                {"i": i, "j": j, "table": t.tolist()} for (i, j), t in self.pair_potentials.items()
            ],
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "PairwiseMrf":
        return model_from_dict(doc)


def model_from_dict(doc: Mapping[str, Any]) -> PairwiseMrf:
    """Build a model from the JSON document layout, with actionable errors."""
    if not isinstance(doc, Mapping):
        raise SchemaError("model document must be a JSON object")
    for key in ("alphabet", "m"):
        if key not in doc:
            raise SchemaError(f"model document is missing required field '{key}'")
    labels = doc["alphabet"]
    if not isinstance(labels, list) or len(labels) < 2:
        raise SchemaError("'alphabet' must be a list of at least two labels")
    m = doc["m"]
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise SchemaError("'m' must be a positive integer")
    q = len(labels)
    phi = doc.get("node_potentials", [[0.0] * q for _ in range(m)])
    if not isinstance(phi, list) or len(phi) != m:
        raise SchemaError(f"'node_potentials' must be a list of m={m} rows")
    for r, row in enumerate(phi):
        if not isinstance(row, list) or len(row) != q:
            raise SchemaError(f"node_potentials[{r}] must be a list of q={q} numbers")
    pairs = {}
    for n, entry in enumerate(doc.get("pair_potentials", [])):
        if not isinstance(entry, Mapping) or not {"i", "j", "table"} <= set(entry):
            raise SchemaError(f"pair_potentials[{n}] must be an object with i, j, table")
        key = (entry["i"], entry["j"])
        if not all(isinstance(k, int) and not isinstance(k, bool) for k in key):
            raise SchemaError(f"pair_potentials[{n}]: i and j must be integers")
        canon = (min(key), max(key))
        if canon in pairs:
            raise SchemaError(f"pair_potentials[{n}]: pair {{{canon[0]}, {canon[1]}}} appears twice")
        table = np.array(entry["table"], dtype=float)
        pairs[canon] = table if key[0] <= key[1] else table.T
    try:
        return PairwiseMrf(Alphabet(tuple(labels)), np.array(phi, dtype=float), pairs)
    except (TypeError, ValueError) as exc:
        raise SchemaError(str(exc)) from exc


def load_model(path: str | Path) -> PairwiseMrf:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    return model_from_dict(doc)


def ising_model(
    m: int,
    couplings: Mapping[tuple[int, int], float],
    fields: Sequence[float] | None = None,
) -> PairwiseMrf:
    """Binary model on {-1, +1}: phi_i(z) = h_i z and psi_ij(a, b) = theta_ij a b."""
    s = np.array([-1.0, 1.0])
    h = np.zeros(m) if fields is None else np.asarray(fields, dtype=float)
    phi = h[:, None] * s[None, :]
    pairs = {k: th * np.outer(s, s) for k, th in couplings.items()}
    return PairwiseMrf(Alphabet.ising(), phi, pairs)


def chain_ising(m: int, theta: float, field: float = 0.0) -> PairwiseMrf:
    return ising_model(m, {(i, i + 1): theta for i in range(m - 1)}, [field] * m)


def independent_model(node_potentials, alphabet: Alphabet | None = None) -> PairwiseMrf:
    phi = np.atleast_2d(np.asarray(node_potentials, dtype=float))
    alphabet = alphabet or Alphabet(tuple(range(phi.shape[1])))
    return PairwiseMrf(alphabet, phi, {})


def random_pairwise_mrf(
    rng: np.random.Generator,
    m: int,
    q: int,
    low: float = math.exp(-2),
    high: float = math.exp(2),
    edge_prob: float = 1.0,
    target_beta: float | None = None,
) -> PairwiseMrf:
    """Potentials with log-uniform magnitudes in ``[low, high]`` and random signs.

    With ``target_beta`` the pair potentials are rescaled so that the
    inverse temperature equals it exactly.
    """

    def draw(shape):
        mag = np.exp(rng.uniform(math.log(low), math.log(high), size=shape))
        return mag * rng.choice([-1.0, 1.0], size=shape)

    phi = draw((m, q))
    pairs = {}
    for i in range(m):
        for j in range(i + 1, m):
            if rng.random() < edge_prob:
                pairs[(i, j)] = draw((q, q))
    model = PairwiseMrf(Alphabet(tuple(range(q))), phi, pairs)
    if target_beta is not None and pairs:
        model = model.scaled(target_beta / inverse_temperature(model))
    return model


def log_unnormalized_weight(model: PairwiseMrf, config: Sequence[int]) -> float:
    """sum_i phi_i(z_i) + sum_{i<j} psi_ij(z_i, z_j), accumulated term by term."""
    config = list(config)
    if len(config) != model.m:
        raise InputError(f"config has length {len(config)}, model has m={model.m}")
    for z in config:
        if not (isinstance(z, (int, np.integer)) and 0 <= z < model.q):
            raise InputError(f"state index {z!r} invalid for q={model.q}")
    total = 0.0
    for i, z in enumerate(config):
        total += model.node_potentials[i, z]
    for (i, j), t in model.pair_potentials.items():
        total += t[config[i], config[j]]
    return float(total)


@dataclass(frozen=True, eq=False)
class JointTable:
    """Normalized law over ``q**m`` configurations, kept in log space.

    ``nodes`` records which original model nodes the table ranges over
    (relevant after conditioning).
    """

    m: int
    alphabet: Alphabet
    log_weights: np.ndarray
    log_partition: float
    nodes: tuple[int, ...] = ()

    def __post_init__(self):
        lw = np.asarray(self.log_weights, dtype=float)
        lw.setflags(write=False)
        object.__setattr__(self, "log_weights", lw)
        if not self.nodes:
            object.__setattr__(self, "nodes", tuple(range(self.m)))

    @classmethod
    def from_log_weights(cls, alphabet: Alphabet, m: int, log_weights, nodes=()) -> "JointTable":
        lw = np.asarray(log_weights, dtype=float)
        if lw.shape != (alphabet.q**m,):
            raise InputError(f"expected {alphabet.q**m} log weights, got {lw.shape}")
        if np.any(np.isnan(lw)) or np.any(lw == np.inf):
            raise InputError("log weights must be finite or -inf")
        z = float(logsumexp(lw))
        if not np.isfinite(z):
            raise InputError("table has no positive mass")
        return cls(m, alphabet, lw, z, tuple(nodes))

    @classmethod
    def from_probabilities(cls, alphabet: Alphabet, m: int, probs, nodes=()) -> "JointTable":
        p = np.asarray(probs, dtype=float)
        if np.any(p < 0):
            raise InputError("probabilities must be nonnegative")
        with np.errstate(divide="ignore"):
            return cls.from_log_weights(alphabet, m, np.log(p), nodes)

    @property
    def q(self) -> int:
        return self.alphabet.q

    @cached_property
    def log_probs(self) -> np.ndarray:
        return self.log_weights - self.log_partition

    @cached_property
    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_probs)

    def tensor(self) -> np.ndarray:
        """Log-probabilities shaped ``(q,) * m``."""
        return self.log_probs.reshape((self.q,) * self.m)

    def configs(self) -> np.ndarray:
        return all_configs(self.q, self.m)

    def prob(self, config: Sequence[int]) -> float:
        return float(self.probabilities[encode(np.asarray(config), self.q)[0]])

    def marginal(self, i: int) -> np.ndarray:
        axes = tuple(a for a in range(self.m) if a != i)
        return np.exp(self.tensor()).sum(axis=axes)

    def pair_marginal(self, i: int, j: int) -> np.ndarray:
        axes = tuple(a for a in range(self.m) if a not in (i, j))
        t = np.exp(self.tensor()).sum(axis=axes)
        return t if i < j else t.T

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Exact i.i.d. draws by inverse CDF over the table; shape ``(size, m)``."""
        cdf = np.cumsum(self.probabilities)
        codes = np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right")
        codes = np.minimum(codes, cdf.size - 1)
        if self.m == 0:
            return np.zeros((size, 0), dtype=np.int64)
        return np.stack(np.unravel_index(codes, (self.q,) * self.m), axis=1).astype(np.int64)

    def relabel(self, alphabet: Alphabet) -> "JointTable":
        return JointTable(self.m, alphabet, self.log_weights, self.log_partition, self.nodes)


def exact_joint(model: PairwiseMrf, cap: int = ENUMERATION_CAP) -> JointTable:
    """Enumerate the normalized joint by broadcasting potentials over a ``(q,)*m`` grid."""
    q, m = model.q, model.m
    _check_cap(q, m, cap)
    lw = np.zeros((q,) * m)
    for i in range(m):
        shape = [1] * m
        shape[i] = q
        lw = lw + model.node_potentials[i].reshape(shape)
    for (i, j), t in model.pair_potentials.items():
        shape = [1] * m
        shape[i] = q
        shape[j] = q
        lw = lw + t.reshape(shape)
    return JointTable.from_log_weights(model.alphabet, m, lw.reshape(-1))


def _rest_index(table: JointTable, i: int, rest: Sequence[int]) -> tuple:
    rest = list(rest)
    if not 0 <= i < table.m:
        raise InputError(f"node {i} out of range for m={table.m}")
    if len(rest) != table.m - 1:
        raise InputError(f"rest must have length {table.m - 1}, got {len(rest)}")
    for z in rest:
        if not 0 <= int(z) < table.q:
            raise InputError(f"state index {z!r} invalid for q={table.q}")
    full: list = [int(z) for z in rest]
    full.insert(i, slice(None))
    return tuple(full)


def conditional_distribution(table: JointTable, i: int, rest: Sequence[int]) -> np.ndarray:
    """P(z_i = . | z_{-i} = rest); ``rest`` lists the other nodes in order."""
    column = table.tensor()[_rest_index(table, i, rest)]
    if not np.any(np.isfinite(column)):
        raise InvalidConditioning(f"conditioning of node {i} on {list(rest)} has zero probability")
    return np.exp(column - logsumexp(column))


def _pair_view(table: JointTable, i: int, j: int) -> np.ndarray:
    """Log-probabilities arranged ``[z_i, z_j, rest]``."""
    t = np.moveaxis(table.tensor(), (i, j), (0, 1))
    return t.reshape(table.q, table.q, -1)


def _check_pair(table_m: int, j: int, i: int) -> None:
    if i == j:
        raise InputError("influence is defined for distinct nodes only")
    if not (0 <= i < table_m and 0 <= j < table_m):
        raise InputError(f"nodes ({j}, {i}) out of range for m={table_m}")


def influence(table: JointTable, j: int, i: int) -> float:
    """Dobrushin influence of node j on node i.

    Max over rest and pairs of values of z_j of the total variation between
    the conditionals of z_i. Conditionings of zero probability are skipped.
    """
    _check_pair(table.m, j, i)
    x = _pair_view(table, i, j)
    with np.errstate(invalid="ignore"):
        cond = np.exp(x - logsumexp(x, axis=0, keepdims=True))
    tv = 0.5 * np.abs(cond[:, :, None, :] - cond[:, None, :, :]).sum(axis=0)
    if np.all(np.isnan(tv)):
        return 0.0
    return float(min(1.0, np.nanmax(tv)))


def _cross_ratio_max(x: np.ndarray) -> float:
    # x[a, b, ...]; max over a, a', b, b' of x[a,b] + x[a',b'] - x[a',b] - x[a,b']
    term = (
        x[:, None, :, None]
        + x[None, :, None, :]
        - x[None, :, :, None]
        - x[:, None, None, :]
    )
    return float(term.max())


def log_influence(table: JointTable, j: int, i: int) -> float:
    """Quarter of the worst log cross-ratio under swaps at nodes i and j."""
    _check_pair(table.m, j, i)
    if np.any(~np.isfinite(table.log_weights)):
        raise PositivityViolation("log-influence requires a strictly positive joint")
    a, b = min(i, j), max(i, j)
    return max(0.0, _cross_ratio_max(_pair_view(table, a, b)) / 4.0)


def pairwise_log_influence_closed_form(model: PairwiseMrf, j: int, i: int) -> float:
    """Log-influence of a pairwise model read straight off psi_ij."""
    _check_pair(model.m, j, i)
    a, b = min(i, j), max(i, j)
    return max(0.0, _cross_ratio_max(model.psi(a, b)) / 4.0)


def influence_matrix(table: JointTable) -> np.ndarray:
    """``out[i, j]`` is the influence of j on i (row sums give the coefficient)."""
    m = table.m
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            if i != j:
                out[i, j] = influence(table, j, i)
    return out


def log_influence_matrix(table: JointTable) -> np.ndarray:
    m = table.m
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            out[i, j] = out[j, i] = log_influence(table, j, i)
    return out


def beta_matrix(model: PairwiseMrf) -> np.ndarray:
    """sup |psi_ij| per pair, with no centering of psi."""
    out = np.zeros((model.m, model.m))
    for (i, j), t in model.pair_potentials.items():
        out[i, j] = out[j, i] = float(np.abs(t).max())
    return out


def _max_row_sum(mat: np.ndarray) -> float:
    if mat.shape[0] == 0:
        return 0.0
    return float(mat.sum(axis=1).max())


def dobrushin_coefficient(table: JointTable) -> float:
    return _max_row_sum(influence_matrix(table))


def inverse_temperature(model: PairwiseMrf) -> float:
    return _max_row_sum(beta_matrix(model))


@dataclass(frozen=True)
class InfluenceReport:
    dobrushin: np.ndarray
    log_influence: np.ndarray
    beta: np.ndarray
    alpha: float
    alpha_log: float
    beta_total: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha": self.alpha,
            "alpha_log": self.alpha_log,
            "beta": self.beta_total,
            "dobrushin": self.dobrushin.tolist(),
            "log_influence": self.log_influence.tolist(),
            "beta_pairwise": self.beta.tolist(),
        }


def coefficients(model: PairwiseMrf, cap: int = ENUMERATION_CAP) -> InfluenceReport:
    """All three matrices from the enumerated joint.

    Pairs without a potential are set to exactly 0: the conditional of z_i
    then does not involve z_j at all, and enumerating would only add
    rounding noise of order 1e-16.
    """
    table = exact_joint(model, cap)
    m = model.m
    dob = np.zeros((m, m))
    logi = np.zeros((m, m))
    for i, j in model.pair_potentials:
        dob[i, j] = influence(table, j, i)
        dob[j, i] = influence(table, i, j)
        logi[i, j] = logi[j, i] = log_influence(table, j, i)
    beta = beta_matrix(model)
    return InfluenceReport(
        dobrushin=dob,
        log_influence=logi,
        beta=beta,
        alpha=_max_row_sum(dob),
        alpha_log=_max_row_sum(logi),
        beta_total=_max_row_sum(beta),
    )


def condition(table: JointTable, fixed: Mapping[int, int]) -> JointTable:
    """Exact law of the free nodes given ``fixed = {node: state}``, renormalized."""
    fixed = {int(k): int(v) for k, v in fixed.items()}
    for k, v in fixed.items():
        if not 0 <= k < table.m:
            raise InputError(f"node {k} out of range for m={table.m}")
        if not 0 <= v < table.q:
            raise InputError(f"state {v} invalid for q={table.q}")
    index = tuple(fixed.get(a, slice(None)) for a in range(table.m))
    sub = table.tensor()[index]
    free = tuple(table.nodes[a] for a in range(table.m) if a not in fixed)
    lw = np.asarray(sub).reshape(-1)
    if not np.any(np.isfinite(lw)):
        raise InvalidConditioning(f"conditioning event {fixed} has zero probability")
    return JointTable.from_log_weights(table.alphabet, len(free), lw, free)


def path_marginals(model: PairwiseMrf) -> np.ndarray:
    """Exact single-site marginals of a model whose pairs are all (i, i+1).

    Forward-backward in log space; cost is linear in m, so no enumeration cap.
    """
    for i, j in model.pair_potentials:
        if j != i + 1:
            raise InputError(f"pair ({i}, {j}) is not a path edge")
    m, q = model.m, model.q
    fwd = np.zeros((m, q))
    bwd = np.zeros((m, q))
    fwd[0] = model.node_potentials[0]
    for i in range(m - 1):
        psi = model.psi(i, i + 1)
        fwd[i + 1] = model.node_potentials[i + 1] + logsumexp(fwd[i][:, None] + psi, axis=0)
    for i in range(m - 2, -1, -1):
        psi = model.psi(i, i + 1)
        bwd[i] = logsumexp(psi + (model.node_potentials[i + 1] + bwd[i + 1])[None, :], axis=1)
    logit = fwd + bwd
    return np.exp(logit - logsumexp(logit, axis=1, keepdims=True))


def conditioning_events(m: int, q: int, sizes: Iterable[int]) -> Iterable[dict[int, int]]:
    """All assignments to node subsets of the given sizes."""
    from itertools import combinations

    for size in sizes:
        for nodes in combinations(range(m), size):
            for states in product(range(q), repeat=size):
                yield dict(zip(nodes, states))


__all__ = [
    "Alphabet",
    "PairwiseMrf",
    "JointTable",
    "InfluenceReport",
    "all_configs",
    "encode",
    "model_from_dict",
    "load_model",
    "ising_model",
    "chain_ising",
    "independent_model",
    "random_pairwise_mrf",
    "log_unnormalized_weight",
    "exact_joint",
    "conditional_distribution",
    "influence",
    "log_influence",
    "pairwise_log_influence_closed_form",
    "influence_matrix",
    "log_influence_matrix",
    "beta_matrix",
    "dobrushin_coefficient",
    "inverse_temperature",
    "coefficients",
    "condition",
    "conditioning_events",
    "path_marginals",
]
