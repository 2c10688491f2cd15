"""Pure-Python twins of the compiled kernels in ``_core.pyx``.

Same signatures, same consumption of the pre-drawn randomness, so a chain
run through either backend follows the same path.
"""

from __future__ import annotations

import math

import numpy as np

SMALL_TILT = 1e-8


def tilted_inverse(a: float, u: float) -> float:
    """Inverse CDF of the density proportional to exp(a*x) on [-1, 1]."""
    if abs(a) < SMALL_TILT:
        x0 = 2.0 * u - 1.0
        x = x0 + 0.5 * a * (1.0 - x0 * x0)
    elif abs(a) < 1.0:
        # log1p/expm1 keep full relative accuracy when a is small
        if a > 0:
            x = 1.0 + math.log1p((1.0 - u) * math.expm1(-2.0 * a)) / a
        else:
            x = -1.0 + math.log1p(u * math.expm1(2.0 * a)) / a
    elif a > 0:
        x = 1.0 + math.log(u + (1.0 - u) * math.exp(-2.0 * a)) / a
    else:
        x = -1.0 + math.log((1.0 - u) + u * math.exp(2.0 * a)) / a
    return min(1.0, max(-1.0, x))


def _site_logits(i, x, phi, nbr_ptr, nbr_idx, nbr_psi):
    out = [float(v) for v in phi[i]]
    q = len(out)
    for e in range(nbr_ptr[i], nbr_ptr[i + 1]):
        xj = x[nbr_idx[e]]
        row = nbr_psi[e]
        for z in range(q):
            out[z] += row[z, xj]
    return out


def _softmax(logits):
    top = max(logits)
    w = [math.exp(v - top) for v in logits]
    total = 0.0
    for v in w:
        total += v
    return [v / total for v in w]


def _draw_from_logits(logits, u):
    top = max(logits)
    w = [math.exp(v - top) for v in logits]
    total = 0.0
    for v in w:
        total += v
    u *= total
    acc = 0.0
    for z in range(len(w) - 1):
        acc += w[z]
        if u < acc:
            return z
    return len(w) - 1


def _inverse_cdf(w, total, u):
    u *= total
    acc = 0.0
    last = -1
    for z, v in enumerate(w):
        if v > 0:
            acc += v
            last = z
            if u < acc:
                return z
    return last


def _maximal_pair(p, r, u0, u1, u2):
    overlap = [a if a < b else b for a, b in zip(p, r)]
    w = 0.0
    for v in overlap:
        w += v
    rp = [a - o for a, o in zip(p, overlap)]
    rq = [b - o for b, o in zip(r, overlap)]
    tp = 0.0
    tq = 0.0
    for v in rp:
        tp += v
    for v in rq:
        tq += v
    if u0 < w or tp <= 0.0 or tq <= 0.0:
        a = _inverse_cdf(overlap, w, u1)
        return a, a
    return _inverse_cdf(rp, tp, u1), _inverse_cdf(rq, tq, u2)


def site_conditional(i, x, phi, nbr_ptr, nbr_idx, nbr_psi):
    """Conditional law of site ``i`` given the rest of ``x``."""
    return np.array(_softmax(_site_logits(i, x, phi, nbr_ptr, nbr_idx, nbr_psi)))


def maximal_coupled_draw(p, r, u0, u1, u2):
    """Draw from the maximal coupling of ``p`` and ``r`` using three uniforms."""
    return _maximal_pair([float(v) for v in p], [float(v) for v in r], u0, u1, u2)


def discrete_gibbs_steps(x, phi, nbr_ptr, nbr_idx, nbr_psi, sites, u):
    """Random-scan Gibbs updates of a discrete pairwise MRF, in place."""
    for t in range(len(sites)):
        i = sites[t]
        x[i] = _draw_from_logits(_site_logits(i, x, phi, nbr_ptr, nbr_idx, nbr_psi), u[t])


def discrete_coupled_runs(U, V, phi, nbr_ptr, nbr_idx, nbr_psi, free_sites, sites, u,
                          steps_per_record, out):
    """Greedily coupled Gibbs chains, one pair per row, updated in place."""
    steps = sites.shape[1]
    offset = out.shape[1] - steps // steps_per_record
    for r in range(U.shape[0]):
        Ur, Vr = U[r], V[r]
        if offset > 0:
            out[r, 0] = int(np.count_nonzero(Ur[free_sites] != Vr[free_sites]))
        for t in range(steps):
            i = sites[r, t]
            pu = _softmax(_site_logits(i, Ur, phi, nbr_ptr, nbr_idx, nbr_psi))
            pv = _softmax(_site_logits(i, Vr, phi, nbr_ptr, nbr_idx, nbr_psi))
            Ur[i], Vr[i] = _maximal_pair(pu, pv, u[r, t, 0], u[r, t, 1], u[r, t, 2])
            if (t + 1) % steps_per_record == 0:
                out[r, offset + (t + 1) // steps_per_record - 1] = int(
                    np.count_nonzero(Ur[free_sites] != Vr[free_sites])
                )


def _field(x, w, i):
    acc = 0.0
    for j in range(i):
        acc += w[i - j] * x[j]
    for j in range(i + 1, len(x)):
        acc += w[j - i] * x[j]
    return acc


def theta_chain_steps(x, w, sites, u):
    """Random-scan Gibbs updates of the interval chain with Toeplitz couplings."""
    xs = x.tolist()
    ws = w.tolist()
    coupled = any(v != 0.0 for v in ws[1:])
    for t in range(len(sites)):
        i = int(sites[t])
        a = _field(xs, ws, i) if coupled else 0.0
        xs[i] = tilted_inverse(a, float(u[t]))
    x[:] = xs


def toeplitz_fields(x, w):
    """Field ``sum_{j != i} w[|i-j|] x_j`` at every site."""
    xs = x.tolist()
    ws = w.tolist()
    return np.array([_field(xs, ws, i) for i in range(len(xs))])
