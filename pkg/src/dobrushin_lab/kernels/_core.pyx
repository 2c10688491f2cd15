# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sampling kernels.

Every kernel consumes randomness that the caller has already drawn (site
indices and uniforms), so the compiled and pure-Python paths produce the
same chains from the same arrays.
"""

from libc.math cimport exp, expm1, fabs, log, log1p

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef double SMALL_TILT = 1e-8

cdef enum:
    MAX_Q = 64


cdef inline double _tilted_inverse(double a, double u) noexcept nogil:
    cdef double x0, x
    if fabs(a) < SMALL_TILT:
        x0 = 2.0 * u - 1.0
        x = x0 + 0.5 * a * (1.0 - x0 * x0)
    elif fabs(a) < 1.0:
        # log1p/expm1 keep full relative accuracy when a is small
        if a > 0:
            x = 1.0 + log1p((1.0 - u) * expm1(-2.0 * a)) / a
        else:
            x = -1.0 + log1p(u * expm1(2.0 * a)) / a
    elif a > 0:
        x = 1.0 + log(u + (1.0 - u) * exp(-2.0 * a)) / a
    else:
        x = -1.0 + log((1.0 - u) + u * exp(2.0 * a)) / a
    if x < -1.0:
        return -1.0
    if x > 1.0:
        return 1.0
    return x


def tilted_inverse(double a, double u):
    """Inverse CDF of the density proportional to exp(a*x) on [-1, 1]."""
    return _tilted_inverse(a, u)


cdef inline long _draw_from_logits(double* logits, long q, double u) noexcept nogil:
    cdef double top = logits[0]
    cdef double total = 0.0
    cdef double acc = 0.0
    cdef double w[MAX_Q]
    cdef long z
    for z in range(1, q):
        if logits[z] > top:
            top = logits[z]
    for z in range(q):
        w[z] = exp(logits[z] - top)
        total += w[z]
    u *= total
    for z in range(q - 1):
        acc += w[z]
        if u < acc:
            return z
    return q - 1


cdef inline void _site_logits(
    long i,
    const long[::1] x,
    const double[:, ::1] phi,
    const long[::1] nbr_ptr,
    const long[::1] nbr_idx,
    const double[:, :, ::1] nbr_psi,
    double* out,
) noexcept nogil:
    cdef long q = phi.shape[1]
    cdef long z, e
    for z in range(q):
        out[z] = phi[i, z]
    for e in range(nbr_ptr[i], nbr_ptr[i + 1]):
        for z in range(q):
            out[z] += nbr_psi[e, z, x[nbr_idx[e]]]


def site_conditional(
    long i,
    const long[::1] x,
    const double[:, ::1] phi,
    const long[::1] nbr_ptr,
    const long[::1] nbr_idx,
    const double[:, :, ::1] nbr_psi,
):
    """Conditional law of site ``i`` given the rest of ``x``."""
    cdef long q = phi.shape[1]
    cdef double logits[MAX_Q]
    _site_logits(i, x, phi, nbr_ptr, nbr_idx, nbr_psi, logits)
    out = np.empty(q, dtype=np.float64)
    cdef double[::1] o = out
    cdef double top = logits[0]
    cdef double total = 0.0
    cdef long z
    for z in range(1, q):
        if logits[z] > top:
            top = logits[z]
    for z in range(q):
        o[z] = exp(logits[z] - top)
        total += o[z]
    for z in range(q):
        o[z] /= total
    return out


def discrete_gibbs_steps(
    long[::1] x,
    const double[:, ::1] phi,
    const long[::1] nbr_ptr,
    const long[::1] nbr_idx,
    const double[:, :, ::1] nbr_psi,
    const long[::1] sites,
    const double[::1] u,
):
    """Random-scan Gibbs updates of a discrete pairwise MRF, in place."""
    cdef long q = phi.shape[1]
    cdef long t, i
    cdef double logits[MAX_Q]
    if q > MAX_Q:
        raise ValueError("alphabet too large for compiled kernel")
    with nogil:
        for t in range(sites.shape[0]):
            i = sites[t]
            _site_logits(i, x, phi, nbr_ptr, nbr_idx, nbr_psi, logits)
            x[i] = _draw_from_logits(logits, q, u[t])


cdef inline void _softmax(double* logits, long q, double* out) noexcept nogil:
    cdef double top = logits[0]
    cdef double total = 0.0
    cdef long z
    for z in range(1, q):
        if logits[z] > top:
            top = logits[z]
    for z in range(q):
        out[z] = exp(logits[z] - top)
        total += out[z]
    for z in range(q):
        out[z] /= total


cdef inline long _inverse_cdf(double* w, long q, double total, double u) noexcept nogil:
    cdef double acc = 0.0
    cdef long z, last = -1
    u *= total
    for z in range(q):
        if w[z] > 0:
            acc += w[z]
            last = z
            if u < acc:
                return z
    return last


cdef inline void _maximal_pair(
    const double* p, const double* r, long q, double u0, double u1, double u2,
    long* a, long* b,
) noexcept nogil:
    cdef double overlap[MAX_Q]
    cdef double rp[MAX_Q]
    cdef double rq[MAX_Q]
    cdef double w = 0.0, tp = 0.0, tq = 0.0
    cdef long z
    for z in range(q):
        overlap[z] = p[z] if p[z] < r[z] else r[z]
        w += overlap[z]
        rp[z] = p[z] - overlap[z]
        rq[z] = r[z] - overlap[z]
        tp += rp[z]
        tq += rq[z]
    if u0 < w or tp <= 0.0 or tq <= 0.0:
        a[0] = _inverse_cdf(overlap, q, w, u1)
        b[0] = a[0]
    else:
        a[0] = _inverse_cdf(rp, q, tp, u1)
        b[0] = _inverse_cdf(rq, q, tq, u2)


def maximal_coupled_draw(
    const double[::1] p, const double[::1] r, double u0, double u1, double u2
):
    """Draw from the maximal coupling of ``p`` and ``r`` using three uniforms."""
    cdef long a, b
    cdef long q = p.shape[0]
    if q > MAX_Q:
        raise ValueError("alphabet too large for compiled kernel")
    _maximal_pair(&p[0], &r[0], q, u0, u1, u2, &a, &b)
    return a, b


def discrete_coupled_runs(
    long[:, ::1] U,
    long[:, ::1] V,
    const double[:, ::1] phi,
    const long[::1] nbr_ptr,
    const long[::1] nbr_idx,
    const double[:, :, ::1] nbr_psi,
    const long[::1] free_sites,
    const long[:, ::1] sites,
    const double[:, :, ::1] u,
    long steps_per_record,
    long[:, ::1] out,
):
    """Greedily coupled Gibbs chains, one pair per row, updated in place.

    ``out[r, s]`` receives the Hamming distance over ``free_sites`` after
    ``(s + 1) * steps_per_record`` steps. Column 0 of ``out`` is reserved
    for the initial distance when ``out`` has one more column than records.
    """
    cdef long q = phi.shape[1]
    cdef long runs = U.shape[0]
    cdef long steps = sites.shape[1]
    cdef long nfree = free_sites.shape[0]
    cdef long offset = out.shape[1] - steps // steps_per_record
    cdef long r, t, i, s, d, a, b
    cdef double lu[MAX_Q]
    cdef double lv[MAX_Q]
    cdef double pu[MAX_Q]
    cdef double pv[MAX_Q]
    if q > MAX_Q:
        raise ValueError("alphabet too large for compiled kernel")
    with nogil:
        for r in range(runs):
            if offset > 0:
                d = 0
                for s in range(nfree):
                    if U[r, free_sites[s]] != V[r, free_sites[s]]:
                        d += 1
                out[r, 0] = d
            for t in range(steps):
                i = sites[r, t]
                _site_logits(i, U[r], phi, nbr_ptr, nbr_idx, nbr_psi, lu)
                _site_logits(i, V[r], phi, nbr_ptr, nbr_idx, nbr_psi, lv)
                _softmax(lu, q, pu)
                _softmax(lv, q, pv)
                _maximal_pair(pu, pv, q, u[r, t, 0], u[r, t, 1], u[r, t, 2], &a, &b)
                U[r, i] = a
                V[r, i] = b
                if (t + 1) % steps_per_record == 0:
                    d = 0
                    for s in range(nfree):
                        if U[r, free_sites[s]] != V[r, free_sites[s]]:
                            d += 1
                    out[r, offset + (t + 1) // steps_per_record - 1] = d


cdef inline double _field(const double[::1] x, const double[::1] w, long i) noexcept nogil:
    cdef long m = x.shape[0]
    cdef long j
    cdef double acc = 0.0
    for j in range(i):
        acc += w[i - j] * x[j]
    for j in range(i + 1, m):
        acc += w[j - i] * x[j]
    return acc


def theta_chain_steps(
    double[::1] x,
    const double[::1] w,
    const long[::1] sites,
    const double[::1] u,
):
    """Random-scan Gibbs updates of the interval chain with Toeplitz couplings.

    ``w[d]`` is the coupling between sites at distance ``d`` (``w[0]`` unused).
    """
    cdef long t, i, d
    cdef bint coupled = False
    for d in range(1, w.shape[0]):
        if w[d] != 0.0:
            coupled = True
            break
    with nogil:
        for t in range(sites.shape[0]):
            i = sites[t]
            if coupled:
                x[i] = _tilted_inverse(_field(x, w, i), u[t])
            else:
                x[i] = _tilted_inverse(0.0, u[t])


def toeplitz_fields(const double[::1] x, const double[::1] w):
    """Field ``sum_{j != i} w[|i-j|] x_j`` at every site."""
    cdef long m = x.shape[0]
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    cdef long i
    with nogil:
        for i in range(m):
            o[i] = _field(x, w, i)
    return out
