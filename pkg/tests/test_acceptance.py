"""The thirteen acceptance criteria, each at its stated tolerance and budget.

Every test prints one ``criterion N: PASS|FAIL`` line; the lines are also
repeated in the pytest terminal summary.
"""

import math
import time

import numpy as np
import pytest

from dobrushin_lab import complexity as cx
from dobrushin_lab import gibbs, learn, mrf, verify
from dobrushin_lab.rng import stream

from oracles import exhaustive_interval_loss, exhaustive_threshold_loss

pytestmark = pytest.mark.acceptance

RESULTS: list[str] = []
SEED = 20240601


def record(n, title, passed, detail, elapsed, budget):
    within = elapsed < budget
    ok = bool(passed and within)
    line = (f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}; "
            f"{elapsed:.1f}s of {budget:g}s]")
    RESULTS.append(line)
    print(line)
    assert passed, line
    assert within, line


@pytest.fixture(scope="module")
def random_instances():
    """200 MRFs with m in {2,3,4}, q in {2,3}, log-uniform potential magnitudes in [e^-2, e^2]."""
    out = []
    for r in range(200):
        g = stream(SEED, 1, r)
        m = int(g.integers(2, 5))
        q = int(g.integers(2, 4))
        out.append(mrf.random_pairwise_mrf(g, m, q, math.exp(-2), math.exp(2)))
    return out


def test_criterion_01_influence_chain(random_instances):
    t0 = time.perf_counter()
    reps = [verify.check_influence_chain(mod) for mod in random_instances]
    worst = max(r.max_violation for r in reps)
    record(1, "I <= I_log <= beta on 200 random MRFs", worst <= 1e-9 and len(reps) == 200,
           f"worst excess {worst:.3g} (tol 1e-9)", time.perf_counter() - t0, 60)


def test_criterion_02_conditioning(random_instances):
    t0 = time.perf_counter()
    reps = [verify.check_conditioning_all(mod, sizes=(1, 2)) for mod in random_instances]
    worst = max(r.max_violation for r in reps)
    events = sum(r.instances for r in reps)
    record(2, "conditioning on 1-2 nodes never raises alpha", worst <= 1e-9,
           f"{events} events, worst increase {worst:.3g} (tol 1e-9)", time.perf_counter() - t0, 120)


def test_criterion_03_coupling_bound():
    t0 = time.perf_counter()
    model = mrf.chain_ising(8, 0.25)
    alpha = mrf.coefficients(model).alpha
    s = gibbs.coupling_experiment(model, 2, [1, 1], [0, 0], runs=10_000, sweeps=200,
                                  rng=stream(SEED, 3), alpha=alpha)
    excess = float(np.max(s.trace_mean - s.bound - 3 * s.trace_stderr))
    ok = 0.3 <= alpha <= 0.6 and s.passed and s.runs == 10_000 and s.sweeps >= 200
    record(3, "coupled d_H <= k alpha/(1-alpha) + 3 se at every sweep", ok,
           f"alpha {alpha:.4f}, bound {s.bound:.4f}, final mean {s.mean_hamming:.4f}, "
           f"worst excess {excess:.3g}", time.perf_counter() - t0, 120)


def test_criterion_04_concentration():
    t0 = time.perf_counter()
    model = mrf.chain_ising(6, 0.25)
    spec = verify.BoundedDifferenceSpec(lambda z: float(np.sum(z)), np.full(6, 2.0))
    rep = verify.check_concentration(model, spec, 100_000, list(range(1, 7)), stream(SEED, 4))
    alpha = rep.details["alpha"]
    freq = ", ".join(f"{v:.4f}" for v in rep.details["frequency"])
    record(4, "tail of sum z_i under the concentration bound", rep.passed and abs(alpha - 0.46) < 0.01,
           f"alpha {alpha:.4f}, tails [{freq}]", time.perf_counter() - t0, 60)


def test_criterion_05_lemma8():
    t0 = time.perf_counter()
    M = verify.random_lemma8_quadruples(stream(SEED, 5), 100_000)
    rep = verify.check_lemma8(M)
    record(5, "cross-ratio inequality on 1e5 random positive quadruples",
           rep.passed and rep.tolerance == 1e-12 and rep.instances == 100_000,
           f"worst excess {rep.max_violation:.3g} (tol 1e-12)", time.perf_counter() - t0, 10)


def test_criterion_06_sigma_shuffle():
    t0 = time.perf_counter()
    reps = []
    for theta in (0.1, 0.3, 0.5):
        for h in (0.0, 0.4):
            reps.append(verify.check_sigma_shuffle(mrf.ising_model(2, {(0, 1): theta}, fields=[h, -h / 2])))
        reps.append(verify.check_sigma_shuffle(mrf.ising_model(3, {(0, 1): theta, (1, 2): theta, (0, 2): theta})))
    mean_dev = max(r.details["mean_deviation"] for r in reps)
    excess = max(r.details["log_influence_excess"] for r in reps)
    ok = all(r.passed for r in reps) and mean_dev <= 1e-12 and excess <= 1e-9
    record(6, "sigma-shuffle is zero-mean with I_log <= 2 I_log(D)", ok,
           f"{len(reps)} models, mean dev {mean_dev:.3g}, excess {excess:.3g}", time.perf_counter() - t0, 120)


def test_criterion_07_symmetrization():
    t0 = time.perf_counter()
    reps = []
    for r in range(60):
        g = stream(SEED, 7, r)
        model = mrf.random_pairwise_mrf(g, int(g.integers(2, 4)), int(g.integers(2, 4)))
        n_f = 2 + r % 3
        reps.append(verify.check_symmetrization(model, g.uniform(-1, 1, size=(n_f, model.q))))
    worst = max(rep.details["lhs"] - rep.details["rhs"] for rep in reps)
    record(7, "symmetrization LHS <= RHS, exact", all(rep.passed for rep in reps) and worst <= 1e-12,
           f"{len(reps)} instances with 2-4 functions, worst LHS-RHS {worst:.3g}", time.perf_counter() - t0, 60)


def test_criterion_08_gc_mixture():
    t0 = time.perf_counter()
    model = mrf.ising_model(3, {(0, 1): 0.3, (1, 2): 0.3, (0, 2): 0.3}, fields=[0.2, 0.0, -0.1])
    table = mrf.exact_joint(model)
    labels = np.asarray(model.alphabet.labels, dtype=float)
    # every function {-1, +1} -> {-1, +1}: identity, negation and the two constants
    funcs = np.array([[-1.0, 1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, -1.0]])

    def sampler(g):
        return labels[table.sample(g, 1)[0]]

    def builder(s):
        return cx.FunctionClass(funcs[:, (np.asarray(s) > 0).astype(int)])

    res = cx.gc_mixture_inequality_check(sampler, builder, 10_000, stream(SEED, 8))
    record(8, "GC_T <= 2 GC_D + 3 se with common random numbers", res.passed,
           f"GC_T {res.gc_shuffled.mean:.4f}, GC_D {res.gc_distribution.mean:.4f}, "
           f"diff {res.difference_mean:.4f} +- {res.difference_stderr:.4f}", time.perf_counter() - t0, 60)


def test_criterion_09_complexity_sanity():
    t0 = time.perf_counter()
    ones = [cx.exact_rademacher(cx.all_sign_patterns(m)) for m in range(1, 13)]
    zero = cx.exact_rademacher(cx.FunctionClass(np.array([[0.5, -2.0, 1.0, 3.0]])))
    est = cx.gaussian_complexity(cx.all_sign_patterns(16), draws=10_000, rng=stream(SEED, 9))
    target = math.sqrt(2 / math.pi)
    ok = all(v == 1.0 for v in ones) and zero == 0.0 and abs(est.mean - target) <= 3 * est.stderr
    record(9, "exact and Monte Carlo complexities of reference classes", ok,
           f"Gaussian {est.mean:.4f} +- {est.stderr:.4f} vs {target:.4f}", time.perf_counter() - t0, 60)


def test_criterion_10_slow_mixing():
    t0 = time.perf_counter()
    rep = verify.check_claim_slow_mixing([0.01, 0.02, 0.05, 0.1])
    dev = rep.details["deviation"] - rep.details["theta"] ** 2
    record(10, "Pr(E0, Ek) = 1/4 + theta/16 within theta^2", rep.passed,
           "worst deviation minus theta^2 " + f"{float(dev.max()):.3g}", time.perf_counter() - t0, 10)


def test_criterion_11_generalization_rate():
    t0 = time.perf_counter()
    grid = [64, 256, 1024, 4096]
    dep = learn.ThetaChainFamily(row_sum=0.4, reference_m=max(grid))
    iid = learn.ThetaChainFamily(c=0.0)
    a = learn.generalization_experiment(dep, learn.THRESHOLD_SCHEME, grid, 200, stream(SEED, 11, 0))
    b = learn.generalization_experiment(iid, learn.THRESHOLD_SCHEME, grid, 200, stream(SEED, 11, 1))
    row_ok = all(dep.alpha_bound(m) <= 0.4 + 1e-12 for m in grid)
    ok = row_ok and -0.65 <= a.slope <= -0.35 and abs(a.slope - b.slope) <= 0.15
    record(11, "gap slope in [-0.65, -0.35], control within 0.15", ok,
           f"slope {a.slope:.3f}, control {b.slope:.3f}, gaps "
           + "/".join(f"{g:.4f}" for g in a.mean_gap), time.perf_counter() - t0, 600)


def test_criterion_12_compression_validity():
    t0 = time.perf_counter()
    worst = {}
    for scheme, oracle in ((learn.THRESHOLD_SCHEME, exhaustive_threshold_loss),
                           (learn.INTERVAL_SCHEME, exhaustive_interval_loss)):
        bad = 0
        for r in range(10_000):
            g = stream(SEED, 12, scheme.size, r)
            n = int(g.integers(1, 16))
            x = g.integers(0, 6, size=n).astype(float) if r % 2 else g.uniform(-1, 1, size=n)
            y = np.where(g.random(n) < 0.5, -1, 1)
            s = learn.LabeledSample(x, y)
            kept = scheme.compress(s)
            h = scheme.reconstruct(s.subset(kept))
            if len(kept) > scheme.size or learn.empirical_loss(h, s) != oracle(x, y):
                bad += 1
        worst[scheme.name] = bad
    record(12, "compression reaches the exhaustive ERM loss with |kappa| <= k", all(v == 0 for v in worst.values()),
           f"mismatches {worst} over 10^4 samples each", time.perf_counter() - t0, 60)


def test_criterion_13_bound_tables():
    t0 = time.perf_counter()
    eps, deltas, dims = [0.1, 0.05, 0.01], [0.1, 0.01], [1, 5, 20]
    rows = learn.sample_complexity_table(eps, deltas, dims)
    exact = all(abs(r["m_prior"] - r["d"] ** 2 / (r["delta"] * r["epsilon"] ** 4)) <= 1e-12 * r["m_prior"]
                and r["m_this"] == (r["d"] + math.log(1 / r["delta"])) / r["epsilon"] ** 2 for r in rows)
    anchor = learn.sample_complexity_table([0.1], [0.1], [1])[0]["m_prior"]
    beta = lambda a: 0.5 * math.exp(-0.1 * a)  # noqa: E731
    mono = [learn.mohri_bound(4096, d, beta, 0.05) for d in (1, 2, 5, 10, 50)]
    monotone = all(math.isfinite(v) for v in mono) and all(x < y for x, y in zip(mono, mono[1:]))
    infeasible = learn.mohri_bound(4095, 1, beta, 0.05) == math.inf
    ok = exact and anchor == 1e5 and monotone and infeasible
    record(13, "sample-complexity forms and blocking bound", ok,
           f"prior(1, 0.1, 0.1) = {anchor:.6g}, mohri over d {[round(v, 3) for v in mono]}",
           time.perf_counter() - t0, 1)
