"""End-to-end acceptance criteria, one test per criterion.

Each test prints ``criterion N: PASS|FAIL`` with its runtime and the
runtime limit, and fails on either a wrong result or a slow run.
"""

import itertools
import time
from fractions import Fraction

import numpy as np
import pytest

from pcp_mwspp.field import gf
from pcp_mwspp.hlcpp import (build_hlcpp, check_smoothness, check_uniformity, evaluate_labeling,
                             labeling_from_assignment, labeling_from_tables)
from pcp_mwspp.mwspp import (LabelSets, brute_force_min_weight, brute_force_ncp, build_mwspp, check_fixed_forms,
                             collision_filter, honest_solution, hyperedge_success_probability, markov_prune,
                             mwspp_to_ncp, random_explicit, solution_weight, surviving_hyperedges)
from pcp_mwspp.params import compute_parameters
from pcp_mwspp.pcp import estimate_acceptance, honest_prover
from pcp_mwspp.pipeline import toy_instance
from pcp_mwspp.poly import CubeFunction, canonical_line, multilinear_extension, partial_sum, restrict_to_line
from pcp_mwspp.qcsp import (QcspInstance, QuadraticPolynomial, boost_soundness, brute_force_opt, evaluate_qcsp,
                            planted_instance, violation_vector)
from pcp_mwspp.sumcheck import soundness_event_count, sumcheck_adversaries

from conftest import naive_mul
from test_poly import random_multi

N_LAW = 10 ** 4


def run_criterion(capsys, n, limit, body):
    t0 = time.perf_counter()
    err, detail = None, ""
    try:
        detail = body() or ""
    except AssertionError as exc:
        err = exc
    elapsed = time.perf_counter() - t0
    ok = err is None and elapsed < limit
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s, limit {limit}s) {detail}")
    if err is not None:
        raise err
    assert elapsed < limit, f"criterion {n} took {elapsed:.1f}s"


# -- 1 --------------------------------------------------------------------

def _field_laws():
    for r in (1, 2, 3, 4):
        spec = gf(r)
        q = spec.q
        a, b, c = (x.reshape(-1) for x in np.meshgrid(*(np.arange(q),) * 3, indexing="ij"))
        m = spec.mul_arr
        prod = m(a[:q * q], b[:q * q])
        assert all(int(p) == naive_mul(int(x), int(y), spec.modulus, r)
                   for x, y, p in zip(a[:q * q], b[:q * q], prod))
        assert np.array_equal(m(m(a, b), c), m(a, m(b, c)))
        assert np.array_equal(m(a, b ^ c), m(a, b) ^ m(a, c))
        assert np.array_equal(m(a ^ b, a ^ b), m(a, a) ^ m(b, b))
        nz = np.arange(1, q)
        assert np.all(m(nz, spec.inv_arr(nz)) == 1)
    for r in (5, 8, 16, 24, 32):
        spec = gf(r)
        rng = np.random.default_rng(r)
        a, b, c = (rng.integers(0, spec.q, size=N_LAW) for _ in range(3))
        m = spec.mul_arr
        assert np.array_equal(m(m(a, b), c), m(a, m(b, c)))
        assert np.array_equal(m(a, b ^ c), m(a, b) ^ m(a, c))
        assert np.array_equal(m(a ^ b, a ^ b), m(a, a) ^ m(b, b))
        nz = a[a != 0]
        assert np.all(m(nz, spec.inv_arr(nz)) == 1)


def _poly_laws():
    spec = gf(4)
    rng = np.random.default_rng(0)
    # extension agrees on the cube: 10^4 cube points
    checked = 0
    while checked < N_LAW:
        mdim = int(rng.integers(1, 7))
        vals = tuple(int(v) for v in rng.integers(0, 16, 1 << mdim))
        f = multilinear_extension(CubeFunction(spec, mdim, vals))
        pts = np.array(list(itertools.product((0, 1), repeat=mdim)))
        got = f.eval_points(pts)
        assert [int(g) for g in got] == [CubeFunction(spec, mdim, vals)[tuple(p)] for p in pts]
        checked += pts.shape[0]
    # line restriction: 10^4 (polynomial, line) cases, every parameter checked
    polys = [random_multi(spec, 3, 3, rng) for _ in range(10)]
    ts = np.arange(16)
    for n in range(N_LAW):
        f = polys[n % 10]
        L = canonical_line(spec, rng.integers(1, 16, 3), rng.integers(0, 16, 3))
        assert np.array_equal(restrict_to_line(f, L).eval_many(ts), f.eval_points(L.points()))
    # partial-sum consistency: 10^4 random prefixes
    gs = [random_multi(spec, 3, 6, rng) for _ in range(10)]
    for n in range(N_LAW):
        g = gs[n % 10]
        a = [int(v) for v in rng.integers(0, 16, 3)]
        for j in (1, 2):
            assert partial_sum(g, a[:j - 1])(a[j - 1]) == partial_sum(g, a[:j]).sum01()


def test_criterion_1_field_and_polynomial_properties(capsys):
    def body():
        _field_laws()
        _poly_laws()
        return f"{N_LAW} cases per law, exhaustive q <= 16"
    run_criterion(capsys, 1, 30, body)


# -- 2 --------------------------------------------------------------------

def test_criterion_2_pcp_completeness(capsys, planted_q16_m1):
    def body():
        P, A = planted_q16_m1
        assert P.n == 2 and P.spec.q == 16
        est = estimate_acceptance(honest_prover(P, A, 1), P, "exact")
        assert est.exact and est.probability == 1
        assert est.total == P.k * 16 * 16 - P.k * 16
        P0, A4 = planted_instance(gf(3), 4, 3, np.random.default_rng(6))
        P4 = boost_soundness(P0)
        mc = estimate_acceptance(honest_prover(P4, A4, 2), P4, "monte_carlo", trials=10 ** 5, seed=0)
        assert mc.accepted == mc.total == 10 ** 5 and not mc.failures
        return f"exact {est.accepted}/{est.total}, monte carlo {mc.accepted}/{mc.total}"
    run_criterion(capsys, 2, 300, body)


# -- 3 --------------------------------------------------------------------

def test_criterion_3_sumcheck_soundness(capsys):
    def body():
        spec = gf(4)
        advs = sumcheck_adversaries(spec, M=2, d=2, count=120, seed=0)
        assert len(advs) >= 100
        probs = [Fraction(soundness_event_count(spec, a), 16 ** 2) for a in advs]
        assert max(probs) <= Fraction(4, 16)
        return f"{len(advs)} adversaries, max {max(probs)} <= 1/4"
    run_criterion(capsys, 3, 60, body)


# -- 4 --------------------------------------------------------------------

def test_criterion_4_soundness_boosting(capsys):
    def body():
        spec = gf(4)
        Q, _ = toy_instance("unsatisfiable", spec)
        assert Q.n == 2 and Q.k == 3
        opt_q, _ = brute_force_opt(Q)
        assert opt_q < 1
        P = boost_soundness(Q)
        opt_p, _ = brute_force_opt(P)
        assert opt_p <= Fraction(3, 16)
        for A in itertools.product(range(16), repeat=2):
            v = violation_vector(Q, A)
            assert any(v)
            roots = sum(1 for t in range(16)
                        if v[0] ^ spec.mul(v[1], t) ^ spec.mul(v[2], spec.mul(t, t)) == 0)
            sat = sum(P.satisfied(A))
            assert sat == roots <= Q.k - 1
            assert evaluate_qcsp(P, A) == Fraction(sat, 16)
        return f"OPT(Q) = {opt_q}, OPT(P) = {opt_p} <= 3/16, 256 root counts"
    run_criterion(capsys, 4, 10, body)


# -- 5 --------------------------------------------------------------------

def _boosted(r, n, seed=1):
    P0, A = planted_instance(gf(r), n, 3, np.random.default_rng(seed))
    return boost_soundness(P0), A


def test_criterion_5_hlcpp_structure(capsys):
    def body():
        P, A = _boosted(3, 2)
        hl = build_hlcpp(P, 1)
        unif = check_uniformity(hl)
        assert unif.ok and unif.pruned_fraction == 0
        for r, m in [(3, 1), (4, 1), (3, 2), (4, 2)]:
            P, A = _boosted(r, 1 << m)
            hl = build_hlcpp(P, m)
            smooth = check_smoothness(hl)
            assert smooth.structural_ok and not smooth.failures
            assert smooth.delta[0] == Fraction(4 * m, hl.spec.q)
            assert evaluate_labeling(hl, labeling_from_assignment(P, A, hl)) == 1
        return "uniform at q=8 m=1; smooth and honest-satisfied at q in {8,16}, m in {1,2}"
    run_criterion(capsys, 5, 120, body)


# -- 6 --------------------------------------------------------------------

def test_criterion_6_mwspp_completeness(capsys):
    def body():
        out = []
        for r in (3, 4):
            P, A = _boosted(r, 2)
            T = honest_prover(P, A, 1)
            hl = build_hlcpp(P, 1)
            imp = build_mwspp(hl, "implicit")
            sol = honest_solution(labeling_from_tables(hl, T), imp)
            assert check_fixed_forms(imp, sol) == []
            w = solution_weight(imp, sol)
            assert w == 4
            out.append(f"q={hl.spec.q}: weight {w}")
        return ", ".join(out)
    run_criterion(capsys, 6, 60, body)


# -- 7 --------------------------------------------------------------------

def test_criterion_7_mwspp_ncp_equivalence(capsys):
    def body():
        rng = np.random.default_rng(2024)
        sizes = []
        for _ in range(50):
            N = int(rng.integers(4, 15))
            ex = random_explicit(rng, N, int(rng.integers(1, 6)), int(rng.integers(1, 8)))
            assert brute_force_min_weight(ex)[0] == brute_force_ncp(mwspp_to_ncp(ex))
            sizes.append(N)
        assert max(sizes) <= 14
        return f"50 instances, N in [{min(sizes)}, {max(sizes)}]"
    run_criterion(capsys, 7, 120, body)


# -- 8 --------------------------------------------------------------------

def _collision_fraction(imp, sol, j):
    """Independent scalar recount of edges whose source labels collide."""
    spec, q = imp.spec, imp.spec.q
    bad = 0
    n = imp.layer_size(j)
    for u in range(n):
        o = sol.offsets[j]
        rows = sol.labels[j][o[u]:o[u + 1]]
        for a in range(q):
            vals = [spec.horner(row[None, :], np.array([a]))[0] for row in rows]
            bad += len(set(vals)) < len(vals)
    return Fraction(bad, n * q)


def test_criterion_8_rounding_argument(capsys):
    def body():
        spec = gf(3)
        Q = QcspInstance(spec, 2, (QuadraticPolynomial.build(spec, 2, [((1, 1), 1)]),), (1,))
        P = boost_soundness(Q)
        hl = build_hlcpp(P, 1)
        imp = build_mwspp(hl)
        sols = [honest_solution(labeling_from_assignment(P, (z, 1), hl), imp) for z in (0, 1, 2)]
        sol = LabelSets.symmetric_difference(*sols)
        assert check_fixed_forms(imp, sol) == []
        w = solution_weight(imp, sol)
        rho, m = 3, hl.m
        assert all(sol.sizes(j).max() <= rho for j in range(hl.num_layers))
        pruned, mrep = markov_prune(sol, rho)
        for j in range(hl.num_layers):
            heavy = int(np.sum(sol.sizes(j) > rho))
            assert mrep.fractions[j] == Fraction(heavy, hl.layer_size(j)) <= w / rho
        col = collision_filter(imp, pruned, rho)
        assert col.fractions[0] == _collision_fraction(imp, pruned, 0)
        for j, f in col.fractions.items():
            assert f <= col.pair_bounds[j] <= Fraction(4 * m * rho * rho, spec.q)
        surv = surviving_hyperedges(imp, pruned, col, rho)
        assert surv.size > 0
        probs = [hyperedge_success_probability(imp, pruned, h) for h in surv]
        bound = Fraction(1, rho ** (2 * m + 3))
        assert min(probs) >= bound
        return f"{surv.size} hyperedges, min probability {min(probs)} >= {bound}"
    run_criterion(capsys, 8, 120, body)


# -- 9 --------------------------------------------------------------------

def test_criterion_9_parameter_arithmetic(capsys):
    def body():
        rep = compute_parameters(0.5, 2 ** 10)
        assert rep.D == 8 == 4 / Fraction(1, 2)
        assert rep.log_q == 10 ** 8
        assert rep.log_h == Fraction(rep.log_q, rep.log_n ** 2) == 10 ** 6
        for name in ("log_h_le_log_q_over_log2n", "hardness_le_log_h", "N_le_q_pow_log2n"):
            assert rep.verdicts[name]
        assert rep.ok
        excluded = [compute_parameters(1, 4), compute_parameters(Fraction(1, 4), 4)]
        assert all(not r.ok for r in excluded)
        return "D = 8, log q = 10^8, log h = 10^6; tiny n flagged"
    run_criterion(capsys, 9, 1, body)


# -- 10 -------------------------------------------------------------------

def test_criterion_10_preprocessing_contract(capsys):
    def body():
        spec = gf(1)
        P0, _ = planted_instance(spec, 2, 2, np.random.default_rng(4))
        texts = []
        for rhs in (P0.rhs, tuple(1 ^ c for c in P0.rhs)):
            P = boost_soundness(P0.with_rhs(rhs))
            texts.append(build_mwspp(build_hlcpp(P, 1), "explicit"))
        a, b = texts
        la, lb = a.dumps().splitlines(), b.dumps().splitlines()
        assert len(la) == len(lb) and la[0] == lb[0]
        assert a.row_keys == b.row_keys
        diff = [n for n, (x, y) in enumerate(zip(la, lb)) if x != y]
        assert diff
        for n in diff:
            key = a.row_keys[n - 1]
            assert key[0] == "allow"
            # only the trailing target bit differs
            assert la[n][:-1] == lb[n][:-1] and {la[n][-1], lb[n][-1]} == {"0", "1"}
        return f"{len(diff)} of {len(la)} lines differ, all allow-row targets"
    run_criterion(capsys, 10, 10, body)
