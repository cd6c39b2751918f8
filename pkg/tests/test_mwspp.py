from fractions import Fraction

import numpy as np
import pytest

from pcp_mwspp.errors import BudgetExceeded, EmptySet, Infeasible, InfeasibleTarget, NotSatisfying
from pcp_mwspp.field import gf
from pcp_mwspp.hlcpp import (ExplicitHlcpp, build_hlcpp, evaluate_labeling, hyperedge_satisfied,
                             labeling_from_assignment, synthetic_hlcpp)
from pcp_mwspp.mwspp import (LabelSets, MwsppExplicit, brute_force_min_weight, brute_force_ncp, build_mwspp,
                             check_fixed_forms, collision_filter, empirical_success_frequency,
                             honest_solution, hyperedge_success_probability, markov_prune, mwspp_to_ncp,
                             random_explicit, randomized_decode, solution_weight, solve_fixed,
                             surviving_hyperedges)
from pcp_mwspp.qcsp import QcspInstance, QuadraticPolynomial, boost_soundness, planted_instance


@pytest.fixture(scope="module")
def honest_q8():
    P0, A = planted_instance(gf(3), 2, 3, np.random.default_rng(1))
    P = boost_soundness(P0)
    hl = build_hlcpp(P, 1)
    imp = build_mwspp(hl)
    lab = labeling_from_assignment(P, A, hl)
    return P, hl, imp, lab, honest_solution(lab, imp)


def unsat_explicit():
    """Two L0 vertices joined by identity edges to one L1 vertex, with
    allowable parts that no common label can meet."""
    ident = np.tile(np.arange(3), (2, 1))
    edges = [(np.array([0, 1]), np.array([0, 0]), ident, ident, np.array([3, 3]))]
    parts = np.array([[0, 1, 1], [1, 0, 1]])
    return ExplicitHlcpp((2, 1), (3, 3), edges, [[(0, 0), (0, 1)]], parts, np.array([0, 0]))


def rounding_example():
    """Feasible heavy solution: XOR of three honest solutions at q=8, m=1.

    The system z2*z2 = 1 is solved by (z1, 1) for every z1, so distinct z1
    give distinct honest label cover solutions whose XOR still passes every
    fixed form.
    """
    spec = gf(3)
    Q = QcspInstance(spec, 2, (QuadraticPolynomial.build(spec, 2, [((1, 1), 1)]),), (1,))
    P = boost_soundness(Q)
    hl = build_hlcpp(P, 1)
    imp = build_mwspp(hl)
    sols = [honest_solution(labeling_from_assignment(P, (z, 1), hl), imp) for z in (0, 1, 2)]
    return hl, imp, LabelSets.symmetric_difference(*sols)


# -- building -------------------------------------------------------------

def test_explicit_row_counts_synthetic():
    inst, planted = synthetic_hlcpp((2, 3, 2), 4, np.random.default_rng(0), hyperedges=6)
    ex = build_mwspp(inst, "explicit")
    assert ex.num_vars == (2 + 3 + 2) * 4
    kinds = [k[0] for k in ex.row_keys]
    assert kinds.count("parity") == 7
    n_edges = sum(e[0].shape[0] for e in inst.edges)
    assert kinds.count("edge") == 4 * n_edges
    n_parts = sum(len(np.unique(inst.parts[v])) for v in range(2))
    assert kinds.count("allow") == n_parts
    assert len(ex.var_rows) == ex.num_vars
    assert ex.scale == 12 and sorted(set(ex.multiplicities)) == [4, 6]


def test_explicit_budget():
    inst, _ = synthetic_hlcpp((2, 3, 2), 4, np.random.default_rng(0))
    with pytest.raises(BudgetExceeded):
        build_mwspp(inst, "explicit", budget=10)


def test_explicit_invariants():
    with pytest.raises(ValueError):
        MwsppExplicit(2, [(0, 2)], [1], [("row", 0)], [], [])
    with pytest.raises(ValueError):
        MwsppExplicit(2, [(0,)], [1], [("row", 0)], [(1,)], [0])
    with pytest.raises(ValueError):
        MwsppExplicit(2, [(0,)], [], [], [], [])


def test_target_changes_only_allow_rhs():
    rng = np.random.default_rng(2)
    inst, _ = synthetic_hlcpp((3, 2, 2), 3, rng, num_parts=3)
    a = build_mwspp(inst, "explicit")
    inst.allowable = (inst.allowable + 1) % 3
    b = build_mwspp(inst, "explicit")
    assert a.fixed_rows == b.fixed_rows and a.var_rows == b.var_rows
    changed = [k for k, s, t in zip(a.row_keys, a.targets, b.targets) if s != t]
    assert changed and all(k[0] == "allow" for k in changed)


# -- honest solutions -----------------------------------------------------

def test_honest_implicit_q8(honest_q8):
    _, hl, imp, _, sol = honest_q8
    assert check_fixed_forms(imp, sol) == []
    assert solution_weight(imp, sol) == 2 * hl.m + 2
    assert all(np.all(sol.sizes(j) == 1) for j in range(hl.num_layers))


def test_honest_requires_satisfying_labeling(honest_q8):
    _, hl, imp, lab, _ = honest_q8
    bad = lab.copy()
    bad.labels[hl.num_layers - 1][0, 0] ^= 1
    with pytest.raises(NotSatisfying):
        honest_solution(bad, imp)
    partial = lab.copy()
    partial.assigned[1][0] = False
    with pytest.raises(NotSatisfying):
        honest_solution(partial, imp)


def test_deleted_label_violates_parity(honest_q8):
    _, _, imp, _, sol = honest_q8
    d = sol.to_dict()
    del d[(1, 5)]
    broken = LabelSets.from_dict(imp, d)
    assert ("parity", 1, 5) in check_fixed_forms(imp, broken)


def test_swapped_l0_label_violates_two_allow_rows(honest_q8):
    _, hl, imp, _, sol = honest_q8
    bad = sol.copy()
    v = 4
    old = int(np.bitwise_xor.reduce(bad.labels[0][v, 1:]))
    bad.labels[0][v, 1] ^= 1          # moves p(0) + p(1) to another part
    new = old ^ 1
    allow = [k for k in check_fixed_forms(imp, bad) if k[0] == "allow"]
    assert allow == sorted([("allow", v, old), ("allow", v, new)])


def test_weight_adds_one_per_extra_l0_label(honest_q8):
    _, hl, imp, _, sol = honest_q8
    d = sol.to_dict()
    for v in range(hl.layer_size(0)):
        extra = list(d[(0, v)][0])
        extra[0] ^= 1
        d[(0, v)] = d[(0, v)] + (tuple(extra),)
    assert solution_weight(imp, LabelSets.from_dict(imp, d)) == 2 * hl.m + 3
    assert solution_weight(imp, LabelSets.from_dict(imp, {})) == 0


# -- explicit oracles -----------------------------------------------------

@pytest.mark.parametrize("sizes,R,seed", [((1, 1, 2), 2, 3), ((2, 2, 2), 2, 4), ((1, 2, 2), 3, 5)])
def test_brute_force_min_equals_honest_weight(sizes, R, seed):
    inst, planted = synthetic_hlcpp(sizes, R, np.random.default_rng(seed), hyperedges=3)
    ex = build_mwspp(inst, "explicit")
    imp = build_mwspp(inst)
    sol = honest_solution(planted, imp)
    assert check_fixed_forms(ex, sol) == check_fixed_forms(imp, sol) == []
    w, x = brute_force_min_weight(ex)
    assert Fraction(w, ex.scale) == solution_weight(imp, sol) == len(sizes)
    assert ex.weight(np.array(x)) == w and ex.violations(np.array(x)) == []


def test_unsatisfiable_pattern_exceeds_honest_weight():
    inst = unsat_explicit()
    ex = build_mwspp(inst, "explicit")
    w, _ = brute_force_min_weight(ex)
    assert Fraction(w, ex.scale) > inst.num_layers


def test_brute_force_infeasible_and_budget():
    ex = MwsppExplicit(2, [(0, 1), (0, 1)], [0, 1], [("row", 0), ("row", 1)], [(0,)], [1])
    with pytest.raises(Infeasible):
        brute_force_min_weight(ex)
    with pytest.raises(InfeasibleTarget):
        solve_fixed(ex)
    with pytest.raises(BudgetExceeded):
        brute_force_min_weight(random_explicit(np.random.default_rng(0), 30, 2, 2))


def test_explicit_and_implicit_agree_on_perturbed_solutions():
    rng = np.random.default_rng(8)
    inst, planted = synthetic_hlcpp((2, 2, 3), 3, rng, hyperedges=5)
    ex = build_mwspp(inst, "explicit")
    imp = build_mwspp(inst)
    for _ in range(40):
        sets = {}
        for j, s in enumerate(inst.layer_sizes):
            for v in range(s):
                pick = np.flatnonzero(rng.random(3) < 0.4)
                sets[(j, v)] = [(int(l),) for l in pick]
        sol = LabelSets.from_dict(imp, sets)
        bits = ex.to_bits(sol)
        assert ex.violations(sol) == check_fixed_forms(imp, sol)
        assert ex.normalized_weight(sol) == solution_weight(imp, sol)
        assert ex.normalized_weight(bits) == solution_weight(ex, sol)


def test_pcp_derived_explicit_matches_implicit():
    P0, A = planted_instance(gf(1), 2, 2, np.random.default_rng(4))
    P = boost_soundness(P0)
    hl = build_hlcpp(P, 1)
    ex = build_mwspp(hl, "explicit")
    imp = build_mwspp(hl)
    sol = honest_solution(labeling_from_assignment(P, A, hl), imp)
    assert ex.violations(sol) == [] and ex.normalized_weight(sol) == 4
    rng = np.random.default_rng(0)
    for _ in range(10):
        bad = sol.copy()
        j = int(rng.integers(0, hl.num_layers))
        n = int(rng.integers(0, bad.labels[j].shape[0]))
        bad.labels[j][n, 0] ^= 1
        got = [k for k in ex.violations(bad) if k[0] != "allow"]
        want = [k for k in check_fixed_forms(imp, bad) if k[0] != "allow"]
        assert got == want
        assert {k[0] for k in ex.violations(bad)} == {k[0] for k in check_fixed_forms(imp, bad)}


def test_serialization_round_trip():
    inst, _ = synthetic_hlcpp((2, 2), 3, np.random.default_rng(1))
    ex = build_mwspp(inst, "explicit")
    text = ex.dumps()
    back = MwsppExplicit.loads(text)
    assert back.dumps() == text
    assert back.targets == ex.targets and back.multiplicities == ex.multiplicities
    with pytest.raises(ValueError):
        MwsppExplicit.loads(text.replace("fixed=", "fixed=1"))


# -- NCP ------------------------------------------------------------------

def test_ncp_zero_target():
    rng = np.random.default_rng(5)
    ex = random_explicit(rng, 8, 3, 5)
    ex.targets = [0] * len(ex.targets)
    ncp = mwspp_to_ncp(ex)
    assert not ncp.target.any()
    assert brute_force_ncp(ncp) == 0 == brute_force_min_weight(ex)[0]


def test_ncp_matches_brute_force_50_instances():
    rng = np.random.default_rng(11)
    for _ in range(50):
        ex = random_explicit(rng, int(rng.integers(4, 15)), int(rng.integers(1, 6)), int(rng.integers(1, 8)))
        assert brute_force_ncp(mwspp_to_ncp(ex)) == brute_force_min_weight(ex)[0]


def test_ncp_preserves_honest_optimum():
    inst, _ = synthetic_hlcpp((1, 2, 2), 2, np.random.default_rng(6), hyperedges=3)
    ex = build_mwspp(inst, "explicit")
    assert brute_force_ncp(mwspp_to_ncp(ex)) == brute_force_min_weight(ex)[0] == 3 * ex.scale


def test_ncp_dumps_shape():
    ex = random_explicit(np.random.default_rng(0), 5, 2, 3)
    lines = mwspp_to_ncp(ex).dumps().splitlines()
    assert lines[0].startswith("ncp n=")
    assert lines[-1].startswith("t ")


# -- decoder --------------------------------------------------------------

def test_decode_honest_is_honest(honest_q8):
    _, hl, _, lab, sol = honest_q8
    dec = randomized_decode(sol, 123)
    assert all(np.array_equal(a, b) for a, b in zip(dec.labels, lab.labels))
    assert evaluate_labeling(hl, dec) == 1


def test_decode_determinism():
    _, _, sol = rounding_example()
    a, b, c = (randomized_decode(sol, s) for s in (1, 1, 2))
    assert all(np.array_equal(x, y) for x, y in zip(a.labels, b.labels))
    assert any(not np.array_equal(x, y) for x, y in zip(a.labels, c.labels))


def test_decode_empty_set(honest_q8):
    _, _, imp, _, sol = honest_q8
    d = sol.to_dict()
    del d[(2, 0)]
    with pytest.raises(EmptySet):
        randomized_decode(LabelSets.from_dict(imp, d), 0)


# -- soundness counting steps ----------------------------------------------

def test_markov_honest_removes_nothing(honest_q8):
    *_, sol = honest_q8
    for rho in (1, 2, 5):
        pruned, rep = markov_prune(sol, rho)
        assert all(not r for r in rep.removed.values()) and rep.ok
        assert all(np.array_equal(a, b) for a, b in zip(pruned.labels, sol.labels))


def test_markov_removes_exactly_heavy_vertex(honest_q8):
    _, _, imp, _, sol = honest_q8
    rho = 2
    d = sol.to_dict()
    base = d[(1, 7)][0]
    d[(1, 7)] = tuple(tuple([base[0] ^ t] + list(base[1:])) for t in range(rho + 1))
    pruned, rep = markov_prune(LabelSets.from_dict(imp, d), rho)
    assert rep.removed == {0: [], 1: [7], 2: [], 3: []}
    assert pruned.sizes(1)[7] == 0 and pruned.sizes(1).sum() == imp.layer_size(1) - 1


def test_markov_bound_on_heavy_solution():
    _, imp, sol = rounding_example()
    w = solution_weight(imp, sol)
    for rho in (1, 2, 3):
        _, rep = markov_prune(sol, rho)
        assert rep.ok
        assert rep.weight_bound == w / rho
        for j, f in rep.fractions.items():
            assert f <= rep.layer_bounds[j] <= w / rho


def test_rounding_probability_on_construction():
    hl, imp, sol = rounding_example()
    rho = 3
    assert check_fixed_forms(imp, sol) == []
    assert solution_weight(imp, sol) == Fraction(23, 2)
    pruned, mrep = markov_prune(sol, rho)
    assert mrep.ok
    col = collision_filter(imp, pruned, rho)
    assert col.ok
    surv = surviving_hyperedges(imp, pruned, col, rho)
    assert surv.size > 0
    bound = Fraction(1, rho ** (2 * hl.m + 3))
    probs = [hyperedge_success_probability(imp, pruned, h) for h in surv]
    assert min(probs) >= bound
    # exact probability agrees with the decoder frequency up to sampling noise
    seeds = range(2000)
    emp = empirical_success_frequency(imp, pruned, surv[:10], seeds)
    for p, f in zip(probs[:10], emp):
        sd = np.sqrt(float(p) * (1 - float(p)) / len(seeds))
        assert abs(float(f) - float(p)) <= 5 * sd + 1e-9


def test_decoder_frequency_meets_rounding_bound_10k_seeds():
    hl, imp, sol = rounding_example()
    rho = 3
    pruned, _ = markov_prune(sol, rho)
    col = collision_filter(imp, pruned, rho)
    surv = surviving_hyperedges(imp, pruned, col, rho)
    emp = empirical_success_frequency(imp, pruned, surv, range(10 ** 4))
    assert min(emp) >= Fraction(1, rho ** (2 * hl.m + 3))


def test_success_probability_singletons(honest_q8):
    _, hl, imp, lab, sol = honest_q8
    h = np.flatnonzero(hl.active)[:50]
    assert all(hyperedge_success_probability(imp, sol, x) == 1 for x in h)
    assert hyperedge_satisfied(hl, lab, h).all()
