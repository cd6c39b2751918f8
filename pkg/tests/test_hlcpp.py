from fractions import Fraction

import numpy as np
import pytest

from pcp_mwspp.errors import BudgetExceeded, NotPowerOfTwo, NotSatisfying
from pcp_mwspp.field import gf
from pcp_mwspp.hlcpp import (EvalVsSum, EvalVsValue, EvalVsWeightedProduct, HlcppInstance, Labeling, apply_pi,
                             apply_sigma, build_hlcpp, check_smoothness, check_uniformity, evaluate_labeling,
                             explicit_labeling_satisfies, hyperedge_satisfied, labeling_from_assignment,
                             labeling_from_tables, prune_degenerate, synthetic_hlcpp, to_explicit,
                             zero_coefficient_fractions)
from pcp_mwspp.pcp import PcpVerifier, honest_prover, make_adversary
from pcp_mwspp.qcsp import QcspInstance, QuadraticPolynomial, boost_soundness, planted_instance


def planted(r, n, seed=1):
    P0, A = planted_instance(gf(r), n, 3, np.random.default_rng(seed))
    return boost_soundness(P0), A


@pytest.fixture(scope="module")
def q8m1():
    P, A = planted(3, 2)
    inst = build_hlcpp(P, 1)
    return P, A, inst, labeling_from_assignment(P, A, inst)


# -- structure ------------------------------------------------------------

@pytest.mark.parametrize("r,m", [(3, 1), (4, 1), (2, 2), (3, 2)])
def test_layer_sizes_and_hyperedge_count(r, m):
    P, _ = planted(r, 1 << m)
    inst = build_hlcpp(P, m)
    q = 1 << r
    sizes = inst.layer_sizes()
    assert len(sizes) == 2 * m + 2
    assert sizes[:2 * m] == [q * q ** j for j in range(2 * m)]
    assert sizes[2 * m + 1] == q ** m
    assert sizes[2 * m] == q ** (m - 1) * (q ** m - 1) // (q - 1)
    assert inst.num_hyperedges == q ** (2 * m + 1)


def test_hyperedges_have_2m_plus_3_vertices():
    P, _ = planted(2, 4)
    inst, _ = prune_degenerate(build_hlcpp(P, 2))
    h = np.flatnonzero(inst.active)
    verts, a, b = inst.hyperedge_vertices(h)
    assert len(verts) == 2 * 2 + 1
    assert np.all(a != b)
    # vertices are distinct because they sit in distinct layers, plus two distinct points
    assert all(v.shape == h.shape for v in verts)


def test_forward_edges_per_vertex():
    P, _ = planted(2, 4)
    inst = build_hlcpp(P, 2)
    q = 4
    for j in range(2 * 2):
        us = [inst.edge_endpoints(j, e)[0] for e in range(inst.num_edges(j))]
        assert np.array_equal(np.bincount(us), np.full(inst.layer_size(j), q))


def test_descriptor_maps_land_in_field():
    spec = gf(3)
    rng = np.random.default_rng(0)
    labels = rng.integers(0, 8, size=(50, 5))
    for d in (EvalVsSum(3), EvalVsWeightedProduct(2, 5, 1, 6), EvalVsValue(4)):
        assert np.all((apply_pi(spec, d, labels) >= 0) & (apply_pi(spec, d, labels) < 8))
        assert np.all((apply_sigma(spec, d, labels) >= 0) & (apply_sigma(spec, d, labels) < 8))
    with pytest.raises(ValueError):
        EvalVsWeightedProduct(1, 0, 0, 1)


def test_needs_power_of_two():
    spec = gf(2)
    P = QcspInstance(spec, 3, (QuadraticPolynomial.build(spec, 3, [((0, 0), 1)]),), (1,))
    with pytest.raises(NotPowerOfTwo):
        build_hlcpp(P, 1)
    P2, _ = planted(4, 4)
    with pytest.raises(BudgetExceeded):
        build_hlcpp(P2, 2, mem_budget=1000)


def test_only_allowable_depends_on_rhs():
    P, _ = planted(3, 2)
    rhs = list(P.rhs)
    rhs[0] ^= 1
    a = build_hlcpp(P, 1).to_json()
    b = build_hlcpp(P.with_rhs(rhs), 1).to_json()
    diff = {k for k in a if a[k] != b[k]}
    assert diff == {"allowable"}


# -- pruning --------------------------------------------------------------

@pytest.mark.parametrize("r,m", [(3, 1), (2, 2)])
def test_alpha_beta_pruned_fraction(r, m):
    P, _ = planted(r, 1 << m)
    _, rep = prune_degenerate(build_hlcpp(P, m), zero_coefficient=False)
    assert rep.alpha_beta == Fraction(1, (1 << r) ** m)


def test_zero_coefficient_fraction_bounded():
    spec = gf(4)
    P = QcspInstance(spec, 2, (QuadraticPolynomial.build(spec, 2, [((0, 0), 1), ((0, 1), 1), ((1, 1), 1)]),), (1,))
    P = boost_soundness(P)
    inst = build_hlcpp(P, 1)
    fr = zero_coefficient_fractions(inst)
    # every boosted equation is a nonzero multiple of the single input equation
    assert all(f <= Fraction(2, 16) for f in fr)
    _, rep = prune_degenerate(inst)
    assert rep.zero_coefficient <= rep.zero_coefficient_bound
    assert rep.total == Fraction(int((~prune_degenerate(inst)[0].active).sum()), inst.num_hyperedges)


def test_zero_coefficient_off_cube_zeros_reported():
    # c(0,0) = c(1,1) = 1 never vanishes on the cube but its extension x y + (1+x)(1+y) does off it
    spec = gf(3)
    P = QcspInstance(spec, 2, (QuadraticPolynomial.build(spec, 2, [((0, 0), 1), ((1, 1), 1)]),), (1,))
    inst = build_hlcpp(P, 1)
    (fr,) = zero_coefficient_fractions(inst)
    assert 0 < fr <= Fraction(2, 8)
    cube = [inst.cgrid[0, a * 8 + b] for a in (0, 1) for b in (0, 1)]
    assert cube == [1, 0, 0, 1]


# -- labelings ------------------------------------------------------------

def test_honest_labeling_properties(q8m1):
    P, A, inst, lab = q8m1
    assert evaluate_labeling(inst, lab) == 1
    sums = np.bitwise_xor.reduce(lab.labels[0][:, 1:], axis=1)
    assert np.array_equal(sums, np.asarray(P.rhs))
    assert [x.shape[1] for x in lab.labels] == [5, 5, 2, 1]
    pruned, _ = prune_degenerate(inst)
    assert evaluate_labeling(pruned, lab) == 1


@pytest.mark.parametrize("r,m", [(4, 1), (2, 2), (3, 2), (4, 2)])
def test_honest_labeling_satisfies_everything(r, m):
    P, A = planted(r, 1 << m)
    inst = build_hlcpp(P, m)
    lab = labeling_from_assignment(P, A, inst)
    assert evaluate_labeling(inst, lab) == 1


def test_labeling_requires_solution(q8m1):
    P, A, inst, _ = q8m1
    bad = list(A)
    bad[1] ^= 2
    with pytest.raises(NotSatisfying):
        labeling_from_assignment(P, bad, inst)


def test_wrong_l0_label_breaks_exactly_its_hyperedges(q8m1):
    P, _, inst, lab = q8m1
    q = 8
    v = 3
    bad = lab.copy()
    bad.labels[0][v, 1] ^= 1          # shifts p(0) + p(1)
    h = np.arange(inst.num_hyperedges)
    sat = hyperedge_satisfied(inst, bad, h)
    through = (h // q ** 2) == v
    assert np.array_equal(~sat, through)
    assert evaluate_labeling(inst, bad) == Fraction(inst.num_hyperedges - q ** 2, inst.num_hyperedges)


def test_empty_labeling_scores_zero(q8m1):
    _, _, inst, _ = q8m1
    assert evaluate_labeling(inst, Labeling.empty(inst)) == 0


def test_labeling_json(q8m1):
    _, _, inst, lab = q8m1
    out = lab.to_json(gf(3))
    assert len(out) == sum(inst.layer_sizes())
    assert all(len(v) == lab.labels[int(k.split(":")[0])].shape[1] for k, v in out.items())


@pytest.mark.parametrize("kind", ["honest", "corrupt_points", "wrong_polynomial", "zero_sums", "random_tables"])
def test_hyperedges_mirror_verifier_q8_m1(kind, q8m1):
    P, A, inst, _ = q8m1
    T = honest_prover(P, A, 1)
    if kind != "honest":
        T = make_adversary(kind, T, P, seed=7, fraction=0.25, patch_sum=True)
    pruned, _ = prune_degenerate(inst)
    h = np.flatnonzero(pruned.active)
    sat = hyperedge_satisfied(pruned, labeling_from_tables(pruned, T), h)
    eq, _, coords = pruned.hyperedge_parts(h)
    acc = PcpVerifier(P, 1).codes(T, eq, coords) == 0
    assert np.array_equal(sat, acc)
    if kind == "honest":
        assert sat.all()


def test_hyperedges_mirror_verifier_m2():
    P, A = planted(2, 4)
    inst, _ = prune_degenerate(build_hlcpp(P, 2))
    T = make_adversary("corrupt_points", honest_prover(P, A, 2), seed=1, fraction=0.2)
    h = np.flatnonzero(inst.active)
    eq, _, coords = inst.hyperedge_parts(h)
    sat = hyperedge_satisfied(inst, labeling_from_tables(inst, T), h)
    assert np.array_equal(sat, PcpVerifier(P, 2).codes(T, eq, coords) == 0)


# -- smoothness -----------------------------------------------------------

def test_smoothness_structural_q16_m2():
    P, _ = planted(4, 4)
    rep = check_smoothness(build_hlcpp(P, 2), sampled_pairs=500, seed=1)
    assert rep.structural_ok and not rep.failures
    assert rep.delta[0] == Fraction(8, 16) and rep.delta[4] == Fraction(2, 16)
    assert rep.statistical_ok
    assert all(v <= 4 * 2 for v in rep.max_agreement.values())


class DuplicatedPoint(HlcppInstance):
    def forward_eval_points(self, j, u):
        pts = super().forward_eval_points(j, u)
        if (j, u) == (1, 5):
            pts = pts.copy()
            pts[-1] = pts[0]
        return pts


def test_smoothness_defect_is_named():
    P, _ = planted(3, 2)
    rep = check_smoothness(DuplicatedPoint(P, 1))
    assert not rep.structural_ok
    assert rep.failures == [(1, 5)]


def test_sampled_pair_collisions_bounded():
    P, _ = planted(3, 4)
    rep = check_smoothness(build_hlcpp(P, 2), sampled_pairs=2000, seed=3)
    # worst-case pairs differ by a polynomial with 4m roots: exactly 8 collisions of 8 points allowed
    assert rep.statistical_ok
    assert max(rep.max_agreement.values()) <= 8


# -- uniformity -----------------------------------------------------------

def test_uniformity_unpruned_q8_m1():
    P, _ = planted(3, 2)
    rep = check_uniformity(build_hlcpp(P, 1))
    assert rep.ok
    ok, lo, hi = rep.condition1[3]
    assert ok and lo == hi == 2 * 8 * 8


def test_uniformity_after_pruning_deviation_bounded():
    P, _ = planted(3, 2)
    inst, prune = prune_degenerate(build_hlcpp(P, 1))
    rep = check_uniformity(inst)
    assert rep.pruned_fraction == prune.total
    for ok, tv in rep.condition2.values():
        assert tv <= prune.total


def test_uniformity_budget():
    P, _ = planted(3, 2)
    with pytest.raises(BudgetExceeded):
        check_uniformity(build_hlcpp(P, 1), budget=10)


# -- explicit instances ---------------------------------------------------

def test_to_explicit_matches_implicit():
    P0, A = planted_instance(gf(1), 2, 2, np.random.default_rng(4))
    P = boost_soundness(P0)
    inst = build_hlcpp(P, 1)
    ex = to_explicit(inst)
    lab = labeling_from_assignment(P, A, inst)
    ids = [ex.label_ids(j, lab.labels[j]) for j in range(ex.num_layers)]
    assert explicit_labeling_satisfies(ex, ids) == 1
    assert len(ex.hyperedges) == int(np.sum(inst.cgrid[np.arange(inst.num_hyperedges) // 4,
                                                     np.arange(inst.num_hyperedges) % 4] != 0))
    with pytest.raises(BudgetExceeded):
        to_explicit(inst, budget=10)


def test_synthetic_planted_labeling():
    inst, lab = synthetic_hlcpp((3, 4, 5), 4, np.random.default_rng(2), hyperedges=10)
    assert explicit_labeling_satisfies(inst, lab) == 1
    assert all(len(he) == 3 for he in inst.hyperedges)
