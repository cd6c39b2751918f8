"""Hyper-graph label cover built from the PCP, plus a small explicit variant.

Layout of the PCP-derived instance (k equations, F_q^m):

* layer j < 2m: vertices (i, a_1..a_j), index i*q^j + prefix; labels are
  degree-4m coefficient vectors;
* layer 2m: canonical lines (geometry order); labels degree-m vectors;
* layer 2m+1: points of F_q^m; labels are field elements.

Hyperedge h = i*q^{2m} + index(a_1..a_2m); its layer-j vertex is
h // q^{2m-j}.  Forward edges of a layer-j vertex u (j < 2m) are
identified by (u, a) with id u*q + a; line-to-point edges by
line*q + t.  For m >= 2 the edge from (i, a_1..a_{2m-1}) whose a_{2m}
makes beta = alpha goes to the axis-parallel line through alpha in the
last coordinate direction (every line through alpha would qualify).
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, NotPowerOfTwo, NotSatisfying
from .pcp import coefficient_grid, geometry, honest_prover, log2_exact, _digits, _index
from .qcsp import evaluate_qcsp
from .sumcheck import sum01_rows


# ---------------------------------------------------------------------------
# constraint descriptors

@dataclass(frozen=True)
class EvalVsSum:
    """pi: p -> p(a); sigma: p' -> p'(0) + p'(1)."""
    a: int


@dataclass(frozen=True)
class EvalVsWeightedProduct:
    """pi: p -> p(a); sigma: g -> c g(t_alpha) g(t_beta)."""
    a: int
    c: int
    t_alpha: int
    t_beta: int

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("weighted edge with c = 0 is not many-to-many")


@dataclass(frozen=True)
class EvalVsValue:
    """pi: g -> g(t); sigma: identity on field elements."""
    t: int


def apply_pi(spec, desc, labels):
    labels = np.atleast_2d(np.asarray(labels, dtype=np.int64))
    x = desc.t if isinstance(desc, EvalVsValue) else desc.a
    return spec.horner(labels, np.full(labels.shape[0], x, dtype=np.int64))


def apply_sigma(spec, desc, labels):
    labels = np.atleast_2d(np.asarray(labels, dtype=np.int64))
    if isinstance(desc, EvalVsSum):
        return sum01_rows(labels)
    if isinstance(desc, EvalVsWeightedProduct):
        n = labels.shape[0]
        ga = spec.horner(labels, np.full(n, desc.t_alpha, dtype=np.int64))
        gb = spec.horner(labels, np.full(n, desc.t_beta, dtype=np.int64))
        return spec.mul_arr(desc.c, spec.mul_arr(ga, gb))
    return labels[:, 0].copy()


# ---------------------------------------------------------------------------
# PCP-derived instance

class HlcppInstance:
    """Implicit label cover instance for the PCP of a quadratic system.

    Only ``allowable`` (the right-hand sides C_i) depends on the input; it
    is never read while the rest of the structure is built.
    """

    def __init__(self, P, m, mem_budget=1 << 26):
        self.spec, self.m, self.k = P.spec, m, P.k
        log2_exact(P.n)
        if P.n != 1 << m:
            raise NotPowerOfTwo(f"n = {P.n} is not 2^{m}")
        q = self.spec.q
        if P.k * q ** (2 * m) > mem_budget:
            raise BudgetExceeded(f"{P.k * q ** (2 * m)} hyperedges exceed the memory budget {mem_budget}")
        self.lhs = P.lhs
        self.allowable = np.asarray(P.rhs, dtype=np.int64)
        self.geo = geometry(self.spec, m, mem_budget)
        self.cgrid = coefficient_grid(P, m)
        self.num_hyperedges = P.k * q ** (2 * m)
        self.edge_line, self.edge_ta, self.edge_tb = self._edge_lines()
        self.pruned_alpha_beta = np.zeros(self.num_hyperedges, dtype=bool)
        self.pruned_zero_c = np.zeros(self.num_hyperedges, dtype=bool)

    def _edge_lines(self):
        geo, m, q = self.geo, self.m, self.spec.q
        line = geo.pair_line.copy()
        ta, tb = geo.pair_ta.copy(), geo.pair_tb.copy()
        if m >= 2:
            deg = np.flatnonzero(line < 0)
            pts = geo.coords[deg // q ** m]
            base = pts.copy()
            base[:, m - 1] = 0
            axis = np.zeros(m, dtype=np.int64)
            axis[m - 1] = 1
            d_idx = _index(axis, q)
            b_idx = _index(base, q)
            lookup = {(int(d), int(b)): i for i, (d, b) in enumerate(zip(geo.line_dir, geo.line_base))}
            line[deg] = [lookup[(int(d_idx), int(b))] for b in b_idx]
            ta[deg] = pts[:, m - 1]
            tb[deg] = pts[:, m - 1]
        return line, ta, tb

    # -- sizes -----------------------------------------------------------
    @property
    def num_layers(self):
        return 2 * self.m + 2

    def layer_size(self, j):
        q, m = self.spec.q, self.m
        if j < 2 * m:
            return self.k * q ** j
        if j == 2 * m:
            return self.geo.num_lines
        return q ** m

    def layer_sizes(self):
        return [self.layer_size(j) for j in range(self.num_layers)]

    def label_width(self, j):
        m = self.m
        return 4 * m + 1 if j < 2 * m else (m + 1 if j == 2 * m else 1)

    def label_domain_size(self, j):
        return self.spec.q ** self.label_width(j)

    @property
    def active(self):
        return ~(self.pruned_alpha_beta | self.pruned_zero_c)

    def pruned_fraction(self):
        return Fraction(int((~self.active).sum()), self.num_hyperedges)

    # -- hyperedge decoding ---------------------------------------------
    def hyperedge_parts(self, h):
        """(equation, pair index, coords (H, 2m)) for hyperedge ids ``h``."""
        q, m = self.spec.q, self.m
        h = np.asarray(h, dtype=np.int64)
        i = h // q ** (2 * m)
        pair = h % q ** (2 * m)
        coords = _digits(pair, 2 * m, q).reshape(h.shape + (2 * m,))
        return i, pair, coords

    def hyperedge_vertices(self, h):
        """Vertex per layer: list of 2m+1 arrays plus (alpha, beta) point indices."""
        q, m = self.spec.q, self.m
        h = np.asarray(h, dtype=np.int64)
        _, pair, _ = self.hyperedge_parts(h)
        verts = [h // q ** (2 * m - j) for j in range(2 * m)]
        verts.append(self.edge_line[pair])
        return verts, pair // q ** m, pair % q ** m

    def edge_descriptor(self, j, e):
        """Constraint on forward edge ``e`` out of layer ``j``."""
        q, m = self.spec.q, self.m
        if j < 2 * m - 1:
            return EvalVsSum(int(e % q))
        if j == 2 * m - 1:
            i, pair, _ = self.hyperedge_parts(e)
            return EvalVsWeightedProduct(int(e % q), int(self.cgrid[i, pair]),
                                         int(self.edge_ta[pair]), int(self.edge_tb[pair]))
        return EvalVsValue(int(e % q))

    def edge_endpoints(self, j, e):
        q, m = self.spec.q, self.m
        if j < 2 * m - 1:
            return int(e // q), int(e)
        if j == 2 * m - 1:
            return int(e // q), int(self.edge_line[e % q ** (2 * m)])
        return int(e // q), int(self.geo.line_points[e // q, e % q])

    def forward_eval_points(self, j, u):
        """Evaluation points of the pi maps on u's forward edges."""
        return np.arange(self.spec.q, dtype=np.int64)

    def num_edges(self, j):
        return self.layer_size(j) * self.spec.q

    def to_json(self):
        """Structural description; ``allowable`` is the only input-dependent field."""
        return {
            "spec": self.spec.to_json(), "m": self.m, "k": self.k,
            "layer_sizes": self.layer_sizes(),
            "label_widths": [self.label_width(j) for j in range(self.num_layers)],
            "lhs": [[[s, t, self.spec.to_hex(c)] for (s, t), c in p.terms.items()] for p in self.lhs],
            "pruned_hyperedges": [int(h) for h in np.flatnonzero(~self.active)],
            "allowable": [self.spec.to_hex(c) for c in self.allowable],
        }


def build_hlcpp(P, m, mem_budget=1 << 26):
    return HlcppInstance(P, m, mem_budget)


@dataclass(frozen=True)
class PruneReport:
    alpha_beta: Fraction
    zero_coefficient: Fraction
    total: Fraction
    zero_coefficient_bound: Fraction    # 2m/q, per equation

    def to_json(self):
        return {k: str(v) for k, v in self.__dict__.items()}


def prune_degenerate(inst, alpha_beta=True, zero_coefficient=True):
    """Mark hyperedges with alpha = beta and/or c_i(alpha, beta) = 0 as removed."""
    import copy
    out = copy.copy(inst)
    q, m = inst.spec.q, inst.m
    h = np.arange(inst.num_hyperedges, dtype=np.int64)
    i, pair, _ = inst.hyperedge_parts(h)
    ab = (pair // q ** m) == (pair % q ** m)
    zc = inst.cgrid[i, pair] == 0
    out.pruned_alpha_beta = ab if alpha_beta else np.zeros_like(ab)
    out.pruned_zero_c = zc if zero_coefficient else np.zeros_like(zc)
    H = inst.num_hyperedges
    rep = PruneReport(Fraction(int(out.pruned_alpha_beta.sum()), H),
                      Fraction(int(out.pruned_zero_c.sum()), H),
                      out.pruned_fraction(), Fraction(2 * m, q))
    return out, rep


def zero_coefficient_fractions(inst):
    """Per equation, the fraction of (alpha, beta) where the coefficient extension vanishes."""
    n = inst.cgrid.shape[1]
    return [Fraction(int((row == 0).sum()), n) for row in inst.cgrid]


# ---------------------------------------------------------------------------
# labelings

@dataclass
class Labeling:
    """Per-layer label arrays with an ``assigned`` mask (partial labelings allowed)."""
    labels: list
    assigned: list

    @classmethod
    def empty(cls, inst):
        labels = [np.zeros((inst.layer_size(j), inst.label_width(j)), dtype=np.int64)
                  for j in range(inst.num_layers)]
        return cls(labels, [np.zeros(inst.layer_size(j), dtype=bool) for j in range(inst.num_layers)])

    def copy(self):
        return Labeling([x.copy() for x in self.labels], [x.copy() for x in self.assigned])

    def to_json(self, spec):
        h = spec.to_hex
        out = {}
        for j, (lab, mask) in enumerate(zip(self.labels, self.assigned)):
            for v in np.flatnonzero(mask):
                out[f"{j}:{v}"] = [h(c) for c in lab[v]]
        return out


def labeling_from_tables(inst, T):
    m, k = inst.m, inst.k
    labels = [T.psums[j].reshape(k * inst.spec.q ** j, 4 * m + 1).copy() for j in range(2 * m)]
    labels.append(T.lines.copy())
    labels.append(T.points.reshape(-1, 1).copy())
    return Labeling(labels, [np.ones(x.shape[0], dtype=bool) for x in labels])


def labeling_from_assignment(P, A, inst):
    if evaluate_qcsp(P, A) != 1:
        raise NotSatisfying("assignment does not satisfy every equation")
    return labeling_from_tables(inst, honest_prover(P, A, inst.m))


def hyperedge_satisfied(inst, lab, h):
    """Boolean per hyperedge id: all 2m+2 edges hold and the L0 label is allowable."""
    spec, q, m = inst.spec, inst.spec.q, inst.m
    h = np.asarray(h, dtype=np.int64)
    i, pair, coords = inst.hyperedge_parts(h)
    verts, a_pt, b_pt = inst.hyperedge_vertices(h)
    ok = np.ones(h.shape[0], dtype=bool)
    for j, v in enumerate(verts):
        ok &= lab.assigned[j][v]
    ok &= lab.assigned[2 * m + 1][a_pt] & lab.assigned[2 * m + 1][b_pt]
    ok &= sum01_rows(lab.labels[0][verts[0]]) == inst.allowable[i]
    for j in range(2 * m - 1):
        pi = spec.horner(lab.labels[j][verts[j]], coords[:, j])
        sigma = sum01_rows(lab.labels[j + 1][verts[j + 1]])
        ok &= pi == sigma
    g = lab.labels[2 * m][verts[2 * m]]
    ga = spec.horner(g, inst.edge_ta[pair])
    gb = spec.horner(g, inst.edge_tb[pair])
    pi = spec.horner(lab.labels[2 * m - 1][verts[2 * m - 1]], coords[:, 2 * m - 1])
    ok &= pi == spec.mul_arr(inst.cgrid[i, pair], spec.mul_arr(ga, gb))
    pts = lab.labels[2 * m + 1][:, 0]
    ok &= (ga == pts[a_pt]) & (gb == pts[b_pt])
    return ok


def evaluate_labeling(inst, lab, chunk=1 << 18):
    """Exact fraction of (non-pruned) hyperedges satisfied."""
    h_all = np.flatnonzero(inst.active)
    if not h_all.size:
        return Fraction(0)
    sat = 0
    for s in range(0, h_all.size, chunk):
        sat += int(hyperedge_satisfied(inst, lab, h_all[s:s + chunk]).sum())
    return Fraction(sat, h_all.size)


# ---------------------------------------------------------------------------
# smoothness and uniformity

@dataclass
class SmoothnessReport:
    structural_ok: bool
    failures: list                 # (layer, vertex) whose forward points repeat or miss values
    delta: dict                    # layer -> certified delta as a Fraction
    sampled_pairs: int = 0
    max_agreement: dict = field(default_factory=dict)   # layer -> max agreements seen
    statistical_ok: bool = True

    def to_json(self):
        return {"structural_ok": self.structural_ok, "failures": [list(f) for f in self.failures],
                "delta": {str(k): str(v) for k, v in self.delta.items()},
                "sampled_pairs": self.sampled_pairs,
                "max_agreement": {str(k): v for k, v in self.max_agreement.items()},
                "statistical_ok": self.statistical_ok}


def _roots_poly(spec, roots, scale, width):
    """Coefficients of scale * prod (z - r), padded to ``width``."""
    coeffs = [scale]
    for r in roots:
        nxt = [0] * (len(coeffs) + 1)
        for d, c in enumerate(coeffs):
            nxt[d + 1] ^= c
            nxt[d] ^= spec.mul(c, r)
        coeffs = nxt
    return np.asarray(coeffs + [0] * (width - len(coeffs)), dtype=np.int64)


def check_smoothness(inst, sampled_pairs=0, seed=0):
    """Structural check on every vertex plus sampled label pairs.

    Structural: the forward pi maps of each vertex in layers 0..2m evaluate
    at pairwise distinct points covering F_q, so two distinct labels of
    degree <= d collide on at most d of the q forward edges.
    """
    spec, q, m = inst.spec, inst.spec.q, inst.m
    failures = []
    full = np.arange(q, dtype=np.int64)
    for j in range(2 * m + 1):
        for u in range(inst.layer_size(j)):
            pts = np.sort(np.asarray(inst.forward_eval_points(j, u), dtype=np.int64))
            if pts.shape != full.shape or not np.array_equal(pts, full):
                failures.append((j, u))
    delta = {j: Fraction(min(4 * m if j < 2 * m else m, q), q) for j in range(2 * m + 1)}
    rep = SmoothnessReport(not failures, failures, delta)
    if sampled_pairs:
        rng = np.random.default_rng(seed)
        rep.sampled_pairs = sampled_pairs
        for n in range(sampled_pairs):
            j = int(rng.integers(0, 2 * m + 1))
            u = int(rng.integers(0, inst.layer_size(j)))
            w = inst.label_width(j)
            d = w - 1
            l1 = rng.integers(0, q, size=w)
            if n % 2 and q > 1:
                # worst case: differ by a polynomial with d distinct roots
                roots = rng.permutation(q)[:min(d, q - 1)]
                diff = _roots_poly(spec, [int(r) for r in roots], int(rng.integers(1, q)), w)
            else:
                diff = rng.integers(0, q, size=w)
                if not diff.any():
                    diff[0] = 1
            l2 = l1 ^ diff
            pts = np.asarray(inst.forward_eval_points(j, u), dtype=np.int64)
            agree = int(np.sum(spec.horner(np.tile(l1, (pts.size, 1)), pts)
                               == spec.horner(np.tile(l2, (pts.size, 1)), pts)))
            rep.max_agreement[j] = max(rep.max_agreement.get(j, 0), agree)
            if Fraction(agree, q) > delta[j]:
                rep.statistical_ok = False
    return rep


@dataclass
class UniformityReport:
    condition1: dict       # layer -> (ok, min count, max count)
    condition2: dict       # layer pair -> (ok, total variation distance)
    pruned_fraction: Fraction

    @property
    def ok(self):
        return all(v[0] for v in self.condition1.values()) and all(v[0] for v in self.condition2.values())

    def to_json(self):
        return {"ok": self.ok,
                "condition1": {str(k): [v[0], v[1], v[2]] for k, v in self.condition1.items()},
                "condition2": {str(k): [v[0], str(v[1])] for k, v in self.condition2.items()},
                "pruned_fraction": str(self.pruned_fraction)}


def check_uniformity(inst, budget=1 << 24):
    """Exact per-vertex hyperedge counts and the induced edge distributions.

    Condition 2 compares "uniform hyperedge, then uniform edge inside it"
    against the uniform distribution on all edges of the unpruned
    instance, reporting the total variation distance.
    """
    if inst.num_hyperedges > budget:
        raise BudgetExceeded(f"{inst.num_hyperedges} hyperedges exceed the enumeration budget {budget}")
    q, m = inst.spec.q, inst.m
    h = np.flatnonzero(inst.active)
    H = h.size
    verts, a_pt, b_pt = inst.hyperedge_vertices(h)
    _, pair, _ = inst.hyperedge_parts(h)
    cond1 = {}
    for j in range(2 * m + 1):
        c = np.bincount(verts[j], minlength=inst.layer_size(j))
        cond1[j] = (bool(c.min() == c.max()), int(c.min()), int(c.max()))
    c = np.bincount(a_pt, minlength=q ** m) + np.bincount(b_pt, minlength=q ** m)
    cond1[2 * m + 1] = (bool(c.min() == c.max()), int(c.min()), int(c.max()))

    cond2 = {}
    for j in range(2 * m + 1):
        E = inst.num_edges(j)
        if j < 2 * m - 1:
            ids, per = [verts[j + 1]], 1
        elif j == 2 * m - 1:
            ids, per = [h % (inst.layer_size(j) * q)], 1
        else:
            line = verts[2 * m]
            ids, per = [line * q + inst.edge_ta[pair], line * q + inst.edge_tb[pair]], 2
        cnt = sum(np.bincount(x, minlength=E) for x in ids)
        # P_B(e) = cnt / (H per), P_A(e) = 1 / E
        num = np.abs(cnt.astype(object) * E - H * per)
        tv = Fraction(int(num.sum()), 2 * H * per * E) if H else Fraction(1)
        cond2[(j, j + 1)] = (tv == 0, tv)
    return UniformityReport(cond1, cond2, inst.pruned_fraction())


# ---------------------------------------------------------------------------
# explicit (materialised) label cover for tiny instances

@dataclass
class ExplicitHlcpp:
    """Fully tabulated instance.

    edges[j] = (u, v, pi, sigma, re) for layer pair j -> j+1 with pi of
    shape (E, R_j), sigma of shape (E, R_{j+1}) and range sizes re.
    hyperedges: list of lists of (layer pair, edge id); parts: (|L0|, R_0)
    part ids; allowable: (|L0|,) allowable part id per L0 vertex.
    """
    layer_sizes: tuple
    label_counts: tuple
    edges: list
    hyperedges: list
    parts: np.ndarray
    allowable: np.ndarray
    label_values: list = None   # optional: per layer, label id -> label vector
    edge_ids: list = None       # optional: per layer pair, source-instance edge ids
    q: int = None               # set when labels are base-q coefficient vectors

    @property
    def num_layers(self):
        return len(self.layer_sizes)

    def layer_size(self, j):
        return self.layer_sizes[j]

    def label_width(self, j):
        return 1 if self.label_values is None else self.label_values[j].shape[1]

    def label_ids(self, j, rows):
        """Label ids of label vectors (rows of width ``label_width(j)``)."""
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, self.label_width(j))
        if self.q is None:
            return rows[:, 0].copy()
        return rows @ (self.q ** np.arange(rows.shape[1], dtype=np.int64))

    def hyperedge_vertices(self, he):
        """Sorted distinct (layer, vertex) pairs touched by a hyperedge."""
        out = set()
        for j, e in he:
            out.add((j, int(self.edges[j][0][e])))
            out.add((j + 1, int(self.edges[j][1][e])))
        return sorted(out)


def label_id(coeffs, q):
    """Little-endian base-q id of a coefficient vector."""
    out = 0
    for c in reversed(list(coeffs)):
        out = out * q + int(c)
    return out


def all_labels(q, width):
    ids = np.arange(q ** width, dtype=np.int64)
    return np.stack([(ids // q ** k) % q for k in range(width)], axis=1)


def to_explicit(inst, budget=1 << 20):
    """Materialise a PCP-derived instance (only feasible for tiny q, m)."""
    spec, q, m = inst.spec, inst.spec.q, inst.m
    size = sum(inst.layer_size(j) * inst.label_domain_size(j) for j in range(inst.num_layers))
    if size > budget:
        raise BudgetExceeded(f"{size} (vertex, label) pairs exceed the explicit budget {budget}")
    doms = [all_labels(q, inst.label_width(j)) for j in range(inst.num_layers)]
    edges = []
    h_all = np.arange(inst.num_hyperedges, dtype=np.int64)
    i_all, pair_all, _ = inst.hyperedge_parts(h_all)
    # weighted edges with c = 0 are not many-to-many; drop them with their hyperedges
    active = inst.active & (inst.cgrid[i_all, pair_all] != 0)
    for j in range(2 * m + 1):
        if j < 2 * m - 1:
            e = np.arange(inst.num_edges(j), dtype=np.int64)
        elif j == 2 * m - 1:
            e = np.flatnonzero(active)      # edge id u*q + a equals the hyperedge id
        else:
            e = np.arange(inst.num_edges(j), dtype=np.int64)
        u = np.empty(e.size, dtype=np.int64)
        v = np.empty(e.size, dtype=np.int64)
        pi = np.empty((e.size, doms[j].shape[0]), dtype=np.int64)
        sg = np.empty((e.size, doms[j + 1].shape[0]), dtype=np.int64)
        for n, eid in enumerate(e):
            d = inst.edge_descriptor(j, int(eid))
            u[n], v[n] = inst.edge_endpoints(j, int(eid))
            pi[n] = apply_pi(spec, d, doms[j])
            sg[n] = apply_sigma(spec, d, doms[j + 1])
        edges.append((u, v, pi, sg, np.full(e.size, q, dtype=np.int64), e))
    # hyperedges in terms of positions inside the edge lists
    pos = [dict((int(eid), n) for n, eid in enumerate(ed[5])) for ed in edges]
    hyper = []
    for h in np.flatnonzero(active):
        i, pair, coords = inst.hyperedge_parts(np.array([h]))
        verts, a_pt, b_pt = inst.hyperedge_vertices(np.array([h]))
        he = [(j, pos[j][int(verts[j + 1][0])]) for j in range(2 * m - 1)]
        he.append((2 * m - 1, pos[2 * m - 1][int(h)]))
        line = int(verts[2 * m][0])
        he.append((2 * m, pos[2 * m][line * q + int(inst.edge_ta[pair[0]])]))
        he.append((2 * m, pos[2 * m][line * q + int(inst.edge_tb[pair[0]])]))
        hyper.append(he)
    parts = np.tile(sum01_rows(doms[0]), (inst.layer_size(0), 1))
    allowable = inst.allowable.copy()
    return ExplicitHlcpp(tuple(inst.layer_sizes()), tuple(d.shape[0] for d in doms),
                         [ed[:5] for ed in edges], hyper, parts, allowable, doms,
                         [ed[5] for ed in edges], q)


def synthetic_hlcpp(layer_sizes, label_count, rng, num_parts=2, hyperedges=8, planted=None):
    """Random explicit instance with a planted fully satisfying labeling.

    Every hyperedge has one vertex per layer except the last, where it has
    two (mirroring the PCP shape).  Returns (instance, planted labeling as
    a list of arrays).
    """
    D = len(layer_sizes) - 1
    R = label_count
    if planted is None:
        planted = [rng.integers(0, R, size=s) for s in layer_sizes]
    edge_maps = [dict() for _ in range(D)]
    edges = [[[], [], [], [], []] for _ in range(D)]

    def edge(j, u, v):
        key = (u, v)
        if key not in edge_maps[j]:
            pi = rng.integers(0, R, size=R)
            sg = rng.integers(0, R, size=R)
            sg[planted[j + 1][v]] = pi[planted[j][u]]
            for lst, val in zip(edges[j], (u, v, pi, sg, R)):
                lst.append(val)
            edge_maps[j][key] = len(edges[j][0]) - 1
        return edge_maps[j][key]

    hyper = []
    for _ in range(hyperedges):
        vs = [int(rng.integers(0, s)) for s in layer_sizes]
        extra = int(rng.integers(0, layer_sizes[-1]))
        he = [(j, edge(j, vs[j], vs[j + 1])) for j in range(D)]
        he.append((D - 1, edge(D - 1, vs[D - 1], extra)))
        hyper.append(he)
    parts = rng.integers(0, num_parts, size=(layer_sizes[0], R))
    allowable = parts[np.arange(layer_sizes[0]), planted[0]]
    ed = [(np.asarray(e[0]), np.asarray(e[1]), np.asarray(e[2]), np.asarray(e[3]), np.asarray(e[4]))
          for e in edges]
    return ExplicitHlcpp(tuple(layer_sizes), (R,) * (D + 1), ed, hyper, parts, allowable), planted


def explicit_labeling_satisfies(inst, labels):
    """Fraction of hyperedges satisfied by a single label per vertex."""
    sat = 0
    for he in inst.hyperedges:
        ok = True
        for j, e in he:
            u, v, pi, sg, _ = (x[e] for x in inst.edges[j])
            if pi[labels[j][u]] != sg[labels[j + 1][v]]:
                ok = False
        v0 = int(inst.edges[0][0][he[0][1]])
        ok &= inst.parts[v0, labels[0][v0]] == inst.allowable[v0]
        sat += ok
    return Fraction(sat, len(inst.hyperedges)) if inst.hyperedges else Fraction(0)
