"""Minimum weight solution encoding of a label cover instance, and NCP.

Variables are w_{v,l}, one per (vertex, label).  Fixed forms over F_2:

* parity: XOR_l w_{v,l} = 1 for every vertex;
* allow: for each L0 vertex and part P, XOR_{l in P} w_{v,l} = [P = S_v];
* edge: for each edge e = (u, v) and value a,
  XOR_{pi_e(l) = a} w_{u,l} + XOR_{sigma_e(l') = a} w_{v,l'} = 0.

Variable forms are the w_{v,l} themselves, a layer-j variable repeated
q~/q_j times (q~ the product of all layer sizes).  Weights are reported
normalised by q~, so an honest (one label per vertex) solution weighs
exactly the number of layers.

Solutions of the implicit instance are :class:`LabelSets`: per layer a
CSR structure (offsets, label rows) listing the nonzero labels.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, EmptySet, Infeasible, InfeasibleTarget, NotSatisfying
from .hlcpp import (ExplicitHlcpp, HlcppInstance, Labeling, explicit_labeling_satisfies,
                    hyperedge_satisfied, to_explicit)
from .sumcheck import sum01_rows

DEFAULT_BRUTE_BUDGET = 1 << 24


# ---------------------------------------------------------------------------
# label sets

@dataclass
class LabelSets:
    offsets: list     # per layer (n_j + 1,)
    labels: list      # per layer (total_j, width_j)

    @classmethod
    def from_labeling(cls, lab):
        offs, labs = [], []
        for L, mask in zip(lab.labels, lab.assigned):
            offs.append(np.concatenate([[0], np.cumsum(mask.astype(np.int64))]))
            labs.append(L[mask].copy())
        return cls(offs, labs)

    @classmethod
    def from_dict(cls, inst, sets):
        """``sets`` maps (layer, vertex) to an iterable of label vectors."""
        offs, labs = [], []
        for j in range(inst.num_layers):
            n, w = inst.layer_size(j), inst.label_width(j)
            rows, sizes = [], np.zeros(n, dtype=np.int64)
            for v in range(n):
                got = sorted({tuple(int(c) for c in l) for l in sets.get((j, v), ())})
                sizes[v] = len(got)
                rows.extend(got)
            offs.append(np.concatenate([[0], np.cumsum(sizes)]))
            labs.append(np.asarray(rows, dtype=np.int64).reshape(-1, w))
        return cls(offs, labs)

    def to_dict(self):
        out = {}
        for j, (o, L) in enumerate(zip(self.offsets, self.labels)):
            for v in range(o.shape[0] - 1):
                if o[v + 1] > o[v]:
                    out[(j, v)] = tuple(tuple(int(c) for c in row) for row in L[o[v]:o[v + 1]])
        return out

    def sizes(self, j):
        return np.diff(self.offsets[j])

    def owners(self, j):
        return np.repeat(np.arange(self.offsets[j].shape[0] - 1), self.sizes(j))

    def copy(self):
        return LabelSets([o.copy() for o in self.offsets], [L.copy() for L in self.labels])

    def symmetric_difference(*sols):
        """Labels present an odd number of times, per vertex (XOR of solutions)."""
        first = sols[0]
        offs, labs = [], []
        for j in range(len(first.offsets)):
            n = first.offsets[j].shape[0] - 1
            w = first.labels[j].shape[1]
            own = np.concatenate([s.owners(j) for s in sols])
            rows = np.concatenate([s.labels[j] for s in sols])
            key = np.concatenate([own[:, None], rows], axis=1)
            uniq, counts = np.unique(key, axis=0, return_counts=True)
            keep = uniq[counts % 2 == 1]
            sizes = np.bincount(keep[:, 0], minlength=n) if keep.size else np.zeros(n, dtype=np.int64)
            offs.append(np.concatenate([[0], np.cumsum(sizes)]))
            labs.append(keep[:, 1:].reshape(-1, w))
        return LabelSets(offs, labs)


def _expand(sol, j, verts):
    """Rows of every label of each vertex in ``verts``: (owner position, labels)."""
    o = sol.offsets[j]
    start, stop = o[verts], o[verts + 1]
    n = stop - start
    pos = np.repeat(np.arange(verts.shape[0]), n)
    idx = np.repeat(start - np.cumsum(np.concatenate([[0], n[:-1]])), n) + np.arange(n.sum())
    return pos, sol.labels[j][idx]


# ---------------------------------------------------------------------------
# implicit instance

class MwsppImplicit:
    """Constraint evaluator over :class:`LabelSets`.

    Backed either by a PCP-derived :class:`HlcppInstance` (maps computed on
    demand) or by a tabulated :class:`ExplicitHlcpp` (maps looked up).
    """

    def __init__(self, hl):
        self.hl = hl
        self.tabulated = isinstance(hl, ExplicitHlcpp)
        self.spec = None if self.tabulated else hl.spec

    @property
    def num_layers(self):
        return self.hl.num_layers

    def layer_size(self, j):
        return self.hl.layer_size(j)

    def label_width(self, j):
        return self.hl.label_width(j)

    def weighted_edges(self):
        """Edge ids of the layer (2m-1) -> lines pair that stay in the instance."""
        hl = self.hl
        h = np.arange(hl.num_hyperedges, dtype=np.int64)
        i, pair, _ = hl.hyperedge_parts(h)
        return h[hl.active & (hl.cgrid[i, pair] != 0)]

    def _edge_parity(self, sol, j):
        """(edge ids, pi-side parity (E, q), sigma-side parity (E, q))."""
        spec, q, m, hl = self.spec, self.spec.q, self.hl.m, self.hl
        if j < 2 * m - 1:
            eids = np.arange(hl.num_edges(j), dtype=np.int64)
            u, a, v = eids // q, eids % q, eids
        elif j == 2 * m - 1:
            eids = self.weighted_edges()
            u, a = eids // q, eids % q
            i, pair, _ = hl.hyperedge_parts(eids)
            v = hl.edge_line[pair]
        else:
            eids = np.arange(hl.num_edges(j), dtype=np.int64)
            u, a = eids // q, eids % q
            v = hl.geo.line_points[u, a]
        n = eids.shape[0]
        pos, rows = _expand(sol, j, u)
        pi = spec.horner(rows, a[pos])
        left = np.bincount(pos * q + pi, minlength=n * q).reshape(n, q) & 1
        pos, rows = _expand(sol, j + 1, v)
        if j < 2 * m - 1:
            sg = sum01_rows(rows)
        elif j == 2 * m - 1:
            ga = spec.horner(rows, hl.edge_ta[pair][pos])
            gb = spec.horner(rows, hl.edge_tb[pair][pos])
            sg = spec.mul_arr(hl.cgrid[i, pair][pos], spec.mul_arr(ga, gb))
        else:
            sg = rows[:, 0]
        right = np.bincount(pos * q + sg, minlength=n * q).reshape(n, q) & 1
        return eids, left, right

    def _violations_tabulated(self, sol):
        hl = self.hl
        out = []
        for j in range(hl.num_layers):
            for v in np.flatnonzero(sol.sizes(j) % 2 == 0):
                out.append(("parity", j, int(v)))
        ids = [hl.label_ids(j, sol.labels[j]) for j in range(hl.num_layers)]
        own0 = sol.owners(0)
        for v in range(hl.layer_sizes[0]):
            got = hl.parts[v, ids[0][own0 == v]]
            for part in np.unique(hl.parts[v]):
                if int(np.sum(got == part) & 1) != int(part == hl.allowable[v]):
                    out.append(("allow", v, int(part)))
        for j, (u, w, pi, sg, re) in enumerate(hl.edges):
            eids = hl.edge_ids[j] if hl.edge_ids is not None else np.arange(u.shape[0])
            own_u, own_w = sol.owners(j), sol.owners(j + 1)
            for n in range(u.shape[0]):
                R = int(re[n])
                left = np.bincount(pi[n, ids[j][own_u == u[n]]], minlength=R)
                right = np.bincount(sg[n, ids[j + 1][own_w == w[n]]], minlength=R)
                for a in np.flatnonzero((left ^ right) & 1):
                    out.append(("edge", j, int(eids[n]), int(a)))
        return sorted(out)

    def violations(self, sol):
        if self.tabulated:
            return self._violations_tabulated(sol)
        hl, q, m = self.hl, self.spec.q, self.hl.m
        out = []
        for j in range(self.num_layers):
            for v in np.flatnonzero(sol.sizes(j) % 2 == 0):
                out.append(("parity", j, int(v)))
        pos = sol.owners(0)
        part = sum01_rows(sol.labels[0])
        got = np.bincount(pos * q + part, minlength=hl.k * q).reshape(hl.k, q) & 1
        want = np.zeros((hl.k, q), dtype=np.int64)
        want[np.arange(hl.k), hl.allowable] = 1
        for i, a in zip(*np.nonzero(got != want)):
            out.append(("allow", int(i), int(a)))
        for j in range(2 * m + 1):
            eids, left, right = self._edge_parity(sol, j)
            for e, a in zip(*np.nonzero(left != right)):
                out.append(("edge", j, int(eids[e]), int(a)))
        return sorted(out)


def build_mwspp(instance, mode="implicit", budget=1 << 20):
    if mode == "implicit":
        if not isinstance(instance, (HlcppInstance, ExplicitHlcpp)):
            raise TypeError("implicit mode needs a label cover instance")
        return MwsppImplicit(instance)
    if mode != "explicit":
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(instance, HlcppInstance):
        instance = to_explicit(instance, budget)
    return explicit_from_hlcpp(instance, budget)


def honest_solution(lab, instance):
    """Singleton label sets; the labeling must satisfy every hyperedge.

    ``lab`` is a :class:`Labeling` for PCP-derived instances, or a list of
    per-layer label id arrays for tabulated ones.
    """
    hl = instance.hl if isinstance(instance, MwsppImplicit) else instance
    if isinstance(hl, ExplicitHlcpp):
        if explicit_labeling_satisfies(hl, lab) != 1:
            raise NotSatisfying("labeling violates a hyperedge")
        lab = Labeling([np.asarray(x, dtype=np.int64).reshape(-1, 1) for x in lab],
                       [np.ones(len(x), dtype=bool) for x in lab])
        return LabelSets.from_labeling(lab)
    if not all(m.all() for m in lab.assigned):
        raise NotSatisfying("labeling is not total")
    h = np.flatnonzero(hl.active)
    if not hyperedge_satisfied(hl, lab, h).all():
        raise NotSatisfying("labeling violates a hyperedge")
    return LabelSets.from_labeling(lab)


def check_fixed_forms(instance, solution):
    """Sorted list of violated row keys (empty when every fixed form holds)."""
    return instance.violations(solution)


def solution_weight(instance, solution):
    """Normalised weight: sum over layers of (nonzero labels in layer) / |layer|."""
    if isinstance(instance, MwsppExplicit):
        return instance.normalized_weight(solution)
    return sum((Fraction(int(solution.sizes(j).sum()), instance.layer_size(j))
                for j in range(instance.num_layers)), Fraction(0))


# ---------------------------------------------------------------------------
# explicit instance

@dataclass
class MwsppExplicit:
    num_vars: int
    fixed_rows: list           # sorted column tuples
    targets: list              # bits
    row_keys: list             # ("parity", j, v) / ("allow", v, part) / ("edge", j, e, a)
    var_rows: list             # column tuples
    multiplicities: list       # positive ints
    var_index: dict = None     # (layer, vertex, label id) -> column
    scale: int = 1             # q~: normalised weight = weight / scale
    source: ExplicitHlcpp = None

    def __post_init__(self):
        if len(self.fixed_rows) != len(self.targets):
            raise ValueError("one target bit per fixed row")
        for row in list(self.fixed_rows) + list(self.var_rows):
            if any(c < 0 or c >= self.num_vars for c in row):
                raise ValueError("row references a column outside the instance")
        if any(mu < 1 for mu in self.multiplicities):
            raise ValueError("multiplicities must be positive")

    def to_bits(self, solution):
        if not isinstance(solution, LabelSets):
            return np.asarray(solution, dtype=np.uint8)
        x = np.zeros(self.num_vars, dtype=np.uint8)
        for j in range(len(solution.offsets)):
            ids = self.source.label_ids(j, solution.labels[j])
            for v, l in zip(solution.owners(j), ids):
                x[self.var_index[(j, int(v), int(l))]] ^= 1
        return x

    def violations(self, solution):
        x = self.to_bits(solution)
        out = []
        for row, t, key in zip(self.fixed_rows, self.targets, self.row_keys):
            if int(x[list(row)].sum() & 1) != t:
                out.append(key)
        return sorted(out)

    def weight(self, solution):
        x = self.to_bits(solution)
        return sum(mu for row, mu in zip(self.var_rows, self.multiplicities) if x[list(row)].sum() & 1)

    def normalized_weight(self, solution):
        return Fraction(self.weight(solution), self.scale)

    def dumps(self):
        lines = [f"mwspp N={self.num_vars} fixed={len(self.fixed_rows)} variable={len(self.var_rows)}"]
        for row, t in zip(self.fixed_rows, self.targets):
            lines.append("f " + " ".join(str(c) for c in row) + f" = {t}")
        for row, mu in zip(self.var_rows, self.multiplicities):
            lines.append("v " + " ".join(str(c) for c in row) + f" * {mu}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text):
        it = iter(text.splitlines())
        head = next(it).split()
        vals = dict(tok.split("=") for tok in head[1:])
        fixed, targets, var, mult = [], [], [], []
        for line in it:
            if not line.strip():
                continue
            kind, rest = line[0], line[2:]
            if kind == "f":
                cols, t = rest.rsplit("=", 1)
                fixed.append(tuple(int(c) for c in cols.split()))
                targets.append(int(t))
            elif kind == "v":
                cols, mu = rest.rsplit("*", 1)
                var.append(tuple(int(c) for c in cols.split()))
                mult.append(int(mu))
            else:
                raise ValueError(f"unknown row kind {kind!r}")
        if len(fixed) != int(vals["fixed"]) or len(var) != int(vals["variable"]):
            raise ValueError("row counts disagree with the header")
        keys = [("row", n) for n in range(len(fixed))]
        return cls(int(vals["N"]), fixed, targets, keys, var, mult)


def explicit_from_hlcpp(inst, budget=1 << 20):
    """Materialise every row of the encoding of an :class:`ExplicitHlcpp`."""
    if not isinstance(inst, ExplicitHlcpp):
        raise TypeError("expected an ExplicitHlcpp")
    blocks = [s * r for s, r in zip(inst.layer_sizes, inst.label_counts)]
    N = sum(blocks)
    if N > budget:
        raise BudgetExceeded(f"{N} columns exceed the explicit budget {budget}")
    base = np.concatenate([[0], np.cumsum(blocks)])

    def col(j, v, l):
        return int(base[j] + v * inst.label_counts[j] + l)

    rows, targets, keys = [], [], []
    for j, (s, R) in enumerate(zip(inst.layer_sizes, inst.label_counts)):
        for v in range(s):
            rows.append(tuple(col(j, v, l) for l in range(R)))
            targets.append(1)
            keys.append(("parity", j, v))
    R0 = inst.label_counts[0]
    for v in range(inst.layer_sizes[0]):
        for part in np.unique(inst.parts[v]):
            rows.append(tuple(col(0, v, int(l)) for l in np.flatnonzero(inst.parts[v] == part)))
            targets.append(int(part == inst.allowable[v]))
            keys.append(("allow", v, int(part)))
    for j, (u, w, pi, sg, re) in enumerate(inst.edges):
        eids = inst.edge_ids[j] if inst.edge_ids is not None else np.arange(u.shape[0])
        for n in range(u.shape[0]):
            for a in range(int(re[n])):
                left = [col(j, int(u[n]), int(l)) for l in np.flatnonzero(pi[n] == a)]
                right = [col(j + 1, int(w[n]), int(l)) for l in np.flatnonzero(sg[n] == a)]
                rows.append(tuple(sorted(left + right)))
                targets.append(0)
                keys.append(("edge", j, int(eids[n]), a))
    scale = math.prod(inst.layer_sizes)
    var_rows, mults, index = [], [], {}
    for j, (s, R) in enumerate(zip(inst.layer_sizes, inst.label_counts)):
        for v in range(s):
            for l in range(R):
                c = col(j, v, l)
                var_rows.append((c,))
                mults.append(scale // s)
                index[(j, v, l)] = c
    return MwsppExplicit(int(N), rows, targets, keys, var_rows, mults, index, scale, inst)


# ---------------------------------------------------------------------------
# brute force and the NCP view

def _row_masks(rows):
    masks = []
    for row in rows:
        mk = 0
        for c in row:
            mk ^= 1 << c
        masks.append(mk)
    return masks


def brute_force_min_weight(inst, budget=DEFAULT_BRUTE_BUDGET, chunk=1 << 16):
    """Exact minimum of sum(multiplicity * [B_v x = 1]) subject to B_f x = t.

    Ties go to the numerically least x (bit c = column c).  Raises
    :class:`Infeasible` when the fixed system has no solution.
    """
    N = inst.num_vars
    if N > 62 or (1 << N) > budget:
        raise BudgetExceeded(f"2^{N} assignments exceed the budget {budget}")
    fmask = np.array(_row_masks(inst.fixed_rows), dtype=np.uint64)
    vmask = np.array(_row_masks(inst.var_rows), dtype=np.uint64)
    mult = list(inst.multiplicities)
    small = sum(mult) < (1 << 62)
    tgt = np.array(inst.targets, dtype=np.uint64)
    best, best_x = None, None
    for start in range(0, 1 << N, chunk):
        xs = np.arange(start, min(1 << N, start + chunk), dtype=np.uint64)
        ok = np.ones(xs.shape[0], dtype=bool)
        for mk, t in zip(fmask, tgt):
            ok &= (np.bitwise_count(xs & mk) & np.uint64(1)) == t
        xs = xs[ok]
        if not xs.size:
            continue
        if small:
            w = np.zeros(xs.shape[0], dtype=np.int64)
            for mk, mu in zip(vmask, mult):
                w += (np.bitwise_count(xs & mk) & np.uint64(1)).astype(np.int64) * mu
            pos = int(np.argmin(w))
            cand = int(w[pos])
        else:
            w = np.zeros(xs.shape[0], dtype=object)
            for mk, mu in zip(vmask, mult):
                w = w + (np.bitwise_count(xs & mk) & np.uint64(1)).astype(object) * mu
            cand = min(w)
            pos = list(w).index(cand)
        if best is None or cand < best:
            best, best_x = cand, int(xs[pos])
    if best is None:
        raise Infeasible("B_f x = t has no solution")
    return best, tuple((best_x >> c) & 1 for c in range(N))


def _eliminate(rows, targets, N):
    """Row echelon form over F_2 on bitmask rows; returns (pivots, reduced rows, rhs) or None."""
    piv_rows, piv_cols, rhs = [], [], []
    for mk, t in zip(rows, targets):
        for pr, pc, pt in zip(piv_rows, piv_cols, rhs):
            if (mk >> pc) & 1:
                mk ^= pr
                t ^= pt
        if mk == 0:
            if t:
                return None
            continue
        pc = mk.bit_length() - 1
        # keep the basis fully reduced
        for n in range(len(piv_rows)):
            if (piv_rows[n] >> pc) & 1:
                piv_rows[n] ^= mk
                rhs[n] ^= t
        piv_rows.append(mk)
        piv_cols.append(pc)
        rhs.append(t)
    return piv_rows, piv_cols, rhs


def solve_fixed(inst):
    """(x0, kernel basis) for B_f x = t, as bitmask ints."""
    N = inst.num_vars
    res = _eliminate(_row_masks(inst.fixed_rows), list(inst.targets), N)
    if res is None:
        raise InfeasibleTarget("B_f x = t is inconsistent")
    piv_rows, piv_cols, rhs = res
    x0 = 0
    for pc, t in zip(piv_cols, rhs):
        if t:
            x0 |= 1 << pc
    pivset = set(piv_cols)
    basis = []
    for f in range(N):
        if f in pivset:
            continue
        vec = 1 << f
        for pr, pc in zip(piv_rows, piv_cols):
            if (pr >> f) & 1:
                vec |= 1 << pc
        basis.append(vec)
    return x0, basis


@dataclass
class NcpInstance:
    generator: np.ndarray   # (k, n) rows span the code
    target: np.ndarray      # (n,)

    def __post_init__(self):
        if self.generator.ndim != 2 or self.generator.shape[1] != self.target.shape[0]:
            raise ValueError("generator and target dimensions disagree")

    def dumps(self):
        lines = [f"ncp n={self.target.shape[0]} k={self.generator.shape[0]}"]
        lines += ["g " + "".join(str(int(b)) for b in row) for row in self.generator]
        lines.append("t " + "".join(str(int(b)) for b in self.target))
        return "\n".join(lines) + "\n"


def mwspp_to_ncp(inst, budget=1 << 16):
    """Code {B_v x : B_f x = 0} (multiplicity expanded) and target B_v x0."""
    x0, basis = solve_fixed(inst)
    n = sum(inst.multiplicities)
    if n > budget:
        raise BudgetExceeded(f"expanded code length {n} exceeds {budget}")
    vmask = _row_masks(inst.var_rows)

    def encode(x):
        out = []
        for mk, mu in zip(vmask, inst.multiplicities):
            out.extend([bin(x & mk).count("1") & 1] * mu)
        return out

    gen = np.array([encode(b) for b in basis], dtype=np.uint8).reshape(len(basis), n)
    return NcpInstance(gen, np.array(encode(x0), dtype=np.uint8))


def brute_force_ncp(ncp, budget=DEFAULT_BRUTE_BUDGET):
    """Minimum Hamming distance from the target to the code, over all 2^k codewords."""
    k, n = ncp.generator.shape
    if (1 << k) > budget:
        raise BudgetExceeded(f"2^{k} codewords exceed the budget {budget}")
    best = int(ncp.target.sum())
    word = ncp.target.astype(np.uint8).copy()
    # Gray code walk: one generator row flips per step
    for s in range(1, 1 << k):
        bit = (s & -s).bit_length() - 1
        word ^= ncp.generator[bit]
        best = min(best, int(word.sum()))
    return best


def random_explicit(rng, N, fixed, variable, density=0.35, max_mult=4, feasible=True):
    """Random tiny instance; with ``feasible`` the target comes from a random x."""
    def rand_row():
        cols = np.flatnonzero(rng.random(N) < density)
        if not cols.size:
            cols = np.array([int(rng.integers(0, N))])
        return tuple(int(c) for c in cols)
    frows = [rand_row() for _ in range(fixed)]
    if feasible:
        x = rng.integers(0, 2, size=N)
        t = [int(x[list(r)].sum() & 1) for r in frows]
    else:
        t = [int(b) for b in rng.integers(0, 2, size=fixed)]
    vrows = [rand_row() for _ in range(variable)]
    mult = [int(v) for v in rng.integers(1, max_mult + 1, size=variable)]
    return MwsppExplicit(N, frows, t, [("row", n) for n in range(fixed)], vrows, mult)


# ---------------------------------------------------------------------------
# decoder and the counting steps of the soundness argument

def randomized_decode(solution, seed):
    """One uniformly random nonzero label per vertex, independently."""
    rng = np.random.default_rng(seed)
    labels, assigned = [], []
    for j in range(len(solution.offsets)):
        sizes = solution.sizes(j)
        if np.any(sizes == 0):
            raise EmptySet(f"layer {j} vertex {int(np.flatnonzero(sizes == 0)[0])} has no nonzero label")
        pick = solution.offsets[j][:-1] + (rng.random(sizes.shape[0]) * sizes).astype(np.int64)
        labels.append(solution.labels[j][pick].copy())
        assigned.append(np.ones(sizes.shape[0], dtype=bool))
    return Labeling(labels, assigned)


@dataclass
class MarkovReport:
    removed: dict          # layer -> list of removed vertices
    fractions: dict        # layer -> Fraction removed
    layer_bounds: dict     # layer -> (sum_v n_v / |L_j|) / rho
    weight_bound: Fraction # normalised weight / rho
    ok: bool

    def to_json(self):
        return {"fractions": {str(k): str(v) for k, v in self.fractions.items()},
                "layer_bounds": {str(k): str(v) for k, v in self.layer_bounds.items()},
                "weight_bound": str(self.weight_bound), "ok": self.ok}


def markov_prune(solution, rho):
    """Drop vertices holding more than ``rho`` labels; check the Markov bound."""
    out = solution.copy()
    removed, fractions, bounds = {}, {}, {}
    total = Fraction(0)
    for j in range(len(solution.offsets)):
        sizes = solution.sizes(j)
        n = sizes.shape[0]
        total += Fraction(int(sizes.sum()), n)
        heavy = np.flatnonzero(sizes > rho)
        removed[j] = [int(v) for v in heavy]
        fractions[j] = Fraction(heavy.size, n)
        bounds[j] = Fraction(int(sizes.sum()), n * rho)
        keep = np.repeat(sizes <= rho, sizes)
        new_sizes = np.where(sizes > rho, 0, sizes)
        out.offsets[j] = np.concatenate([[0], np.cumsum(new_sizes)])
        out.labels[j] = solution.labels[j][keep]
    wb = total / rho
    ok = all(fractions[j] <= bounds[j] <= wb for j in fractions)
    return out, MarkovReport(removed, fractions, bounds, wb, ok)


@dataclass
class CollisionReport:
    removed_edges: dict     # layer pair -> boolean mask over that pair's edge ids
    fractions: dict         # layer pair -> Fraction of edges removed
    bound: Fraction         # 4 m rho^2 / q
    pair_bounds: dict       # layer pair -> C(rho, 2) * delta_j
    ok: bool

    def to_json(self):
        return {"fractions": {str(k): str(v) for k, v in self.fractions.items()},
                "pair_bounds": {str(k): str(v) for k, v in self.pair_bounds.items()},
                "bound": str(self.bound), "ok": self.ok}


def collision_filter(imp, solution, rho):
    """Edges whose pi map sends two nonzero labels of the source to the same value."""
    hl, spec, q, m = imp.hl, imp.spec, imp.spec.q, imp.hl.m
    removed, fractions, pair_bounds = {}, {}, {}
    for j in range(2 * m + 1):
        E = hl.num_edges(j)
        eids = np.arange(E, dtype=np.int64)
        u, a = eids // q, eids % q
        pos, rows = _expand(solution, j, u)
        pi = spec.horner(rows, a[pos])
        key = pos * q + pi
        cnt = np.bincount(key, minlength=E * q).reshape(E, q)
        removed[j] = cnt.max(axis=1) > 1
        fractions[j] = Fraction(int(removed[j].sum()), E)
        delta = Fraction(min(4 * m if j < 2 * m else m, q), q)
        pair_bounds[j] = Fraction(rho * (rho - 1), 2) * delta
    bound = Fraction(4 * m * rho * rho, q)
    ok = all(fractions[j] <= pair_bounds[j] <= bound for j in fractions)
    return CollisionReport(removed, fractions, bound, pair_bounds, ok)


def surviving_hyperedges(imp, solution, collisions, rho):
    """Active hyperedges with every vertex holding 1..rho labels and no removed edge."""
    hl, q, m = imp.hl, imp.spec.q, imp.hl.m
    h = np.flatnonzero(hl.active)
    verts, a_pt, b_pt = hl.hyperedge_vertices(h)
    ok = np.ones(h.shape[0], dtype=bool)
    for j, v in enumerate(verts):
        s = solution.sizes(j)[v]
        ok &= (s >= 1) & (s <= rho)
    for p in (a_pt, b_pt):
        s = solution.sizes(2 * m + 1)[p]
        ok &= (s >= 1) & (s <= rho)
    for j in range(2 * m - 1):
        ok &= ~collisions.removed_edges[j][verts[j + 1]]
    ok &= ~collisions.removed_edges[2 * m - 1][h % (hl.layer_size(2 * m - 1) * q)]
    _, pair, _ = hl.hyperedge_parts(h)
    line = verts[2 * m]
    ok &= ~collisions.removed_edges[2 * m][line * q + hl.edge_ta[pair]]
    ok &= ~collisions.removed_edges[2 * m][line * q + hl.edge_tb[pair]]
    return h[ok]


def hyperedge_success_probability(imp, solution, h):
    """Exact probability that independent uniform picks satisfy hyperedge ``h``.

    Enumerates the product of the label sets of its distinct vertices (the
    two point vertices coincide only when alpha = beta).
    """
    hl, spec, m = imp.hl, imp.spec, imp.hl.m
    h = int(h)
    i, pair, coords = hl.hyperedge_parts(np.array([h]))
    i, pair, coords = int(i[0]), int(pair[0]), coords[0]
    verts, a_pt, b_pt = hl.hyperedge_vertices(np.array([h]))
    slots = [(j, int(v[0])) for j, v in enumerate(verts)]
    slots += [(2 * m + 1, int(a_pt[0])), (2 * m + 1, int(b_pt[0]))]
    distinct = sorted(set(slots))
    sets = {}
    for j, v in distinct:
        o = solution.offsets[j]
        sets[(j, v)] = solution.labels[j][o[v]:o[v + 1]]
    sizes = [sets[s].shape[0] for s in distinct]
    total = math.prod(sizes)
    if total == 0:
        return Fraction(0)
    grids = np.meshgrid(*[np.arange(n) for n in sizes], indexing="ij")
    pick = {s: sets[s][g.reshape(-1)] for s, g in zip(distinct, grids)}
    rows = [pick[s] for s in slots]
    full = lambda x: np.full(total, x, dtype=np.int64)
    ok = sum01_rows(rows[0]) == int(hl.allowable[i])
    for j in range(2 * m - 1):
        ok &= spec.horner(rows[j], full(coords[j])) == sum01_rows(rows[j + 1])
    ga = spec.horner(rows[2 * m], full(hl.edge_ta[pair]))
    gb = spec.horner(rows[2 * m], full(hl.edge_tb[pair]))
    prod = spec.mul_arr(full(hl.cgrid[i, pair]), spec.mul_arr(ga, gb))
    ok &= spec.horner(rows[2 * m - 1], full(coords[2 * m - 1])) == prod
    ok &= (ga == rows[2 * m + 1][:, 0]) & (gb == rows[2 * m + 2][:, 0])
    return Fraction(int(ok.sum()), total)


def empirical_success_frequency(imp, solution, hyperedges, seeds):
    """Per hyperedge, the fraction of decoder seeds whose labeling satisfies it."""
    hyperedges = np.asarray(hyperedges, dtype=np.int64)
    hits = np.zeros(hyperedges.shape[0], dtype=np.int64)
    for seed in seeds:
        hits += hyperedge_satisfied(imp.hl, randomized_decode(solution, seed), hyperedges)
    return [Fraction(int(c), len(seeds)) for c in hits]
