"""Homogeneous quadratic systems over GF(2^r) and the reductions into them.

Contents: the instance types, DIMACS input, the 3SAT -> QCSPP circuit
reduction, Reed-Solomon style soundness boosting, power-of-two padding and
two exact oracles (exhaustive enumeration and a propagating backtracking
search that decides whether OPT = 1).
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    InputError,
    SpecMismatch,
    TooManyEquations,
)
from .field import FieldElement, FieldSpec

DEFAULT_ENUM_BUDGET = 1 << 24


def _as_int(spec, v):
    if isinstance(v, FieldElement):
        if v.spec != spec:
            raise SpecMismatch(f"{v.spec!r} vs {spec!r}")
        return v.value
    return spec.check(v)


@dataclass(frozen=True)
class QuadraticPolynomial:
    """sum c(s,t) z_s z_t with keys normalised to s <= t."""

    spec: FieldSpec
    n: int
    terms: dict

    @classmethod
    def build(cls, spec, n, terms):
        acc = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for (s, t), c in items:
            s, t = int(s), int(t)
            if not (0 <= s < n and 0 <= t < n):
                raise DimensionMismatch(f"variable index out of range in ({s}, {t})")
            key = (s, t) if s <= t else (t, s)
            acc[key] = acc.get(key, 0) ^ _as_int(spec, c)
        return cls(spec, n, {k: v for k, v in sorted(acc.items()) if v})

    def __call__(self, assignment):
        spec = self.spec
        acc = 0
        for (s, t), c in self.terms.items():
            acc ^= spec.mul(c, spec.mul(assignment[s], assignment[t]))
        return acc

    def eval_many(self, assignments):
        """Evaluate on every row of an (N, n) int64 array."""
        spec = self.spec
        out = np.zeros(assignments.shape[0], dtype=np.int64)
        for (s, t), c in self.terms.items():
            out ^= spec.mul_arr(c, spec.mul_arr(assignments[:, s], assignments[:, t]))
        return out

    def scaled(self, c):
        spec = self.spec
        return QuadraticPolynomial.build(spec, self.n, {k: spec.mul(v, c) for k, v in self.terms.items()})

    def __add__(self, other):
        return QuadraticPolynomial.build(self.spec, self.n,
                                         list(self.terms.items()) + list(other.terms.items()))

    def variables(self):
        return sorted({v for key in self.terms for v in key})


@dataclass(frozen=True)
class QcspInstance:
    """Equations lhs[j](z) = rhs[j]; only ``rhs`` is withheld from pre-processing."""

    spec: FieldSpec
    n: int
    lhs: tuple
    rhs: tuple
    names: tuple = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.lhs) != len(self.rhs):
            raise DimensionMismatch("lhs and rhs lengths differ")
        for p in self.lhs:
            if p.n != self.n or p.spec != self.spec:
                raise DimensionMismatch("equation over a different variable set or field")
        if self.names is not None and len(self.names) != self.n:
            raise DimensionMismatch("one name per variable expected")

    @property
    def k(self):
        return len(self.lhs)

    def with_rhs(self, rhs):
        rhs = tuple(_as_int(self.spec, c) for c in rhs)
        return QcspInstance(self.spec, self.n, self.lhs, rhs, self.names)

    def satisfied(self, assignment):
        """Boolean list, one entry per equation."""
        a = [_as_int(self.spec, v) for v in assignment]
        if len(a) != self.n:
            raise DimensionMismatch(f"assignment of length {len(a)} for {self.n} variables")
        return [p(a) == c for p, c in zip(self.lhs, self.rhs)]

    def to_json(self):
        h = self.spec.to_hex
        return {
            "spec": self.spec.to_json(),
            "n": self.n,
            "names": list(self.names) if self.names else None,
            "equations": [
                {"terms": [[s, t, h(c)] for (s, t), c in p.terms.items()], "rhs": h(c)}
                for p, c in zip(self.lhs, self.rhs)
            ],
        }

    @classmethod
    def from_json(cls, obj):
        spec = FieldSpec.from_json(obj["spec"])
        n = int(obj["n"])
        lhs, rhs = [], []
        for eq in obj["equations"]:
            lhs.append(QuadraticPolynomial.build(spec, n, [((s, t), int(c, 16)) for s, t, c in eq["terms"]]))
            rhs.append(int(eq["rhs"], 16))
        names = tuple(obj["names"]) if obj.get("names") else None
        return cls(spec, n, tuple(lhs), tuple(rhs), names)

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, indent=1)


def evaluate_qcsp(Q, assignment):
    """Exact fraction of equations satisfied."""
    sat = Q.satisfied(assignment)
    return Fraction(sum(sat), Q.k)


# ---------------------------------------------------------------------------
# 3SAT input

@dataclass(frozen=True)
class SatFormula:
    """Clauses of three signed literals: +j is x_j, -j is NOT x_j (1-based)."""

    n: int
    clauses: tuple

    def __post_init__(self):
        for cl in self.clauses:
            if len(cl) != 3:
                raise InputError(f"clause {cl} does not have exactly 3 literals")
            for lit in cl:
                if lit == 0 or abs(lit) > self.n:
                    raise InputError(f"literal {lit} out of range for {self.n} variables")

    def satisfied_by(self, bits):
        return all(any((bits[abs(l) - 1] == 1) == (l > 0) for l in cl) for cl in self.clauses)

    def find_assignment(self):
        """Least satisfying assignment (bit i = x_{i+1}) by exhaustive search, or None."""
        for mask in range(1 << self.n):
            bits = [(mask >> i) & 1 for i in range(self.n)]
            if self.satisfied_by(bits):
                return bits
        return None

    def is_satisfiable(self):
        return self.find_assignment() is not None

    def matrices(self):
        """Selector bits (pos, neg): pos[i][j] = 1 iff x_{j+1} occurs in clause i
        un-negated; neg[i][j] = 1 iff it occurs negated."""
        pos = [[0] * self.n for _ in self.clauses]
        neg = [[0] * self.n for _ in self.clauses]
        for i, cl in enumerate(self.clauses):
            for lit in cl:
                (pos if lit > 0 else neg)[i][abs(lit) - 1] = 1
        return pos, neg


def parse_dimacs(text, pad_clauses=False):
    n = None
    clauses, cur = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != "cnf":
                raise InputError(f"bad problem line: {raw!r}")
            n = int(parts[2])
            continue
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError:
            raise InputError(f"non-integer token in {raw!r}") from None
        for lit in lits:
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(cur)
    if n is None:
        raise InputError("missing 'p cnf' header")
    out = []
    for cl in clauses:
        if len(cl) != 3:
            if not pad_clauses or not 1 <= len(cl) < 3:
                raise InputError(f"clause {cl} has {len(cl)} literals (use --pad-clauses for 1 or 2)")
            cl = [cl[i % len(cl)] for i in range(3)]
        out.append(tuple(cl))
    if not out:
        raise InputError("formula has no clauses")
    return SatFormula(n, tuple(out))


# ---------------------------------------------------------------------------
# 3SAT -> QCSPP

class _CircuitBuilder:
    def __init__(self, spec):
        self.spec = spec
        self.names = []
        self.eqs = []   # (terms, rhs) with terms as ((s, t), c) lists

    def var(self, name):
        self.names.append(name)
        return len(self.names) - 1

    def eq(self, terms, rhs):
        self.eqs.append((terms, rhs))


def reduce_3sat_to_qcspp(phi, spec):
    """Homogeneous quadratic system that is fully satisfiable iff ``phi`` is.

    Circuit (fixed by n and the clause count, so every left-hand side is
    formula independent): per clause i and variable j the literal value
    l_ij = OR(AND(pos_ij, x_j), AND(neg_ij, NOT x_j)); each clause ORs its
    l_ij in a left-deep tree and a left-deep AND tree of clause values
    produces y0.  Gate polynomials are AND: zz', OR: 1+(1+z)(1+z'),
    NOT: 1+z, each homogenised with z0 (pinned by z0*z0 = 1).  Inputs are
    pinned by pos_ij*z0 = [x_j in C_i], neg_ij*z0 = [NOT x_j in C_i] and
    y0*z0 = 1; those right-hand sides are the only formula-dependent data.
    Each x_j also gets x_j^2 + x_j z0 = 0, which keeps it in {0,1}.
    """
    b = _CircuitBuilder(spec)
    n, M = phi.n, len(phi.clauses)
    pos, neg = phi.matrices()
    xs = [b.var(f"x{j + 1}") for j in range(n)]
    sel = [[b.var(f"x{i + 1}_{j + 1}") for j in range(n)] for i in range(M)]
    nsel = [[b.var(f"x'{i + 1}_{j + 1}") for j in range(n)] for i in range(M)]
    z0 = b.var("z0")

    b.eq([((z0, z0), 1)], 1)
    for x in xs:
        b.eq([((x, x), 1), ((x, z0), 1)], 0)
    for i in range(M):
        for j in range(n):
            b.eq([((sel[i][j], z0), 1)], pos[i][j])
            b.eq([((nsel[i][j], z0), 1)], neg[i][j])

    def gate_and(u, v, name):
        w = b.var(name)
        b.eq([((w, z0), 1), ((u, v), 1)], 0)
        return w

    def gate_or(u, v, name):
        w = b.var(name)
        b.eq([((w, z0), 1), ((u, z0), 1), ((v, z0), 1), ((u, v), 1)], 0)
        return w

    def gate_not(u, name):
        w = b.var(name)
        b.eq([((w, z0), 1), ((u, z0), 1), ((z0, z0), 1)], 0)
        return w

    nots = [gate_not(xs[j], f"not_x{j + 1}") for j in range(n)]
    clause_out = []
    for i in range(M):
        lits = []
        for j in range(n):
            p = gate_and(sel[i][j], xs[j], f"pos{i + 1}_{j + 1}")
            q = gate_and(nsel[i][j], nots[j], f"neg{i + 1}_{j + 1}")
            lits.append(gate_or(p, q, f"lit{i + 1}_{j + 1}"))
        acc = lits[0]
        for j, lit in enumerate(lits[1:], start=2):
            acc = gate_or(acc, lit, f"clause{i + 1}_or{j}")
        clause_out.append(acc)
    acc = clause_out[0]
    for i, c in enumerate(clause_out[1:], start=2):
        acc = gate_and(acc, c, f"and{i}")
    b.names[acc] = "y0"
    b.eq([((acc, z0), 1)], 1)

    N = len(b.names)
    lhs = tuple(QuadraticPolynomial.build(spec, N, terms) for terms, _ in b.eqs)
    rhs = tuple(int(r) for _, r in b.eqs)
    return QcspInstance(spec, N, lhs, rhs, tuple(b.names))


def circuit_assignment(Q, phi, bits):
    """Wire values of the reduction circuit for boolean input ``bits``.

    Walks the equations in construction order, so it reproduces exactly the
    witness the completeness argument describes.
    """
    names = Q.names
    val = {}
    idx = {nm: i for i, nm in enumerate(names)}
    pos, neg = phi.matrices()
    val[idx["z0"]] = 1
    for j in range(phi.n):
        val[idx[f"x{j + 1}"]] = bits[j]
    for i in range(len(phi.clauses)):
        for j in range(phi.n):
            val[idx[f"x{i + 1}_{j + 1}"]] = pos[i][j]
            val[idx[f"x'{i + 1}_{j + 1}"]] = neg[i][j]
    # remaining wires are defined by gate equations of the form w*z0 + ... = 0
    for p, c in zip(Q.lhs, Q.rhs):
        unknown = [v for v in p.variables() if v not in val]
        if not unknown:
            continue
        (w,) = unknown
        rest = QuadraticPolynomial.build(Q.spec, Q.n, [(k, v) for k, v in p.terms.items() if w not in k])
        tmp = [val.get(v, 0) for v in range(Q.n)]
        val[w] = rest(tmp) ^ c
    return tuple(val[v] for v in range(Q.n))


def restrict_to_prime_field(Q):
    """Same system read over F_2 (every coefficient must be 0 or 1)."""
    from .field import gf
    f2 = gf(1)
    for p in Q.lhs:
        if any(c > 1 for c in p.terms.values()):
            raise SpecMismatch("coefficients outside F_2")
    if any(c > 1 for c in Q.rhs):
        raise SpecMismatch("right-hand side outside F_2")
    lhs = tuple(QuadraticPolynomial.build(f2, Q.n, p.terms) for p in Q.lhs)
    return QcspInstance(f2, Q.n, lhs, Q.rhs, Q.names)


def project_bit(assignment, bit):
    return tuple((int(v) >> bit) & 1 for v in assignment)


# ---------------------------------------------------------------------------
# oracles

def _digits(spec, idx, n):
    """Rows of base-q digits of ``idx`` (first variable most significant)."""
    r = spec.r
    out = np.empty((idx.shape[0], n), dtype=np.int64)
    mask = spec.q - 1
    for v in range(n):
        out[:, v] = (idx >> (r * (n - 1 - v))) & mask
    return out


def brute_force_opt(Q, budget=DEFAULT_ENUM_BUDGET, chunk=1 << 16):
    """Exact OPT over all q^n assignments; lexicographically least witness."""
    spec = Q.spec
    total = spec.q ** Q.n
    if total > budget:
        raise BudgetExceeded(f"q^n = {total} exceeds the enumeration budget {budget}")
    best, best_idx = -1, 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        A = _digits(spec, idx, Q.n)
        count = np.zeros(idx.shape[0], dtype=np.int64)
        for p, c in zip(Q.lhs, Q.rhs):
            count += p.eval_many(A) == c
        pos = int(np.argmax(count))
        if count[pos] > best:
            best, best_idx = int(count[pos]), int(idx[pos])
            if best == Q.k:
                break
    witness = tuple(int(v) for v in _digits(spec, np.array([best_idx]), Q.n)[0])
    return Fraction(best, Q.k), witness


def satisfying_assignments(Q, budget=DEFAULT_ENUM_BUDGET, chunk=1 << 16):
    """Every assignment satisfying all equations, in lexicographic order."""
    spec = Q.spec
    total = spec.q ** Q.n
    if total > budget:
        raise BudgetExceeded(f"q^n = {total} exceeds the enumeration budget {budget}")
    out = []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        A = _digits(spec, idx, Q.n)
        ok = np.ones(idx.shape[0], dtype=bool)
        for p, c in zip(Q.lhs, Q.rhs):
            ok &= p.eval_many(A) == c
        out.extend(tuple(int(v) for v in row) for row in A[ok])
    return out


def decide_satisfiable(Q, node_budget=1 << 22):
    """Exact search for an assignment satisfying every equation.

    Depth-first over variables with domain filtering: an equation whose
    variables are all fixed but one prunes that variable's domain to the
    values that satisfy it.  Returns a witness tuple or None.  Complete
    (never misses a solution), so None certifies OPT < 1.
    """
    spec = Q.spec
    q = spec.q
    eq_vars = [p.variables() for p in Q.lhs]
    occurs = [[] for _ in range(Q.n)]
    for e, vs in enumerate(eq_vars):
        for v in vs:
            occurs[v].append(e)
    elems = list(range(q))
    nodes = [0]

    def consistent(assign, e):
        return Q.lhs[e](assign) == Q.rhs[e]

    def propagate(assign, domains, queue):
        while queue:
            e = queue.pop()
            free = [v for v in eq_vars[e] if assign[v] is None]
            if not free:
                if not consistent(assign, e):
                    return False
                continue
            if len(free) > 1:
                continue
            v = free[0]
            keep = []
            for x in domains[v]:
                assign[v] = x
                if consistent(assign, e):
                    keep.append(x)
            assign[v] = None
            if not keep:
                return False
            if len(keep) == 1:
                assign[v] = keep[0]
                queue.extend(occurs[v])
            domains[v] = keep
        return True

    def search(assign, domains):
        nodes[0] += 1
        if nodes[0] > node_budget:
            raise BudgetExceeded("backtracking node budget exhausted")
        free = [v for v in range(Q.n) if assign[v] is None]
        if not free:
            return tuple(assign)
        v = min(free, key=lambda u: (len(domains[u]), u))
        for x in domains[v]:
            a2 = list(assign)
            d2 = [list(d) for d in domains]
            a2[v] = x
            d2[v] = [x]
            if propagate(a2, d2, list(occurs[v])):
                res = search(a2, d2)
                if res is not None:
                    return res
        return None

    assign = [None] * Q.n
    domains = [list(elems) for _ in range(Q.n)]
    for v in range(Q.n):
        if not occurs[v]:
            assign[v] = 0
            domains[v] = [0]
    if not propagate(assign, domains, list(range(Q.k))):
        return None
    return search(assign, domains)


# ---------------------------------------------------------------------------
# soundness boosting and padding

def boost_soundness(Q):
    """Equation t (t in F_q, integer order) is sum_i t^i p_i = sum_i t^i c_i.

    The k equations' violations form the coefficient vector of a polynomial
    of degree <= k-1, evaluated at every point of F_q, so an assignment
    that misses any original equation satisfies at most k-1 of the q
    boosted ones.
    """
    spec = Q.spec
    if Q.k > spec.q:
        raise TooManyEquations(f"k = {Q.k} equations exceed q = {spec.q}")
    lhs, rhs = [], []
    for t in range(spec.q):
        terms, c = {}, 0
        w = 1
        for p, ci in zip(Q.lhs, Q.rhs):
            for key, v in p.terms.items():
                terms[key] = terms.get(key, 0) ^ spec.mul(w, v)
            c ^= spec.mul(w, ci)
            w = spec.mul(w, t)
        lhs.append(QuadraticPolynomial.build(spec, Q.n, terms))
        rhs.append(c)
    return QcspInstance(spec, Q.n, tuple(lhs), tuple(rhs), Q.names)


def violation_vector(Q, assignment):
    a = [_as_int(Q.spec, v) for v in assignment]
    return [p(a) ^ c for p, c in zip(Q.lhs, Q.rhs)]


def pad_to_power_of_two(Q, homogenizer=None):
    """Add dummy variables pinned to 0 until n is a power of two.

    Each dummy d gets the equation d*z0 = 0 (or d*d = 0 when no homogeniser
    is known); both force d = 0.
    """
    if homogenizer is None and Q.names and "z0" in Q.names:
        homogenizer = Q.names.index("z0")
    n2 = 1
    while n2 < Q.n:
        n2 *= 2
    if n2 == Q.n:
        return Q
    spec = Q.spec
    lhs = [QuadraticPolynomial.build(spec, n2, p.terms) for p in Q.lhs]
    rhs = list(Q.rhs)
    names = list(Q.names) if Q.names else [f"z{v + 1}" for v in range(Q.n)]
    for d in range(Q.n, n2):
        other = d if homogenizer is None else homogenizer
        lhs.append(QuadraticPolynomial.build(spec, n2, [((d, other), 1)]))
        rhs.append(0)
        names.append(f"dummy{d - Q.n + 1}")
    return QcspInstance(spec, n2, tuple(lhs), tuple(rhs), tuple(names))


def planted_instance(spec, n, k, rng, terms_per_eq=3, assignment=None):
    """Random homogeneous system with right-hand sides computed from a planted solution."""
    if assignment is None:
        assignment = tuple(int(v) for v in rng.integers(0, spec.q, size=n))
    lhs = []
    for _ in range(k):
        terms = []
        for _ in range(terms_per_eq):
            s, t = (int(v) for v in rng.integers(0, n, size=2))
            terms.append(((s, t), int(rng.integers(1, spec.q))))
        lhs.append(QuadraticPolynomial.build(spec, n, terms))
    rhs = tuple(p(assignment) for p in lhs)
    return QcspInstance(spec, n, tuple(lhs), rhs), assignment
