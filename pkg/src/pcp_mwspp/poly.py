"""Univariate/multivariate polynomials over GF(2^r), affine lines, cube functions.

Field values are plain ints (see :mod:`pcp_mwspp.field`).  The public
helpers named after the operations they perform (``eval_univariate``,
``interpolate_univariate``, ...) also accept :class:`FieldElement`
arguments and then return field elements.

Bit order convention for ``{0,1}^m``: the integer index of a cube point
has alpha_1 as its most significant bit.  Points of F_q^m are indexed the
same way in base q.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .errors import (
    DegeneratePoints,
    DimensionMismatch,
    DuplicateNode,
    PrefixTooLong,
    SpecMismatch,
)
from .field import FieldElement


def _val(spec, x):
    if isinstance(x, FieldElement):
        if x.spec != spec:
            raise SpecMismatch(f"{x.spec!r} vs {spec!r}")
        return x.value
    return spec.check(x)


# ---------------------------------------------------------------------------
# univariate

@dataclass(frozen=True)
class UnivariatePoly:
    """Coefficients low degree first; ``degree_bound`` fixes their count."""

    spec: object
    coeffs: tuple
    degree_bound: int

    def __post_init__(self):
        if len(self.coeffs) != self.degree_bound + 1:
            raise DimensionMismatch(
                f"{len(self.coeffs)} coefficients for degree bound {self.degree_bound}")

    @classmethod
    def from_coeffs(cls, spec, coeffs, degree_bound=None):
        coeffs = [int(c) for c in coeffs]
        if degree_bound is None:
            degree_bound = max(len(coeffs) - 1, 0)
        if len(coeffs) > degree_bound + 1:
            if any(coeffs[degree_bound + 1:]):
                raise DimensionMismatch("polynomial exceeds its degree bound")
            coeffs = coeffs[:degree_bound + 1]
        coeffs = coeffs + [0] * (degree_bound + 1 - len(coeffs))
        return cls(spec, tuple(spec.check(c) for c in coeffs), degree_bound)

    @classmethod
    def zero(cls, spec, degree_bound=0):
        return cls(spec, (0,) * (degree_bound + 1), degree_bound)

    @property
    def degree(self):
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i]:
                return i
        return -1

    def __call__(self, x):
        spec = self.spec
        acc = 0
        for c in reversed(self.coeffs):
            acc = spec.mul(acc, x) ^ c
        return acc

    def eval_many(self, xs):
        xs = np.asarray(xs, dtype=np.int64)
        coeffs = np.broadcast_to(np.asarray(self.coeffs, dtype=np.int64), (xs.size, len(self.coeffs)))
        return self.spec.horner(coeffs, xs.reshape(-1)).reshape(xs.shape)

    def sum01(self):
        """p(0) + p(1): the constant term plus the XOR of all coefficients."""
        acc = 0
        for c in self.coeffs:
            acc ^= c
        return acc ^ self.coeffs[0]

    def __add__(self, other):
        if other.spec != self.spec:
            raise SpecMismatch("polynomials over different fields")
        d = max(self.degree_bound, other.degree_bound)
        a = self.coeffs + (0,) * (d - self.degree_bound)
        b = other.coeffs + (0,) * (d - other.degree_bound)
        return UnivariatePoly(self.spec, tuple(x ^ y for x, y in zip(a, b)), d)

    def with_bound(self, degree_bound):
        return UnivariatePoly.from_coeffs(self.spec, self.coeffs, degree_bound)

    def elements(self):
        return tuple(FieldElement(self.spec, c) for c in self.coeffs)

    def to_json(self):
        return {"degree_bound": self.degree_bound,
                "coeffs": [self.spec.to_hex(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, spec, obj):
        return cls.from_coeffs(spec, [int(c, 16) for c in obj["coeffs"]], int(obj["degree_bound"]))


def eval_univariate(p, x):
    v = p(_val(p.spec, x))
    return FieldElement(p.spec, v) if isinstance(x, FieldElement) else v


def _poly_mul_linear(spec, coeffs, root):
    """Multiply ``coeffs`` by (X + root)."""
    out = [0] * (len(coeffs) + 1)
    for i, c in enumerate(coeffs):
        out[i + 1] ^= c
        out[i] ^= spec.mul(c, root)
    return out


def lagrange_basis(spec, nodes):
    """Coefficient vectors of the Lagrange basis polynomials for ``nodes``.

    Row i is the coefficient vector (low degree first) of the polynomial
    that is 1 at ``nodes[i]`` and 0 at every other node.
    """
    nodes = [int(x) for x in nodes]
    if len(set(nodes)) != len(nodes):
        raise DuplicateNode("interpolation nodes must be distinct")
    rows = []
    for i, xi in enumerate(nodes):
        num, den = [1], 1
        for j, xj in enumerate(nodes):
            if j != i:
                num = _poly_mul_linear(spec, num, xj)
                den = spec.mul(den, xi ^ xj)
        inv = spec.inv(den)
        rows.append([spec.mul(c, inv) for c in num])
    return rows


@lru_cache(maxsize=256)
def interpolation_matrix(spec, nodes):
    """Matrix M with ``coeffs = M @ values`` for values sampled at ``nodes``."""
    basis = lagrange_basis(spec, nodes)
    n = len(nodes)
    mat = np.zeros((n, n), dtype=np.int64)
    for i, row in enumerate(basis):
        mat[:, i] = row
    mat.setflags(write=False)
    return mat


def default_nodes(spec, degree_bound):
    """First ``min(q, degree_bound + 1)`` field elements in integer order.

    When q <= degree_bound the interpolant has degree <= q - 1 and agrees
    with the sampled function on all of F_q, which is all any table check
    ever observes.
    """
    return tuple(range(min(spec.q, degree_bound + 1)))


def interpolate_values(spec, values, degree_bound):
    """Batch interpolation: ``values[..., k]`` sampled at ``default_nodes``."""
    nodes = default_nodes(spec, degree_bound)
    values = np.asarray(values, dtype=np.int64)
    lead = values.shape[:-1]
    flat = values.reshape(-1, len(nodes))
    coeffs = spec.lintrans(interpolation_matrix(spec, nodes), flat)
    pad = degree_bound + 1 - len(nodes)
    if pad:
        coeffs = np.concatenate([coeffs, np.zeros((coeffs.shape[0], pad), dtype=np.int64)], axis=1)
    return coeffs.reshape(lead + (degree_bound + 1,))


def interpolate_univariate(points, spec=None, degree_bound=None):
    """Unique polynomial of degree <= len(points) - 1 through ``points``."""
    points = list(points)
    if not points:
        raise ValueError("need at least one point")
    if spec is None:
        spec = points[0][0].spec
    xs = [_val(spec, x) for x, _ in points]
    ys = [_val(spec, y) for _, y in points]
    basis = lagrange_basis(spec, xs)
    coeffs = [0] * len(xs)
    for y, row in zip(ys, basis):
        if y:
            for k, c in enumerate(row):
                coeffs[k] ^= spec.mul(y, c)
    bound = len(xs) - 1 if degree_bound is None else degree_bound
    return UnivariatePoly.from_coeffs(spec, coeffs, bound)


# ---------------------------------------------------------------------------
# multivariate

@dataclass(frozen=True)
class MultivariatePoly:
    """Sparse polynomial: exponent tuple -> nonzero coefficient."""

    spec: object
    num_vars: int
    monomials: dict
    total_degree_bound: int

    def __post_init__(self):
        for exps, c in self.monomials.items():
            if len(exps) != self.num_vars:
                raise DimensionMismatch(f"exponent vector {exps} for {self.num_vars} variables")
            if not c:
                raise ValueError("zero coefficients must not be stored")
            if sum(exps) > self.total_degree_bound:
                raise DimensionMismatch(f"monomial {exps} exceeds degree bound {self.total_degree_bound}")

    @classmethod
    def build(cls, spec, num_vars, terms, total_degree_bound=None):
        """Merge (exponents, coeff) pairs, dropping cancellations."""
        acc = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            acc[exps] = acc.get(exps, 0) ^ spec.check(int(c))
        acc = {e: c for e, c in acc.items() if c}
        if total_degree_bound is None:
            total_degree_bound = max((sum(e) for e in acc), default=0)
        return cls(spec, num_vars, acc, total_degree_bound)

    @property
    def total_degree(self):
        return max((sum(e) for e in self.monomials), default=-1)

    def __call__(self, point):
        if len(point) != self.num_vars:
            raise DimensionMismatch(f"point of length {len(point)} for {self.num_vars} variables")
        spec = self.spec
        acc = 0
        for exps, c in self.monomials.items():
            term = c
            for x, e in zip(point, exps):
                if e:
                    term = spec.mul(term, spec.pow(x, e))
                    if not term:
                        break
            acc ^= term
        return acc

    def eval_points(self, points):
        """Evaluate at every row of ``points`` (shape (P, num_vars))."""
        pts = np.asarray(points, dtype=np.int64)
        if pts.ndim != 2 or pts.shape[1] != self.num_vars:
            raise DimensionMismatch(f"points of shape {pts.shape} for {self.num_vars} variables")
        spec = self.spec
        out = np.zeros(pts.shape[0], dtype=np.int64)
        cache = {}
        for exps, c in self.monomials.items():
            term = np.full(pts.shape[0], c, dtype=np.int64)
            for k, e in enumerate(exps):
                if e:
                    key = (k, e)
                    if key not in cache:
                        cache[key] = spec.pow_arr(pts[:, k], e)
                    term = spec.mul_arr(term, cache[key])
            out ^= term
        return out

    def __add__(self, other):
        self._compat(other)
        terms = list(self.monomials.items()) + list(other.monomials.items())
        return MultivariatePoly.build(self.spec, self.num_vars, terms,
                                      max(self.total_degree_bound, other.total_degree_bound))

    def __mul__(self, other):
        self._compat(other)
        spec = self.spec
        acc = {}
        for e1, c1 in self.monomials.items():
            for e2, c2 in other.monomials.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) ^ spec.mul(c1, c2)
        return MultivariatePoly.build(spec, self.num_vars, acc,
                                      self.total_degree_bound + other.total_degree_bound)

    def _compat(self, other):
        if other.spec != self.spec:
            raise SpecMismatch("polynomials over different fields")
        if other.num_vars != self.num_vars:
            raise DimensionMismatch("polynomials in different numbers of variables")

    def embed(self, num_vars, offset):
        """Same polynomial in variables offset..offset+self.num_vars-1 of a larger ring."""
        terms = {}
        for exps, c in self.monomials.items():
            full = [0] * num_vars
            full[offset:offset + self.num_vars] = exps
            terms[tuple(full)] = c
        return MultivariatePoly(self.spec, num_vars, terms, self.total_degree_bound)

    def to_json(self):
        return {"num_vars": self.num_vars, "total_degree_bound": self.total_degree_bound,
                "monomials": [[list(e), self.spec.to_hex(c)] for e, c in sorted(self.monomials.items())]}

    @classmethod
    def from_json(cls, spec, obj):
        return cls.build(spec, int(obj["num_vars"]),
                         [(tuple(e), int(c, 16)) for e, c in obj["monomials"]],
                         int(obj["total_degree_bound"]))


def eval_multivariate(f, x):
    vals = [_val(f.spec, v) for v in x]
    out = f(vals)
    return FieldElement(f.spec, out) if x and isinstance(x[0], FieldElement) else out


# ---------------------------------------------------------------------------
# cube functions and multilinear extensions

@dataclass(frozen=True)
class CubeFunction:
    spec: object
    m: int
    values: tuple

    def __post_init__(self):
        if len(self.values) != 1 << self.m:
            raise DimensionMismatch(f"{len(self.values)} values for a {self.m}-cube")

    def __getitem__(self, alpha):
        idx = 0
        for bit in alpha:
            idx = (idx << 1) | int(bit)
        return self.values[idx]


def cube_points(m):
    """All of {0,1}^m in index order (alpha_1 most significant)."""
    return list(product((0, 1), repeat=m))


def zeta_transform(spec, values, m):
    """Coefficient of x^S in the multilinear extension is sum_{alpha <= S} A(alpha).

    ``values`` has shape (..., 2^m); characteristic 2 makes every sign +.
    """
    out = np.array(values, dtype=np.int64, copy=True)
    for bit in range(m):
        step = 1 << bit
        idx = np.arange(1 << m)
        hi = idx[(idx & step) != 0]
        out[..., hi] ^= out[..., hi ^ step]
    return out


def multilinear_extension(A):
    """Individual-degree-1 polynomial agreeing with ``A`` on the cube."""
    coeffs = zeta_transform(A.spec, np.asarray(A.values, dtype=np.int64), A.m)
    terms = {}
    for idx, c in enumerate(coeffs):
        if c:
            exps = tuple((idx >> (A.m - 1 - k)) & 1 for k in range(A.m))
            terms[exps] = int(c)
    return MultivariatePoly(A.spec, A.m, terms, A.m)


def multilinear_grid(spec, values, m):
    """Evaluate the multilinear extension of cube tables on all of F_q^m.

    ``values`` has shape (..., 2^m); the result has shape (..., q^m) with
    points indexed base q, first coordinate most significant.  Each axis
    is expanded with f(..x..) = (1+x) f(..0..) + x f(..1..).
    """
    values = np.asarray(values, dtype=np.int64)
    lead = values.shape[:-1]
    q = spec.q
    xs = spec.elements()
    t = values.reshape(lead + (2,) * m)
    for axis in range(len(lead), len(lead) + m):
        t0 = np.take(t, 0, axis=axis)
        t1 = np.take(t, 1, axis=axis)
        t0 = np.expand_dims(t0, axis)
        t1 = np.expand_dims(t1, axis)
        shape = [1] * t0.ndim
        shape[axis] = q
        x = xs.reshape(shape)
        t = spec.mul_arr(t0, x ^ 1) ^ spec.mul_arr(t1, x)
    return t.reshape(lead + (q ** m,))


# ---------------------------------------------------------------------------
# affine lines

@dataclass(frozen=True)
class Line:
    """Canonical affine line {a*t + b}: first nonzero a_i is 1 and b_i = 0 there."""

    spec: object
    m: int
    a: tuple
    b: tuple

    def __post_init__(self):
        if len(self.a) != self.m or len(self.b) != self.m:
            raise DimensionMismatch("line coordinates do not match the dimension")
        if not any(self.a):
            raise DegeneratePoints("line direction must be nonzero")

    @property
    def pivot(self):
        return next(i for i, v in enumerate(self.a) if v)

    def point(self, t):
        spec = self.spec
        return tuple(spec.mul(ai, t) ^ bi for ai, bi in zip(self.a, self.b))

    def points(self):
        """Array (q, m): row t is the point at parameter t."""
        t = self.spec.elements()
        a = np.asarray(self.a, dtype=np.int64)
        b = np.asarray(self.b, dtype=np.int64)
        return self.spec.mul_arr(t[:, None], a[None, :]) ^ b[None, :]

    def param_of(self, x):
        """Parameter t with point(t) = x, or None if x is off the line."""
        t = x[self.pivot]
        return t if self.point(t) == tuple(x) else None

    @property
    def key(self):
        return (self.a, self.b)

    def key_hex(self):
        h = self.spec.to_hex
        return "-".join("".join(h(v) for v in part) for part in (self.a, self.b))


def canonical_line(spec, a, b):
    a = [_val(spec, v) for v in a]
    b = [_val(spec, v) for v in b]
    if len(a) != len(b):
        raise DimensionMismatch("direction and base differ in length")
    if not any(a):
        raise DegeneratePoints("line direction must be nonzero")
    p = next(i for i, v in enumerate(a) if v)
    s = spec.inv(a[p])
    a = [spec.mul(v, s) for v in a]
    shift = b[p]
    b = [bi ^ spec.mul(shift, ai) for ai, bi in zip(a, b)]
    return Line(spec, len(a), tuple(a), tuple(b))


def line_through(alpha, beta, spec=None):
    """Canonical line through two distinct points plus their parameters."""
    if spec is None:
        spec = alpha[0].spec
    al = [_val(spec, v) for v in alpha]
    be = [_val(spec, v) for v in beta]
    if len(al) != len(be):
        raise DimensionMismatch("points of different dimension")
    if al == be:
        raise DegeneratePoints("alpha and beta coincide")
    line = canonical_line(spec, [x ^ y for x, y in zip(al, be)], al)
    p = line.pivot
    t_a, t_b = al[p], be[p]
    if isinstance(alpha[0], FieldElement):
        return line, FieldElement(spec, t_a), FieldElement(spec, t_b)
    return line, t_a, t_b


def restrict_to_line(f, L):
    """Univariate t -> f(a t + b), by sampling and interpolation."""
    if f.num_vars != L.m:
        raise DimensionMismatch(f"{f.num_vars}-variate polynomial on a line in F_q^{L.m}")
    if f.spec != L.spec:
        raise SpecMismatch("polynomial and line over different fields")
    d = f.total_degree_bound
    nodes = default_nodes(f.spec, d)
    pts = L.points()[list(nodes)]
    vals = f.eval_points(pts)
    coeffs = interpolate_values(f.spec, vals[None, :], d)[0]
    return UnivariatePoly(f.spec, tuple(int(c) for c in coeffs), d)


# ---------------------------------------------------------------------------
# partial sums

def partial_sum(g, prefix):
    """z -> sum over b in {0,1}^{M-j-1} of g(prefix, z, b), computed symbolically.

    Summing b^e over b in {0,1} gives 0 for e = 0 and 1 for e > 0 in
    characteristic 2, so a monomial survives only if it touches every
    suffix variable.
    """
    spec = g.spec
    M = g.num_vars
    prefix = [_val(spec, a) for a in prefix]
    j = len(prefix)
    if j > M - 1:
        raise PrefixTooLong(f"prefix of length {j} for {M} variables")
    d = g.total_degree_bound
    coeffs = [0] * (d + 1)
    for exps, c in g.monomials.items():
        if not all(exps[j + 1:]):
            continue
        term = c
        for a, e in zip(prefix, exps[:j]):
            if e:
                term = spec.mul(term, spec.pow(a, e))
        coeffs[exps[j]] ^= term
    return UnivariatePoly(spec, tuple(coeffs), d)
