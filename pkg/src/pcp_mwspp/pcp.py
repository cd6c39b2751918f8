"""The points/lines/partial-sums PCP for quadratic systems over GF(2^r).

A proof consists of three tables:

* points: f on all of F_q^m (flat, base-q index, first coordinate most
  significant);
* lines: coefficients of g_L (degree bound m) for every canonical line;
* partial sums: for every equation i and prefix a_1..a_j (0 <= j < 2m)
  the coefficients (degree bound 4m) of the partial sum of
  h_i(alpha, beta) = c_i(alpha, beta) f(alpha) f(beta).

The verifier draws (i, alpha, beta) with alpha != beta and checks, in
order: the low-degree test at alpha and at beta, the sum claim against
C_i, the 2m-1 consistency identities and the final point identity.
"""

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from .errors import (
    BudgetExceeded,
    DegeneratePoints,
    DimensionMismatch,
    InputError,
    MissingTableEntry,
    NotPowerOfTwo,
    NotSatisfying,
)
from .field import FieldSpec
from .poly import (
    CubeFunction,
    Line,
    UnivariatePoly,
    interpolate_values,
    multilinear_extension,
    multilinear_grid,
)
from .qcsp import evaluate_qcsp
from .sumcheck import consistency_code, sumcheck_codes

DEFAULT_MEM_BUDGET = 1 << 26
DEFAULT_ENUM_BUDGET = 1 << 24

LOW_DEGREE_ALPHA = 1
LOW_DEGREE_BETA = 2


def step_name(code, m):
    """Human name of a verifier failure code (0 is acceptance)."""
    M = 2 * m
    if code == 0:
        return None
    if code == LOW_DEGREE_ALPHA:
        return "LowDegreeAlpha"
    if code == LOW_DEGREE_BETA:
        return "LowDegreeBeta"
    inner = code - 2
    if inner == 1:
        return "SumClaim"
    if inner == M + 1:
        return "FinalPoint"
    return f"Consistency({inner - 1})"


def step_code(name, m):
    for code in range(1, 2 * m + 4):
        if step_name(code, m) == name:
            return code
    raise ValueError(f"unknown verifier step {name!r}")


def log2_exact(n):
    if n < 1 or n & (n - 1):
        raise NotPowerOfTwo(f"n = {n} is not a power of two")
    return n.bit_length() - 1


def _digits(idx, width, q):
    idx = np.asarray(idx, dtype=np.int64)
    if width == 0:
        return np.zeros(idx.shape + (0,), dtype=np.int64)
    return np.stack([(idx // q ** (width - 1 - k)) % q for k in range(width)], axis=-1)


def _index(coords, q):
    idx = np.zeros(coords.shape[:-1], dtype=np.int64)
    for k in range(coords.shape[-1]):
        idx = idx * q + coords[..., k]
    return idx


# ---------------------------------------------------------------------------
# geometry of F_q^m

class Geometry:
    """Points, canonical lines and the line through every ordered pair.

    ``pair_line[a * q^m + b]`` is the index of the canonical line through
    points a and b, with ``pair_ta``/``pair_tb`` their parameters.  For
    a == b the entry is -1 when m >= 2 (there is no unique line); for m = 1
    the whole space is the single line and the pair maps to it.
    """

    def __init__(self, spec, m, mem_budget=DEFAULT_MEM_BUDGET):
        self.spec, self.m = spec, m
        q = spec.q
        self.num_points = q ** m
        if self.num_points ** 2 > mem_budget:
            raise BudgetExceeded(f"q^(2m) = {self.num_points ** 2} exceeds the memory budget {mem_budget}")
        self.coords = _digits(np.arange(self.num_points, dtype=np.int64), m, q)

        # canonical lines: direction with leading nonzero 1, base zero at that pivot
        dirs, bases = [], []
        for d_idx in range(1, self.num_points):
            a = self.coords[d_idx]
            piv = int(np.flatnonzero(a)[0])
            if a[piv] != 1:
                continue
            for b_idx in range(self.num_points):
                b = self.coords[b_idx]
                if b[piv] == 0:
                    dirs.append(d_idx)
                    bases.append(b_idx)
        self.line_dir = np.asarray(dirs, dtype=np.int64)
        self.line_base = np.asarray(bases, dtype=np.int64)
        self.num_lines = len(dirs)
        key = np.full(self.num_points ** 2, -1, dtype=np.int64)
        key[self.line_dir * self.num_points + self.line_base] = np.arange(self.num_lines)
        t = spec.elements()
        A = self.coords[self.line_dir]          # (NL, m)
        B = self.coords[self.line_base]
        pts = spec.mul_arr(t[None, :, None], A[:, None, :]) ^ B[:, None, :]
        self.line_points = _index(pts, q)       # (NL, q) point index at parameter t

        # every ordered pair
        P = self.num_points
        a_idx = np.repeat(np.arange(P, dtype=np.int64), P)
        b_idx = np.tile(np.arange(P, dtype=np.int64), P)
        ca, cb = self.coords[a_idx], self.coords[b_idx]
        diff = ca ^ cb
        nz = diff != 0
        same = ~nz.any(axis=1)
        piv = np.argmax(nz, axis=1)
        rows = np.arange(P * P)
        lead = diff[rows, piv]
        lead = np.where(same, 1, lead)
        scale = spec.inv_arr(lead)
        dn = spec.mul_arr(diff, scale[:, None])
        ta = ca[rows, piv]
        base = ca ^ spec.mul_arr(dn, ta[:, None])
        line = key[_index(dn, q) * P + _index(base, q)]
        if m == 1:
            line = np.zeros(P * P, dtype=np.int64)
            ta = ca[:, 0]
            tb = cb[:, 0]
        else:
            line = np.where(same, -1, line)
            tb = cb[rows, piv]
        self.pair_line = line
        self.pair_ta = np.where(line >= 0, ta, 0)
        self.pair_tb = np.where(line >= 0, tb, 0)

    def line(self, idx):
        a = tuple(int(v) for v in self.coords[self.line_dir[idx]])
        b = tuple(int(v) for v in self.coords[self.line_base[idx]])
        return Line(self.spec, self.m, a, b)

    def line_index(self, L):
        q = self.spec.q
        d = 0
        for v in L.a:
            d = d * q + v
        b = 0
        for v in L.b:
            b = b * q + v
        hits = np.flatnonzero((self.line_dir == d) & (self.line_base == b))
        if not hits.size:
            raise MissingTableEntry(f"line {L.key_hex()} is not canonical")
        return int(hits[0])

    def point_index(self, x):
        idx = 0
        for v in x:
            idx = idx * self.spec.q + int(v)
        return idx


_GEOMETRY_CACHE = {}


def geometry(spec, m, mem_budget=DEFAULT_MEM_BUDGET):
    key = (spec, m)
    if key not in _GEOMETRY_CACHE:
        _GEOMETRY_CACHE[key] = Geometry(spec, m, mem_budget)
    return _GEOMETRY_CACHE[key]


# ---------------------------------------------------------------------------
# coefficient extensions

def coefficient_cubes(P, m):
    """(k, 2^{2m}) cube tables: entry (s << m) | t holds c_i(s, t) for s <= t."""
    if P.n != 1 << m:
        raise NotPowerOfTwo(f"n = {P.n} is not 2^{m}")
    cubes = np.zeros((P.k, 1 << (2 * m)), dtype=np.int64)
    for i, p in enumerate(P.lhs):
        for (s, t), c in p.terms.items():
            cubes[i, (s << m) | t] ^= c
    return cubes


def build_coefficient_extensions(P, m):
    """Multilinear extension in 2m variables of each equation's coefficient table."""
    cubes = coefficient_cubes(P, m)
    return [multilinear_extension(CubeFunction(P.spec, 2 * m, tuple(int(v) for v in row))) for row in cubes]


def coefficient_grid(P, m):
    """c_i(alpha, beta) on all of F_q^{2m}; shape (k, q^{2m}), alpha digits first."""
    return multilinear_grid(P.spec, coefficient_cubes(P, m), 2 * m)


# ---------------------------------------------------------------------------
# tables

@dataclass
class PcpTables:
    spec: FieldSpec
    m: int
    points: np.ndarray        # (q^m,)
    lines: np.ndarray         # (num_lines, m+1)
    psums: list               # psums[j]: (k, q^j, 4m+1)

    def copy(self):
        return PcpTables(self.spec, self.m, self.points.copy(), self.lines.copy(),
                         [p.copy() for p in self.psums])

    @property
    def k(self):
        return self.psums[0].shape[0]

    def check_total(self):
        q, m = self.spec.q, self.m
        geo = geometry(self.spec, m)
        if self.points.shape != (q ** m,):
            raise MissingTableEntry("points table is not total")
        if self.lines.shape != (geo.num_lines, m + 1):
            raise MissingTableEntry("lines table is not total")
        if len(self.psums) != 2 * m:
            raise MissingTableEntry("partial sums missing a prefix length")
        for j, tab in enumerate(self.psums):
            if tab.shape[1:] != (q ** j, 4 * m + 1):
                raise MissingTableEntry(f"partial sums for prefix length {j} are not total")

    def line_poly(self, L):
        geo = geometry(self.spec, self.m)
        row = self.lines[geo.line_index(L)]
        return UnivariatePoly(self.spec, tuple(int(c) for c in row), self.m)

    def lines_map(self):
        geo = geometry(self.spec, self.m)
        return {geo.line(i).key: tuple(int(c) for c in self.lines[i]) for i in range(geo.num_lines)}

    def psum_poly(self, i, prefix):
        j = len(prefix)
        idx = 0
        for a in prefix:
            idx = idx * self.spec.q + int(a)
        row = self.psums[j][i, idx]
        return UnivariatePoly(self.spec, tuple(int(c) for c in row), 4 * self.m)

    # -- directory serialisation ----------------------------------------
    def save(self, path):
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        spec, q, m = self.spec, self.spec.q, self.m
        h = spec.to_hex
        geo = geometry(spec, m)
        files = {
            "points.json": [h(v) for v in self.points],
            "lines.json": {geo.line(i).key_hex(): [h(c) for c in self.lines[i]] for i in range(geo.num_lines)},
            "sums.json": {
                f"{i}/" + "".join(h(a) for a in _digits(np.int64(idx), j, q).tolist() if j):
                [h(c) for c in self.psums[j][i, idx]]
                for j in range(2 * m) for i in range(self.k) for idx in range(q ** j)
            },
        }
        digests = {}
        for name, obj in files.items():
            data = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
            (path / name).write_bytes(data)
            digests[name] = hashlib.sha256(data).hexdigest()
        manifest = {"spec": spec.to_json(), "m": m, "k": self.k, "point_order": "base-q, first coordinate most significant",
                    "sha256": digests}
        (path / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=1))
        return manifest

    @classmethod
    def load(cls, path):
        path = Path(path)
        manifest = json.loads((path / "manifest.json").read_text())
        spec = FieldSpec.from_json(manifest["spec"])
        m, k, q = int(manifest["m"]), int(manifest["k"]), spec.q
        objs = {}
        for name, digest in manifest["sha256"].items():
            data = (path / name).read_bytes()
            if hashlib.sha256(data).hexdigest() != digest:
                raise InputError(f"{name} does not match its manifest digest")
            objs[name] = json.loads(data)
        geo = geometry(spec, m)
        points = np.array([int(v, 16) for v in objs["points.json"]], dtype=np.int64)
        lines = np.zeros((geo.num_lines, m + 1), dtype=np.int64)
        for i in range(geo.num_lines):
            key = geo.line(i).key_hex()
            if key not in objs["lines.json"]:
                raise MissingTableEntry(f"line {key} missing")
            lines[i] = [int(c, 16) for c in objs["lines.json"][key]]
        w = spec.hex_width
        psums = [np.zeros((k, q ** j, 4 * m + 1), dtype=np.int64) for j in range(2 * m)]
        for key, coeffs in objs["sums.json"].items():
            i, pre = key.split("/")
            j = len(pre) // w
            idx = 0
            for s in range(j):
                idx = idx * q + int(pre[s * w:(s + 1) * w], 16)
            psums[j][int(i), idx] = [int(c, 16) for c in coeffs]
        if len(objs["sums.json"]) != sum(k * q ** j for j in range(2 * m)):
            raise MissingTableEntry("partial-sums table is not total")
        t = cls(spec, m, points, lines, psums)
        t.check_total()
        return t


def prover_tables(P, A, m, mem_budget=DEFAULT_MEM_BUDGET):
    """Tables the honest prover writes for assignment ``A`` (satisfying or not)."""
    spec = P.spec
    if P.n != 1 << m:
        raise NotPowerOfTwo(f"n = {P.n} is not 2^{m}")
    q = spec.q
    if P.k * q ** (2 * m) > mem_budget:
        raise BudgetExceeded(f"k q^(2m) = {P.k * q ** (2 * m)} exceeds the memory budget {mem_budget}")
    geo = geometry(spec, m, mem_budget)
    vals = np.asarray([int(v) for v in A], dtype=np.int64)
    if vals.shape[0] != P.n:
        raise DimensionMismatch(f"assignment of length {vals.shape[0]} for n = {P.n}")
    F = multilinear_grid(spec, vals, m)

    nodes = min(q, m + 1)
    lines = interpolate_values(spec, F[geo.line_points[:, :nodes]], m)

    C = coefficient_grid(P, m)
    P2 = q ** m
    fa = np.repeat(F, P2)
    fb = np.tile(F, P2)
    H = spec.mul_arr(C, spec.mul_arr(fa, fb)[None, :])        # (k, q^{2m})
    H = H.reshape((P.k,) + (q,) * (2 * m))
    # degree of h_i in any single variable is at most 2
    zn = min(q, 3)
    psums = []
    for j in range(2 * m):
        t = H
        for ax in range(2 * m, j + 1, -1):
            t = np.take(t, 0, axis=ax) ^ np.take(t, 1, axis=ax)
        t = np.take(t, np.arange(zn), axis=j + 1)              # (k, q.. (j), zn)
        t = t.reshape(P.k, q ** j, zn)
        psums.append(_pad(interpolate_values(spec, t, 2), 4 * m))
    return PcpTables(spec, m, F, lines, psums)


def _pad(coeffs, degree_bound):
    extra = degree_bound + 1 - coeffs.shape[-1]
    if extra <= 0:
        return coeffs[..., :degree_bound + 1]
    pad = np.zeros(coeffs.shape[:-1] + (extra,), dtype=np.int64)
    return np.concatenate([coeffs, pad], axis=-1)


def honest_prover(P, A, m, mem_budget=DEFAULT_MEM_BUDGET):
    """Tables f = f_A, g_L = f_A|_L and the true partial sums; A must satisfy P."""
    if evaluate_qcsp(P, A) != 1:
        raise NotSatisfying("assignment does not satisfy every equation")
    return prover_tables(P, A, m, mem_budget)


# ---------------------------------------------------------------------------
# verifier

@dataclass(frozen=True)
class PcpRandomness:
    i: int
    coords: tuple

    def alpha(self, m):
        return self.coords[:m]

    def beta(self, m):
        return self.coords[m:]


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    failed_step: str = None

    def __post_init__(self):
        if self.accepted != (self.failed_step is None):
            raise ValueError("a verdict either accepts or names its failing step")


class PcpVerifier:
    """Pre-processed verifier: everything except the right-hand sides C_i."""

    def __init__(self, P, m, mem_budget=DEFAULT_MEM_BUDGET):
        self.P, self.m, self.spec = P, m, P.spec
        log2_exact(P.n)
        if P.n != 1 << m:
            raise NotPowerOfTwo(f"n = {P.n} is not 2^{m}")
        self.geo = geometry(P.spec, m, mem_budget)
        self.cgrid = coefficient_grid(P, m)
        self.rhs = np.asarray(P.rhs, dtype=np.int64)

    def codes(self, T, eq, coords, rhs=None, steps=None):
        """Failure code per row; ``steps`` restricts to a subset of codes."""
        spec, m, q = self.spec, self.m, self.spec.q
        geo = self.geo
        eq = np.asarray(eq, dtype=np.int64)
        coords = np.asarray(coords, dtype=np.int64)
        if coords.ndim != 2 or coords.shape[1] != 2 * m:
            raise DimensionMismatch(f"randomness needs {2 * m} coordinates")
        rhs = self.rhs if rhs is None else np.asarray(rhs, dtype=np.int64)
        a_idx = _index(coords[:, :m], q)
        b_idx = _index(coords[:, m:], q)
        pair = a_idx * q ** m + b_idx
        line = geo.pair_line[pair]
        if m > 1 and np.any(a_idx == b_idx):
            raise DegeneratePoints("alpha = beta draws are excluded from the test")
        g = T.lines[line]
        fa, fb = T.points[a_idx], T.points[b_idx]
        codes = np.zeros(eq.shape[0], dtype=np.int64)
        bad_a = spec.horner(g, geo.pair_ta[pair]) != fa
        bad_b = spec.horner(g, geo.pair_tb[pair]) != fb
        final = spec.mul_arr(self.cgrid[eq, pair], spec.mul_arr(fa, fb))
        sc = sumcheck_codes(spec, T.psums, eq, rhs[eq], coords, final)
        sc = np.where(sc > 0, sc + 2, 0)
        if steps is not None:
            keep = np.isin(sc, list(steps))
            sc = np.where(keep, sc, 0)
            bad_a &= LOW_DEGREE_ALPHA in steps
            bad_b &= LOW_DEGREE_BETA in steps
        codes = np.where(bad_a, LOW_DEGREE_ALPHA, np.where(bad_b, LOW_DEGREE_BETA, sc))
        return codes

    def verify(self, T, rho):
        if tuple(rho.alpha(self.m)) == tuple(rho.beta(self.m)):
            raise DegeneratePoints("alpha = beta")
        c = self.codes(T, [rho.i], [list(rho.coords)])[0]
        name = step_name(int(c), self.m)
        return Verdict(name is None, name)

    def check_step(self, T, rho, name):
        """Run only the named check; True if it passes."""
        code = step_code(name, self.m)
        if name.startswith("Consistency") or name in ("SumClaim", "FinalPoint"):
            # later sum-check steps are reported only if earlier ones pass, so
            # isolate by recomputing the single identity directly
            return self._single_identity(T, rho, name)
        return self.codes(T, [rho.i], [list(rho.coords)], steps={code})[0] == 0

    def _single_identity(self, T, rho, name):
        spec, m = self.spec, self.m
        a = list(rho.coords)
        if name == "SumClaim":
            return T.psum_poly(rho.i, []).sum01() == self.P.rhs[rho.i]
        if name == "FinalPoint":
            p = T.psum_poly(rho.i, a[:2 * m - 1])
            al, be = a[:m], a[m:]
            geo, q = self.geo, spec.q
            pair = geo.point_index(al) * q ** m + geo.point_index(be)
            fa, fb = int(T.points[geo.point_index(al)]), int(T.points[geo.point_index(be)])
            return p(a[2 * m - 1]) == spec.mul(int(self.cgrid[rho.i, pair]), spec.mul(fa, fb))
        j = int(name[len("Consistency("):-1])
        return T.psum_poly(rho.i, a[:j - 1])(a[j - 1]) == T.psum_poly(rho.i, a[:j]).sum01()


def pcp_verify(T, P, rho):
    return PcpVerifier(P, T.m).verify(T, rho)


def all_randomness(k, q, m):
    """Every (i, alpha, beta) with alpha != beta, as (eq, coords) arrays."""
    P = q ** m
    pair = np.arange(P * P, dtype=np.int64)
    a, b = pair // P, pair % P
    pair = pair[a != b]
    eq = np.repeat(np.arange(k, dtype=np.int64), pair.shape[0])
    pair = np.tile(pair, k)
    coords = np.concatenate([_digits(pair // P, m, q), _digits(pair % P, m, q)], axis=1)
    return eq, coords


def draw_randomness(seed, trials, k, q, m, start=0):
    """One independent stream per trial index: ``default_rng([seed, t])``.

    beta is redrawn until it differs from alpha.
    """
    eq = np.empty(trials, dtype=np.int64)
    coords = np.empty((trials, 2 * m), dtype=np.int64)
    for n, t in enumerate(range(start, start + trials)):
        rng = np.random.default_rng([seed, t])
        eq[n] = rng.integers(0, k)
        c = rng.integers(0, q, size=2 * m)
        while np.array_equal(c[:m], c[m:]):
            c[m:] = rng.integers(0, q, size=m)
        coords[n] = c
    return eq, coords


@dataclass(frozen=True)
class AcceptanceEstimate:
    probability: Fraction
    interval: tuple          # (lo, hi) as Fractions; exact mode gives a point interval
    accepted: int
    total: int
    exact: bool
    failures: dict           # step name -> count

    def to_json(self):
        return {"probability": str(self.probability), "interval": [str(x) for x in self.interval],
                "accepted": self.accepted, "total": self.total, "exact": self.exact,
                "estimate_kind": "exact" if self.exact else "monte_carlo_wilson95",
                "failures": dict(sorted(self.failures.items()))}


def _breakdown(codes, m):
    vals, counts = np.unique(codes[codes > 0], return_counts=True)
    return {step_name(int(v), m): int(c) for v, c in zip(vals, counts)}


def wilson_interval(successes, trials, confidence=0.95):
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return (Fraction(ci.low).limit_denominator(10 ** 12), Fraction(ci.high).limit_denominator(10 ** 12))


def estimate_acceptance(T, P, mode="exact", trials=10 ** 4, seed=0, budget=DEFAULT_ENUM_BUDGET,
                        chunk=1 << 16, verifier=None):
    """Acceptance probability of the verifier on tables ``T``."""
    V = verifier or PcpVerifier(P, T.m)
    q, m, k = P.spec.q, T.m, P.k
    T.check_total()
    if mode == "exact":
        total = k * q ** m * (q ** m - 1)
        if total > budget:
            raise BudgetExceeded(f"{total} randomness points exceed the enumeration budget {budget}")
        eq, coords = all_randomness(k, q, m)
        codes = np.concatenate([V.codes(T, eq[s:s + chunk], coords[s:s + chunk])
                                for s in range(0, total, chunk)])
        acc = int(np.sum(codes == 0))
        p = Fraction(acc, total)
        return AcceptanceEstimate(p, (p, p), acc, total, True, _breakdown(codes, m))
    if mode != "monte_carlo":
        raise ValueError(f"unknown mode {mode!r}")
    eq, coords = draw_randomness(seed, trials, k, q, m)
    codes = V.codes(T, eq, coords)
    acc = int(np.sum(codes == 0))
    return AcceptanceEstimate(Fraction(acc, trials), wilson_interval(acc, trials), acc, trials, False,
                              _breakdown(codes, m))


# ---------------------------------------------------------------------------
# adversaries

def make_adversary(kind, base, P=None, seed=0, fraction=0.0, alt_assignment=None, patch_sum=False):
    """Deterministic mutation of honest tables.

    kind: ``corrupt_points`` (overwrite ``fraction`` of points with a
    different value), ``wrong_polynomial`` (tables of another assignment,
    optionally with p_{i,empty} shifted by delta*X so the sum claim
    passes), ``random_tables`` or ``zero_sums``.
    """
    rng = np.random.default_rng(seed)
    spec, q = base.spec, base.spec.q
    T = base.copy()
    if kind == "corrupt_points":
        n = int(round(fraction * T.points.shape[0]))
        idx = np.sort(rng.choice(T.points.shape[0], size=n, replace=False))
        T.points[idx] ^= rng.integers(1, q, size=n)
        return T
    if kind == "random_tables":
        T.points = rng.integers(0, q, size=T.points.shape)
        T.lines = rng.integers(0, q, size=T.lines.shape)
        T.psums = [rng.integers(0, q, size=p.shape) for p in T.psums]
        return T
    if kind == "zero_sums":
        T.psums = [np.zeros_like(p) for p in T.psums]
        return T
    if kind == "wrong_polynomial":
        if P is None:
            raise ValueError("wrong_polynomial needs the instance")
        if alt_assignment is None:
            alt_assignment = rng.integers(0, q, size=P.n)
        T = prover_tables(P, alt_assignment, base.m)
        if patch_sum:
            got = np.bitwise_xor.reduce(T.psums[0][:, 0, 1:], axis=-1)
            T.psums[0][:, 0, 1] ^= got ^ np.asarray(P.rhs, dtype=np.int64)
        return T
    raise ValueError(f"unknown adversary kind {kind!r}")


def consistency_holds(T):
    """Every stored partial sum obeys p_prefix(a) = p_{prefix,a}(0) + p_{prefix,a}(1)."""
    spec, q = T.spec, T.spec.q
    for j in range(1, len(T.psums)):
        prev, cur = T.psums[j - 1], T.psums[j]
        k = prev.shape[0]
        s = np.bitwise_xor.reduce(cur[..., 1:], axis=-1).reshape(k, q ** (j - 1), q)
        a = np.tile(spec.elements(), k * q ** (j - 1))
        ev = spec.horner(np.repeat(prev.reshape(-1, prev.shape[-1]), q, axis=0), a)
        if not np.array_equal(ev.reshape(k, q ** (j - 1), q), s):
            return False
    return True


__all__ = [
    "AcceptanceEstimate", "Geometry", "PcpRandomness", "PcpTables", "PcpVerifier", "Verdict",
    "all_randomness", "build_coefficient_extensions", "coefficient_grid", "consistency_code",
    "consistency_holds", "draw_randomness", "estimate_acceptance", "geometry", "honest_prover",
    "make_adversary", "pcp_verify", "prover_tables", "step_code", "step_name", "wilson_interval",
]
