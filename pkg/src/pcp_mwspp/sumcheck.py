"""Table-based sum-check protocol and the points-vs-lines low-degree test.

Partial-sum tables are stored per prefix length: ``psums[j]`` has shape
(K, q^j, d+1) where K is the number of independent instances (one per
equation in the PCP) and the middle axis is the base-q index of the
prefix a_1..a_j (a_1 most significant).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, MissingTableEntry
from .poly import MultivariatePoly, UnivariatePoly, partial_sum

ACCEPT = 0
SUM_CLAIM = 1
# codes 2 .. M are Consistency(1) .. Consistency(M-1); M + 1 is the final point check


def consistency_code(j):
    return 1 + j


def final_code(M):
    return M + 1


def sum01_rows(coeffs):
    """p(0) + p(1) for each row of a coefficient array: XOR of coeffs[1:]."""
    return np.bitwise_xor.reduce(coeffs[..., 1:], axis=-1)


def prefix_index(coords, j, q):
    idx = np.zeros(coords.shape[0], dtype=np.int64)
    for k in range(j):
        idx = idx * q + coords[:, k]
    return idx


def sumcheck_codes(spec, psums, inst, target, coords, final):
    """First failing step per row (0 = accept), all rows at once.

    inst: (T,) instance index into axis 0 of every ``psums[j]``.
    target: (T,) claimed sums; coords: (T, M); final: (T,) values g(x).
    """
    T, M = coords.shape
    if len(psums) != M:
        raise DimensionMismatch(f"{len(psums)} partial-sum levels for {M} coordinates")
    q = spec.q
    codes = np.zeros(T, dtype=np.int64)
    prev = None
    for j in range(M):
        rows = psums[j][inst, prefix_index(coords, j, q)]
        s = sum01_rows(rows)
        bad = (s != target) if j == 0 else (spec.horner(prev, coords[:, j - 1]) != s)
        codes = np.where((codes == 0) & bad, SUM_CLAIM if j == 0 else consistency_code(j), codes)
        prev = rows
    bad = spec.horner(prev, coords[:, M - 1]) != final
    return np.where((codes == 0) & bad, final_code(M), codes)


def _check_total(psums, M, q):
    for j in range(M):
        if j >= len(psums) or psums[j] is None or psums[j].shape[-2] != q ** j:
            raise MissingTableEntry(f"partial sums for prefixes of length {j} are incomplete")


def sum_check_verify(g_oracle, c, psums, x, spec=None):
    """One run of the protocol at the point ``x``.

    ``g_oracle`` is a callable on points of F_q^M or a flat value table of
    length q^M; ``psums`` is a list of (q^j, d+1) arrays or (1, q^j, d+1).
    """
    x = np.asarray([int(v) for v in x], dtype=np.int64)
    M = x.shape[0]
    if spec is None:
        spec = c.spec
    q = spec.q
    tabs = [np.asarray(p, dtype=np.int64) for p in psums]
    tabs = [p[None] if p.ndim == 2 else p for p in tabs]
    _check_total(tabs, M, q)
    if callable(g_oracle):
        gx = int(g_oracle(tuple(int(v) for v in x)))
    else:
        gx = int(np.asarray(g_oracle)[prefix_index(x[None], M, q)[0]])
    code = sumcheck_codes(spec, tabs, np.zeros(1, dtype=np.int64),
                          np.array([int(c)], dtype=np.int64), x[None], np.array([gx]))
    return bool(code[0] == ACCEPT)


def sum_check_all(spec, g_table, c, psums):
    """Failure code at every x in F_q^M (exhaustive); ``g_table`` is flat, length q^M."""
    M = len(psums)
    q = spec.q
    tabs = [np.asarray(p, dtype=np.int64) for p in psums]
    tabs = [p[None] if p.ndim == 2 else p for p in tabs]
    _check_total(tabs, M, q)
    idx = np.arange(q ** M, dtype=np.int64)
    coords = np.stack([(idx // q ** (M - 1 - k)) % q for k in range(M)], axis=1)
    T = idx.shape[0]
    return sumcheck_codes(spec, tabs, np.zeros(T, dtype=np.int64), np.full(T, int(c), dtype=np.int64),
                          coords, np.asarray(g_table, dtype=np.int64))


def honest_partial_sums(g):
    """Every partial-sum table of a multivariate polynomial ``g`` (symbolic)."""
    spec, M = g.spec, g.num_vars
    q = spec.q
    out = []
    for j in range(M):
        tab = np.zeros((q ** j, g.total_degree_bound + 1), dtype=np.int64)
        for idx in range(q ** j):
            prefix = [(idx // q ** (j - 1 - k)) % q for k in range(j)]
            tab[idx] = partial_sum(g, prefix).coeffs
        out.append(tab)
    return out


def psum_poly(spec, psums, prefix):
    """Look up one partial-sum entry as a :class:`UnivariatePoly`."""
    j = len(prefix)
    tab = psums[j]
    idx = prefix_index(np.asarray([prefix], dtype=np.int64).reshape(1, j), j, spec.q)[0]
    row = tab[idx] if tab.ndim == 2 else tab[0, idx]
    return UnivariatePoly(spec, tuple(int(v) for v in row), row.shape[0] - 1)


def low_degree_test(points, lines, x, L, line_key=None):
    """g_L(t_x) == f(x) for the point ``x`` on the canonical line ``L``.

    ``points`` is a flat table over F_q^m (base-q index, first coordinate most
    significant) and ``lines`` maps line keys to coefficient sequences.
    """
    spec = L.spec
    x = tuple(int(v) for v in x)
    t = L.param_of(x)
    if t is None:
        raise DimensionMismatch(f"point {x} is not on the line")
    key = L.key if line_key is None else line_key
    try:
        coeffs = lines[key]
    except KeyError:
        raise MissingTableEntry(f"no line polynomial for {L.key_hex()}") from None
    idx = 0
    for v in x:
        idx = idx * spec.q + v
    if idx >= len(points):
        raise MissingTableEntry(f"no point value for {x}")
    g = UnivariatePoly(spec, tuple(int(c) for c in coeffs), len(coeffs) - 1)
    return g(t) == int(points[idx])


# ---------------------------------------------------------------------------
# adversaries against a single sum-check instance

def _all_points(q, M):
    idx = np.arange(q ** M, dtype=np.int64)
    return np.stack([(idx // q ** (M - 1 - k)) % q for k in range(M)], axis=1)


def _random_poly(spec, M, d, rng):
    terms = []
    for exps in np.ndindex(*(d + 1,) * M):
        if sum(exps) <= d:
            terms.append((tuple(int(e) for e in exps), int(rng.integers(0, spec.q))))
    return MultivariatePoly.build(spec, M, terms, d)


def _cube_sum(g):
    out = 0
    for b in np.ndindex(*(2,) * g.num_vars):
        out ^= g(tuple(int(v) for v in b))
    return out


def _patch(spec, roots, target_shift, d):
    """delta * prod (z - r) (degree <= d) whose value sum over {0,1} equals ``target_shift``."""
    coeffs = [1]
    for r in roots:
        nxt = [0] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] ^= c
            nxt[k] ^= spec.mul(c, r)
        coeffs = nxt
    s = 0
    for k in range(1, len(coeffs)):
        s ^= coeffs[k]
    if s == 0:
        return None
    delta = spec.mul(target_shift, spec.inv(s))
    out = np.zeros(d + 1, dtype=np.int64)
    out[:len(coeffs)] = [spec.mul(delta, c) for c in coeffs]
    return out


@dataclass
class SumcheckAdversary:
    kind: str
    c: int                 # claimed sum (differs from the sum of ``reference``)
    reference: np.ndarray  # value table of the low-degree g^1, length q^M
    oracle: np.ndarray     # value table of the arbitrary function g read at step 3
    psums: list            # psums[j]: (q^j, d+1)


def sumcheck_adversaries(spec, M=2, d=2, count=120, seed=0):
    """Adversary family for the soundness experiment, deterministic per seed.

    Kinds cycle through: honest partial sums of another polynomial with the
    claimed sum (oracle equal to g^1 or mixed), a linear or two-root patch
    of the top partial sum, two-root patches at every level, and random
    tables.  Every adversary's g^1 sums to something other than c.
    """
    q = spec.q
    pts = _all_points(q, M)
    kinds = ["other_poly", "other_poly_mixed", "linear_patch", "two_root_top", "two_root_all", "random"]
    out = []
    for n in range(count):
        rng = np.random.default_rng([seed, n])
        kind = kinds[n % len(kinds)]
        g1 = _random_poly(spec, M, d, rng)
        s1 = _cube_sum(g1)
        c = int(rng.integers(0, q - 1))
        c = c + 1 if c >= s1 else c          # any value except s1
        ref = g1.eval_points(pts)
        if kind.startswith("other_poly"):
            g2 = _random_poly(spec, M, d, rng)
            # fix the constant-in-suffix monomial so the cube sum hits c
            shift = _cube_sum(g2) ^ c
            terms = dict(g2.monomials)
            full = tuple([1] * M)
            terms[full] = terms.get(full, 0) ^ shift
            g2 = MultivariatePoly.build(spec, M, list(terms.items()), max(d, M))
            psums = [p[:, :d + 1] if p.shape[1] > d + 1 else p for p in honest_partial_sums(g2)]
            oracle = ref.copy()
            if kind.endswith("mixed"):
                mask = rng.random(q ** M) < 0.5
                oracle[mask] = g2.eval_points(pts)[mask]
        else:
            psums = [np.asarray(p, dtype=np.int64) for p in honest_partial_sums(g1)]
            oracle = ref.copy()
            if kind == "random":
                psums = [rng.integers(0, q, size=p.shape) for p in psums]
            else:
                need = s1 ^ c
                if kind == "linear_patch":
                    psums[0][0] ^= _patch(spec, [0], need, d)
                else:
                    psums[0][0] ^= _root_patch(spec, rng, need, d)
                    if kind == "two_root_all":
                        _repair_levels(spec, psums, q, d, rng)
        out.append(SumcheckAdversary(kind, c, ref, oracle, psums))
    return out


def _root_patch(spec, rng, shift, d):
    """Patch with d distinct random roots (redrawn until its cube sum is nonzero)."""
    while True:
        roots = [int(v) for v in rng.choice(spec.q, size=d, replace=False)]
        patch = _patch(spec, roots, shift, d)
        if patch is not None:
            return patch


def _repair_levels(spec, psums, q, d, rng):
    """Make every level consistent with its parent except on a two-root set."""
    for j in range(1, len(psums)):
        parent = psums[j - 1]
        for idx in range(parent.shape[0]):
            for a in range(q):
                child = idx * q + a
                want = int(spec.horner(parent[idx][None], np.array([a]))[0])
                have = int(sum01_rows(psums[j][child][None])[0])
                if want != have:
                    psums[j][child] ^= _root_patch(spec, rng, want ^ have, d)


def soundness_event_count(spec, adv):
    """#{x : verifier accepts and g(x) = g^1(x)} over all of F_q^M."""
    codes = sum_check_all(spec, adv.oracle, adv.c, adv.psums)
    return int(np.sum((codes == ACCEPT) & (adv.oracle == adv.reference)))
