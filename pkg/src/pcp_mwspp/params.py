"""Parameter arithmetic for the full-scale reduction (symbolic only).

All logarithms are base 2.  With L = log n, the choices are
D = ceil(4/eps), log q = L^D, h = q^(1/L^2) so log h = L^(D-2), m = L
and log N <= L^(D+2).  Everything is an exact integer or Fraction; no
quantity here is ever materialised as a field or an instance.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidEpsilon, NotPowerOfTwo


def _as_fraction(eps):
    if isinstance(eps, Fraction):
        return eps
    if isinstance(eps, float):
        return Fraction(str(eps))
    return Fraction(eps)


def _pow2_exceeds(exponent, value):
    """2^exponent > value, exactly, without building huge powers when avoidable."""
    if exponent >= value.bit_length():
        return True
    return (1 << exponent) > value


@dataclass
class ParameterReport:
    epsilon: Fraction
    n: int
    log_n: int
    D: int
    log_q: int
    log_h: Fraction
    log_N_bound: int
    log_N_construction: int       # ceil(log2(2m+2)) + (6m+2) log q
    hardness_exponent: Fraction   # log^{1-eps} N <= L^(this)
    verdicts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return all(self.verdicts.values())

    def to_json(self):
        return {
            "epsilon": str(self.epsilon), "n": self.n, "log_n": self.log_n, "D": self.D,
            "log_q": str(self.log_q), "log_h": str(self.log_h),
            "log_N_bound": str(self.log_N_bound), "log_N_construction": str(self.log_N_construction),
            "hardness_exponent": str(self.hardness_exponent),
            "verdicts": dict(sorted(self.verdicts.items())), "notes": list(self.notes), "ok": self.ok,
        }


def compute_parameters(eps, n):
    eps = _as_fraction(eps)
    if not 0 < eps <= 1:
        raise InvalidEpsilon(f"epsilon must lie in (0, 1], got {eps}")
    if n < 4 or n & (n - 1):
        raise NotPowerOfTwo(f"n = {n} must be a power of two, at least 4")
    L = n.bit_length() - 1
    D = math.ceil(4 / eps)
    notes = []
    if D != 4 / eps:
        notes.append(f"4/eps = {4 / eps} is not an integer; D rounded up to {D}")
    log_q = L ** D
    log_h = Fraction(log_q, L * L)
    log_N_bound = L ** (D + 2)
    m = L
    # columns: (2m+2) layers, the largest holding q^(2m) vertices with q^(4m+1) labels
    log_N_construction = math.ceil(math.log2(2 * m + 2)) + (6 * m + 2) * log_q
    hardness = (D + 2) * (1 - eps)
    v = {}
    v["log_h_le_log_q_over_log2n"] = log_h <= Fraction(log_q, L * L)
    v["hardness_le_log_h"] = hardness <= D - 2 and Fraction(L) ** (D - 2) <= log_h
    v["N_le_q_pow_log2n"] = log_N_construction <= L * L * log_q
    # log q >> log n * log log n, read as L^(D-1) > log2 L
    v["log_q_dominates_log_n_loglog_n"] = _pow2_exceeds(L ** (D - 1), L)
    # 12 m^2 rho^2 / q < 1 with rho = m^3 h: 12 m^8 < 2^(log q - 2 log h)
    gap = log_q - 2 * log_h
    v["collision_bound_below_one"] = gap.denominator == 1 and _pow2_exceeds(int(gap), 12 * m ** 8)
    v["hyperedge_size_le_3m"] = 2 * m + 3 <= 3 * m
    return ParameterReport(eps, n, L, D, log_q, log_h, log_N_bound, log_N_construction, hardness, v, notes)
