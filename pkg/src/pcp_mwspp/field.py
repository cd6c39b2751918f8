"""Arithmetic in GF(2^r) with an explicit irreducible modulus.

An element is stored as a Python int (or an int64 array entry) whose bit i
is the coefficient of x^i in the polynomial basis.  :class:`FieldSpec` owns
the modulus, the log/antilog tables (for r <= 16) and all scalar and
vectorised operations; :class:`FieldElement` pairs a value with its
FieldSpec at API boundaries.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _accel
from .errors import DegreeMismatch, ReducibleModulus, SpecMismatch, ZeroInverse

MAX_R = 32
TABLE_MAX_R = 16

# Lowest-weight irreducible polynomial per degree (first trinomial
# x^r + x^k + 1 by k, else first pentanomial).  Bit i = coefficient of x^i.
DEFAULT_MODULI = {
    1: 0x3, 2: 0x7, 3: 0xb, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x83, 8: 0x11b,
    9: 0x203, 10: 0x409, 11: 0x805, 12: 0x1009, 13: 0x201b, 14: 0x4021,
    15: 0x8003, 16: 0x1002b, 17: 0x20009, 18: 0x40009, 19: 0x80027,
    20: 0x100009, 21: 0x200005, 22: 0x400003, 23: 0x800021, 24: 0x100001b,
    25: 0x2000009, 26: 0x400001b, 27: 0x8000027, 28: 0x10000003,
    29: 0x20000005, 30: 0x40000003, 31: 0x80000009, 32: 0x10000008d,
}


def clmul(a, b):
    """Carry-less product of two F_2[x] polynomials packed in ints."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_divmod(a, b):
    if b == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    quo = 0
    bl = b.bit_length()
    while a.bit_length() >= bl:
        shift = a.bit_length() - bl
        quo ^= 1 << shift
        a ^= b << shift
    return quo, a


def poly_mod(a, b):
    return poly_divmod(a, b)[1]


@lru_cache(maxsize=None)
def is_irreducible(poly):
    """Trial division by every polynomial of degree 1..deg/2."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in range(1 << d, 1 << (d + 1)):
            if poly_mod(poly, g) == 0:
                return False
    return True


def _bits_to_int(bits):
    out = 0
    for i, b in enumerate(bits):
        if int(b) not in (0, 1):
            raise ValueError(f"modulus coefficient {b!r} is not a bit")
        if int(b):
            out |= 1 << i
    return out


def _prime_factors(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


class FieldSpec:
    """GF(2^r) defined by an irreducible ``modulus`` (int, bit i = x^i).

    Specs compare equal iff ``(r, modulus)`` match.  Construct through
    :func:`field_new` or :func:`gf` so that table building is shared.
    """

    __slots__ = ("r", "modulus", "q", "log", "exp", "_gen")

    def __init__(self, r, modulus=None):
        if not isinstance(r, (int, np.integer)) or r < 1:
            raise ValueError(f"extension degree must be a positive integer, got {r!r}")
        r = int(r)
        if r > MAX_R:
            raise ValueError(f"r={r} exceeds the supported maximum {MAX_R}")
        if modulus is None:
            modulus = DEFAULT_MODULI[r]
        elif not isinstance(modulus, (int, np.integer)):
            modulus = _bits_to_int(modulus)
        modulus = int(modulus)
        if modulus.bit_length() - 1 != r:
            raise DegreeMismatch(f"modulus {modulus:#x} has degree {modulus.bit_length() - 1}, expected {r}")
        if not is_irreducible(modulus):
            raise ReducibleModulus(f"modulus {modulus:#x} factors over F_2")
        self.r = r
        self.modulus = modulus
        self.q = 1 << r
        self.log = None
        self.exp = None
        self._gen = None
        if r <= TABLE_MAX_R:
            self._build_tables()

    def _build_tables(self):
        q, order = self.q, self.q - 1
        factors = _prime_factors(order) if order > 1 else []
        gen = None
        for cand in range(1, q):
            if all(self._pow_slow(cand, order // p) != 1 for p in factors):
                gen = cand
                break
        exp = np.zeros(2 * order, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = 1
        for i in range(order):
            exp[i] = x
            log[x] = i
            x = self._mul_slow(x, gen)
        exp[order:] = exp[:order]
        self.exp, self.log, self._gen = exp, log, gen

    def _mul_slow(self, a, b):
        return poly_mod(clmul(a, b), self.modulus)

    def _pow_slow(self, a, e):
        out = 1
        while e:
            if e & 1:
                out = self._mul_slow(out, a)
            a = self._mul_slow(a, a)
            e >>= 1
        return out

    # -- identity -------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.r, self.modulus) == (other.r, other.modulus)

    def __hash__(self):
        return hash(("GF2r", self.r, self.modulus))

    def __repr__(self):
        return f"FieldSpec(r={self.r}, modulus={self.modulus:#x})"

    @property
    def tabled(self):
        return self.log is not None

    @property
    def modulus_bits(self):
        return tuple((self.modulus >> i) & 1 for i in range(self.r + 1))

    # -- scalar ops on ints --------------------------------------------
    def check(self, a):
        a = int(a)
        if not 0 <= a < self.q:
            raise SpecMismatch(f"{a} is not an element of GF(2^{self.r})")
        return a

    @staticmethod
    def add(a, b):
        return a ^ b

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if self.log is not None:
            return int(self.exp[self.log[a] + self.log[b]])
        return self._mul_slow(int(a), int(b))

    def inv(self, a):
        """Inverse by the extended Euclidean algorithm over F_2[x]."""
        a = int(a)
        if a == 0:
            raise ZeroInverse("0 has no multiplicative inverse")
        r0, r1 = self.modulus, a
        s0, s1 = 0, 1
        while r1 != 1:
            quo, rem = poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, s0 ^ clmul(quo, s1)
        return poly_mod(s1, self.modulus)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        if e == 0:
            return 1
        if a == 0:
            return 0
        if self.log is not None:
            return int(self.exp[(int(self.log[a]) * e) % (self.q - 1)])
        return self._pow_slow(int(a), e)

    # -- vectorised ops on int64 arrays ---------------------------------
    def mul_arr(self, a, b):
        if self.log is not None:
            return _accel.mul_tab(a, b, self.log, self.exp)
        return _accel.mul_bits(a, b, self.modulus, self.r)

    def inv_arr(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroInverse("0 has no multiplicative inverse")
        if self.log is not None:
            return self.exp[(self.q - 1 - self.log[a]) % (self.q - 1)]
        return self.pow_arr(a, self.q - 2)

    def pow_arr(self, a, e):
        a = np.asarray(a, dtype=np.int64)
        out = np.ones(a.shape, dtype=np.int64)
        base = a.copy()
        while e:
            if e & 1:
                out = self.mul_arr(out, base)
            base = self.mul_arr(base, base)
            e >>= 1
        return out

    def horner(self, coeffs, x):
        """Evaluate each row of ``coeffs`` (shape (N, d+1)) at ``x[row]``."""
        coeffs = np.asarray(coeffs, dtype=np.int64)
        x = np.broadcast_to(np.asarray(x, dtype=np.int64), (coeffs.shape[0],))
        if self.log is not None:
            return _accel.horner_tab(coeffs, x, self.log, self.exp)
        acc = coeffs[:, -1].copy()
        for k in range(coeffs.shape[1] - 2, -1, -1):
            acc = self.mul_arr(acc, x) ^ coeffs[:, k]
        return acc

    def lintrans(self, mat, vals):
        """``out[row, k] = sum_i mat[k, i] * vals[row, i]`` over the field."""
        if self.log is not None:
            return _accel.lintrans_tab(mat, vals, self.log, self.exp)
        mat = np.asarray(mat, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.int64)
        out = np.zeros((vals.shape[0], mat.shape[0]), dtype=np.int64)
        for k in range(mat.shape[0]):
            for i in range(mat.shape[1]):
                out[:, k] ^= self.mul_arr(mat[k, i], vals[:, i])
        return out

    def elements(self):
        return np.arange(self.q, dtype=np.int64)

    # -- element wrappers and serialisation ------------------------------
    def element(self, value):
        return FieldElement(self, self.check(value))

    def zero(self):
        return FieldElement(self, 0)

    def one(self):
        return FieldElement(self, 1)

    @property
    def hex_width(self):
        return (self.r + 3) // 4

    def to_hex(self, value):
        return format(int(value), f"0{self.hex_width}x")

    def from_hex(self, text):
        return self.check(int(text, 16))

    def to_json(self):
        return {"r": self.r, "modulus": format(self.modulus, "x")}

    @staticmethod
    def from_json(obj):
        return gf(int(obj["r"]), int(obj["modulus"], 16))


@lru_cache(maxsize=None)
def gf(r, modulus=None):
    """Cached :class:`FieldSpec` constructor (modulus given as int or None)."""
    return FieldSpec(r, modulus)


def field_new(r, modulus=None):
    """Validate ``modulus`` (bit sequence, low degree first, or int) for GF(2^r)."""
    if modulus is not None and not isinstance(modulus, (int, np.integer)):
        bits = list(modulus)
        if len(bits) != r + 1 or int(bits[-1]) != 1:
            raise DegreeMismatch(f"modulus needs {r + 1} coefficients with leading 1")
        modulus = _bits_to_int(bits)
    return gf(int(r), None if modulus is None else int(modulus))


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    value: int

    def _other(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.spec != self.spec:
            raise SpecMismatch(f"{self.spec!r} vs {other.spec!r}")
        return other.value

    @property
    def bits(self):
        return tuple((self.value >> i) & 1 for i in range(self.spec.r))

    def __add__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.spec, self.value ^ v)

    __sub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.spec, self.spec.mul(self.value, v))

    def __truediv__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.spec, self.spec.div(self.value, v))

    def __pow__(self, e):
        return FieldElement(self.spec, self.spec.pow(self.value, int(e)))

    def inverse(self):
        return FieldElement(self.spec, self.spec.inv(self.value))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def hex(self):
        return self.spec.to_hex(self.value)

    def __repr__(self):
        return f"GF(2^{self.spec.r})[{self.hex()}]"


def add(a, b):
    return a + b


def mul(a, b):
    return a * b


def inverse(a):
    return a.inverse()


def random_element(spec, rng):
    """Uniform element; ``rng`` is a ``numpy.random.Generator``."""
    return FieldElement(spec, int(rng.integers(0, spec.q)))
