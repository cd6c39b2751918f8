"""Hot GF(2^r) kernels with a numba path and a pure-numpy fallback.

Elements are int64 arrays holding the polynomial-basis bit pattern of each
field element.  Table-backed fields (r <= 16) use log/antilog tables; the
exp table has length 2*(q-1) so that ``log[a] + log[b]`` never needs a
modular reduction.

The backend is chosen once at import from ``PCP_MWSPP_NUMBA`` (``0`` turns
numba off) and can be switched at runtime with :func:`set_backend`, which
is what the benchmark script does.  Both backends must agree bit for bit.
"""

import os

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_env = os.environ.get("PCP_MWSPP_NUMBA", "1").strip().lower()
_BACKEND = "numba" if HAVE_NUMBA and _env not in ("0", "false", "no", "off") else "numpy"


def backend():
    return _BACKEND


def set_backend(name):
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    _BACKEND = name


# ---------------------------------------------------------------------------
# numpy reference path

def _mul_tab_np(a, b, log, exp):
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    out = exp[log[a] + log[b]]
    return np.where((a == 0) | (b == 0), 0, out)


def mul_bits(a, b, modulus, r):
    """Carry-less multiply then reduce; used when no tables exist (r > 16)."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    acc = np.zeros(a.shape, dtype=np.int64)
    b = b.copy()
    top = np.int64(1) << r
    for bit in range(r):
        acc ^= np.where((a >> bit) & 1, b, 0)
        b = b << 1
        b = np.where(b & top, b ^ modulus, b)
    return acc


def _horner_tab_np(coeffs, x, log, exp):
    coeffs = np.asarray(coeffs, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64)
    acc = coeffs[:, -1].copy()
    for k in range(coeffs.shape[1] - 2, -1, -1):
        acc = _mul_tab_np(acc, x, log, exp) ^ coeffs[:, k]
    return acc


def _lintrans_tab_np(mat, vals, log, exp):
    mat = np.asarray(mat, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.int64)
    out = np.zeros((vals.shape[0], mat.shape[0]), dtype=np.int64)
    for k in range(mat.shape[0]):
        for i in range(mat.shape[1]):
            if mat[k, i]:
                out[:, k] ^= _mul_tab_np(mat[k, i], vals[:, i], log, exp)
    return out


# ---------------------------------------------------------------------------
# numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _mul_tab_nb(a, b, log, exp):
        out = np.empty(a.shape[0], dtype=np.int64)
        for k in range(a.shape[0]):
            x = a[k]
            y = b[k]
            if x == 0 or y == 0:
                out[k] = 0
            else:
                out[k] = exp[log[x] + log[y]]
        return out

    @njit(cache=True)
    def _horner_tab_nb(coeffs, x, log, exp):
        n, d = coeffs.shape
        out = np.empty(n, dtype=np.int64)
        for k in range(n):
            acc = coeffs[k, d - 1]
            xk = x[k]
            lx = log[xk]
            for c in range(d - 2, -1, -1):
                if acc != 0 and xk != 0:
                    acc = exp[log[acc] + lx]
                else:
                    acc = 0
                acc ^= coeffs[k, c]
            out[k] = acc
        return out

    @njit(cache=True)
    def _lintrans_tab_nb(mat, vals, log, exp):
        n = vals.shape[0]
        kk, nn = mat.shape
        out = np.zeros((n, kk), dtype=np.int64)
        for row in range(n):
            for k in range(kk):
                acc = 0
                for i in range(nn):
                    m = mat[k, i]
                    v = vals[row, i]
                    if m != 0 and v != 0:
                        acc ^= exp[log[m] + log[v]]
                out[row, k] = acc
        return out


# ---------------------------------------------------------------------------
# dispatch

def mul_tab(a, b, log, exp):
    if _BACKEND == "numba":
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        shape = a.shape
        out = _mul_tab_nb(np.ascontiguousarray(a).reshape(-1), np.ascontiguousarray(b).reshape(-1), log, exp)
        return out.reshape(shape)
    return _mul_tab_np(a, b, log, exp)


def horner_tab(coeffs, x, log, exp):
    """Evaluate row ``k`` of ``coeffs`` (low degree first) at ``x[k]``."""
    if _BACKEND == "numba":
        return _horner_tab_nb(np.ascontiguousarray(coeffs, dtype=np.int64),
                              np.ascontiguousarray(x, dtype=np.int64), log, exp)
    return _horner_tab_np(coeffs, x, log, exp)


def lintrans_tab(mat, vals, log, exp):
    """Row-wise GF linear map: ``out[row] = mat @ vals[row]``."""
    if _BACKEND == "numba":
        return _lintrans_tab_nb(np.ascontiguousarray(mat, dtype=np.int64),
                                np.ascontiguousarray(vals, dtype=np.int64), log, exp)
    return _lintrans_tab_np(mat, vals, log, exp)
