"""Compare the numba and numpy backends of the GF(2^r) kernels.

    python3 benchmarks/bench_kernels.py [--r 4] [--size 1000000] [--repeat 5]

Also times one end-to-end verifier pass (exact PCP acceptance at q=16,
m=2) under each backend, and checks that both backends agree bit for bit.
"""

import argparse
import time

import numpy as np

from pcp_mwspp import _accel
from pcp_mwspp.field import gf
from pcp_mwspp.pcp import estimate_acceptance, honest_prover
from pcp_mwspp.qcsp import boost_soundness, planted_instance


def best_of(fn, repeat):
    fn()  # warm-up (includes JIT compilation for numba)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r", type=int, default=4)
    ap.add_argument("--size", type=int, default=10 ** 6)
    ap.add_argument("--degree", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-pcp", action="store_true")
    args = ap.parse_args()

    spec = gf(args.r)
    rng = np.random.default_rng(0)
    a = rng.integers(0, spec.q, size=args.size)
    b = rng.integers(0, spec.q, size=args.size)
    coeffs = rng.integers(0, spec.q, size=(args.size, args.degree + 1))
    mat = rng.integers(0, spec.q, size=(8, 8))
    vals = rng.integers(0, spec.q, size=(args.size // 8, 8))

    kernels = {
        "mul": lambda: spec.mul_arr(a, b),
        "horner": lambda: spec.horner(coeffs, a),
        "lintrans": lambda: spec.lintrans(mat, vals),
    }
    if not args.skip_pcp:
        P0, A = planted_instance(gf(4), 4, 3, np.random.default_rng(0))
        P = boost_soundness(P0)
        T = honest_prover(P, A, 2)
        kernels["pcp_exact_q16_m2"] = lambda: estimate_acceptance(T, P, "exact")

    results, outputs = {}, {}
    for name in ("numpy", "numba"):
        _accel.set_backend(name)
        for k, fn in kernels.items():
            results[(k, name)] = best_of(fn, args.repeat if k != "pcp_exact_q16_m2" else 1)
            out = fn()
            outputs[(k, name)] = out if isinstance(out, np.ndarray) else out.accepted
    _accel.set_backend("numba")

    print(f"GF(2^{args.r}), {args.size} elements, best of {args.repeat}")
    print(f"{'kernel':<20}{'numpy s':>12}{'numba s':>12}{'speedup':>10}  agree")
    for k in kernels:
        tn, tb = results[(k, "numpy")], results[(k, "numba")]
        agree = np.array_equal(outputs[(k, "numpy")], outputs[(k, "numba")])
        print(f"{k:<20}{tn:>12.4f}{tb:>12.4f}{tn / tb:>10.2f}  {agree}")


if __name__ == "__main__":
    main()
