"""Compare the numba and numpy GF(p) elimination kernels.

    python benchmarks/bench_kernels.py [--sizes 64 128 256] [--primes 2 5 65521] [--repeat 3]

Both kernels run on the same random matrices and their outputs are compared
exactly before timings are reported.  The numba timings exclude compilation
(one warm-up call per shape).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pervcone import _kernels as K


def _best(fn, a, p, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(a, p)
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--primes", type=int, nargs="+", default=[2, 5, 65521])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not K.HAS_NUMBA:
        print("numba unavailable or disabled; only the numpy kernel can be timed")
    rng = np.random.default_rng(args.seed)
    print(f"{'p':>6} {'n':>5} {'op':>5} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for p in args.primes:
        for n in args.sizes:
            a = rng.integers(0, p, size=(n, n + n // 2), dtype=np.int64)
            for op, fnp, fnb in (("rref", K.rref_mod_p_numpy, K.rref_mod_p_numba),
                                 ("rank", K.rank_mod_p_numpy, K.rank_mod_p_numba)):
                tn = _best(fnp, a, p, args.repeat)
                if fnb is None:
                    print(f"{p:>6} {n:>5} {op:>5} {tn:>10.4f} {'-':>10} {'-':>8}")
                    continue
                ref, got = fnp(a, p), fnb(a, p)  # warm-up doubles as the agreement check
                if op == "rref":
                    assert np.array_equal(ref[0], got[0]) and list(ref[1]) == list(got[1]), (p, n)
                else:
                    assert ref == got, (p, n)
                tb = _best(fnb, a, p, args.repeat)
                print(f"{p:>6} {n:>5} {op:>5} {tn:>10.4f} {tb:>10.4f} {tn / tb:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
