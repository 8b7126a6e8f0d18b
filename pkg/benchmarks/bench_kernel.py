"""Compare the compiled Smith-form kernel with the pure-Python fallback.

    python3 benchmarks/bench_kernel.py [--repeat 3]

Times integer invariant factors and mod-p ranks on seeded random matrices,
then the integral homology of a few small spaces (which is dominated by the
same kernels).  Both backends must agree; the script exits 1 otherwise.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from xsimp import chain as ch
from xsimp import dgset as dg
from xsimp import smith as sm
from xsimp.csg import CYCLIC


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def random_matrix(rng, m, n, density=0.3, bound=3):
    A = rng.integers(-bound, bound + 1, size=(m, n))
    A[rng.random((m, n)) > density] = 0
    return A.astype(object)


def boundary_matrices():
    C = ch.chains(dg.product(dg.simplex(2, 4), dg.simplex(2, 4)))
    yield "Delta2xDelta2 d3", C.d(3)
    yield "Delta2xDelta2 d4", C.d(4)
    yield "Delta C[2] d3", ch.chains(dg.standard(CYCLIC, 2, 4)).d(3)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)
    if sm._kernel is None:
        print("compiled kernel not built; only the Python backend is available")
        return 1
    rng = np.random.default_rng(args.seed)
    cases = [(f"random {m}x{n}", random_matrix(rng, m, n)) for m, n in ((20, 20), (40, 60), (80, 80))]
    cases += list(boundary_matrices())
    print(f"{'case':<24}{'op':<10}{'cython s':>11}{'python s':>11}{'speedup':>9}")
    ok = True
    for name, A in cases:
        for op, run in (("smith", lambda b: sm.elementary_divisors(A, backend=b)),
                        ("rank/7", lambda b: sm.rank(A, 7, backend=b))):
            tc, rc = _best(lambda: run("cython"), args.repeat)
            tp, rp = _best(lambda: run("python"), args.repeat)
            ok = ok and rc == rp
            print(f"{name:<24}{op:<10}{tc:>11.5f}{tp:>11.5f}{tp / max(tc, 1e-9):>8.1f}x")
    if not ok:
        print("backends disagree")
        return 1
    print("backends agree on every case")
    return 0


if __name__ == "__main__":
    sys.exit(main())
