"""Time the compiled and pure-Python class-tally kernels on the same tables.

    python benchmarks/bench_kernel.py [--repeat N]

Both kernels must return identical counts; the script exits 1 otherwise.
"""

import argparse
import sys
import time
import numpy as np

from tamecount import kernel
from tamecount import make_group
from tamecount.fideals import LambdaAlgebra

CASES = [
    ("C2 ram M=16", [2], "ram", 16, 10**8),
    ("C3 ram M=9", [3], "ram", 9, 10**7),
    ("C4 ram M=16", [4], "ram", 16, 10**7),
    ("C2xC2 ram M=4", [2, 2], "ram", 4, 10**7),
]


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if kernel.BACKEND != "compiled":
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
        return 1
    print(f"{'case':<16}{'X':>10}{'compiled s':>12}{'python s':>12}{'speedup':>10}")
    ok = True
    for name, factors, weight, M, X in CASES:
        lam = LambdaAlgebra(make_group(factors), weight, M)
        table = lam.option_table(X, ())
        tc, a = best_of(lambda: kernel.tally(table, threads=1, backend="compiled"), args.repeat)
        tp, b = best_of(lambda: kernel.tally(table, threads=1, backend="python"), 1)
        ok &= np.array_equal(a, b)
        print(f"{name:<16}{X:>10.0e}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x")
    print("counts identical" if ok else "COUNTS DIFFER")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
