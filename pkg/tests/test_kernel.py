from collections import Counter

import numpy as np
import pytest

from tamecount import kernel
from tamecount.fideals import enumerate_F, ideal_class

from conftest import algebra

# (factors, weight, modulus, enumeration bound)
CASES = [
    ([2], "ram", 16, 40000),
    ([3], "disc", 9, 40000),
    ([4], "disc", 16, 40000),
    ([2, 2], "ram", 4, 10000),
    ([2, 2], "1,1,2", 16, 20000),
    ([6], "disc", 36, 40000),
    ([2, 4], "ram", 16, 3000),
    ([5], "disc", 25, 40000),
]

needs_compiled = pytest.mark.skipif(kernel.BACKEND != "compiled", reason="compiled kernel not built")


def oracle(lam, X, omit=(), require_all=False):
    counts = Counter()
    skip = {lam.components[s].rep for s in omit}
    for a, _ in enumerate_F(X, lam, omit=tuple(skip)):
        if require_all and {t for t, _ in a.primes()} != {c.rep for c in lam.components}:
            continue
        counts[ideal_class(a, lam)] += 1
    return np.array([counts[k] for k in range(lam.rcg.order)], dtype=np.int64)


@pytest.mark.parametrize("factors,weight,M,bound", CASES)
@pytest.mark.parametrize("backend", ["python", pytest.param("compiled", marks=needs_compiled)])
def test_kernel_matches_enumeration(factors, weight, M, bound, backend):
    lam = algebra(factors, weight, M)
    for X in (1, 2, 50, bound // 10, bound):
        got = kernel.tally(lam.option_table(X), backend=backend, threads=1)
        assert np.array_equal(got, oracle(lam, X)), X
        full = kernel.tally(lam.option_table(X), require_all=True, backend=backend, threads=1)
        assert np.array_equal(full, oracle(lam, X, require_all=True)), X


@pytest.mark.parametrize("backend", ["python", pytest.param("compiled", marks=needs_compiled)])
def test_kernel_omit(backend):
    lam = algebra([2, 2], "ram", 16)
    for omit in [(0,), (1, 2), (0, 1, 2)]:
        got = kernel.tally(lam.option_table(30000, omit), backend=backend)
        assert np.array_equal(got, oracle(lam, 30000, omit))


@needs_compiled
@pytest.mark.parametrize("factors,weight,M,bound", CASES)
def test_backends_agree_at_scale(factors, weight, M, bound):
    lam = algebra(factors, weight, M)
    tab = lam.option_table(bound * 25)
    assert np.array_equal(kernel.tally(tab, backend="python"), kernel.tally(tab, backend="compiled"))


def test_thread_count_does_not_change_result():
    lam = algebra([4], "disc", 16)
    tab = lam.option_table(10**7)
    ref = kernel.tally(tab, threads=1)
    for t in (2, 3, 7):
        assert np.array_equal(kernel.tally(tab, threads=t), ref)


def test_chunks_cover_range():
    for n in (0, 1, 5, 100, 1234):
        for parts in (1, 3, 8):
            chunks = kernel._chunks(n, parts)
            covered = [j for lo, hi in chunks for j in range(lo, hi)]
            assert covered == list(range(n))
