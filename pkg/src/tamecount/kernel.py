"""Kernel selection and parallel class tallies.

The compiled kernel is used when it imports; ``TAMECOUNT_PURE=1`` forces the
pure-Python one.  ``TAMECOUNT_THREADS`` sets the default worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernel

try:
    if os.environ.get("TAMECOUNT_PURE") == "1":
        raise ImportError("pure kernel requested")
    from . import _kernel as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def backend_module(name: str | None = None):
    name = name or BACKEND
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available")
        return _compiled
    if name == "python":
        return _pykernel
    raise ValueError(f"unknown backend {name!r}")


def default_threads() -> int:
    env = os.environ.get("TAMECOUNT_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


def _chunks(n: int, parts: int) -> list[tuple[int, int]]:
    """Top-level prime ranges: singletons for the heavy small primes, then
    geometrically growing blocks."""
    out, lo, width = [], 0, 1
    head = min(n, 4 * parts)
    while lo < head:
        out.append((lo, lo + 1))
        lo += 1
    while lo < n:
        hi = min(n, lo + width)
        out.append((lo, hi))
        lo, width = hi, width * 2
    return out or [(0, 0)]


def tally(table, *, require_all: bool = False, threads: int | None = None, backend: str | None = None) -> np.ndarray:
    """Class counts over all F-ideals described by ``table``."""
    mod = backend_module(backend)
    threads = threads or default_threads()
    n = len(table.primes)
    if threads == 1 or n < 64 or mod is _pykernel:
        return mod.tally_range(table, 0, n, True, require_all)
    ranges = _chunks(n, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(lambda r: mod.tally_range(table, r[0], r[1], r[0] == 0, require_all), ranges)
        return np.sum(list(parts), axis=0, dtype=np.int64)
