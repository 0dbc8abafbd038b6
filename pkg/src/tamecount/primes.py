"""Prime sieving and integer roots."""

from __future__ import annotations

import numpy as np


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (odd-only sieve)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    half = np.ones(n // 2 + 1, dtype=bool)  # slot i holds 2i + 1
    half[0] = False
    for i in range(1, int(n**0.5) // 2 + 1):
        if half[i]:
            p = 2 * i + 1
            half[p * p // 2 :: p] = False
    odd = 2 * np.flatnonzero(half).astype(np.int64) + 1
    return np.concatenate((np.array([2], dtype=np.int64), odd[odd <= n]))


def iroot(x: int, k: int) -> int:
    """floor(x ** (1/k)) for x >= 0."""
    if x < 2 or k == 1:
        return max(int(x), 0)
    r = int(round(x ** (1.0 / k)))
    while r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r
