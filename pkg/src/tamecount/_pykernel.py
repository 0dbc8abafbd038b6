"""Pure-Python class-tally kernel (reference and fallback)."""

from __future__ import annotations

import bisect

import numpy as np


def _iroot(x: int, k: int) -> int:
    if k == 1 or x < 2:
        return x
    r = int(round(x ** (1.0 / k)))
    while r > 0 and r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def tally_range(tab, lo: int, hi: int, include_root: bool, require_all: bool) -> np.ndarray:
    """Class counts of F-ideals of weighted index <= X whose smallest prime
    has index in [lo, hi) (plus the trivial ideal if ``include_root``)."""
    X = tab.X
    primes = tab.primes.tolist()
    start = tab.opt_start.tolist()
    factor = tab.opt_factor.tolist()
    oslot = tab.opt_slot.tolist()
    ocls = tab.opt_cls.tolist()
    omult = tab.opt_mult.tolist()
    lowf = tab.lowf.tolist() + [X + 1]
    weights = tab.slot_weight.tolist()
    sizes = tab.sizes.tolist()
    strides = tab.strides.tolist()
    coff = tab.cay_offsets.tolist()
    cay = tab.cayley
    pref = tab.prefix
    poff = tab.prefix_offsets.tolist()
    nslots = len(sizes)
    full = (1 << nslots) - 1
    counts = np.zeros(tab.order, dtype=np.int64)
    if X < 1:
        return counts
    if include_root and (not require_all or nslots == 0):
        counts[0] += 1

    def comp(cur, s):
        return (cur // strides[s]) % sizes[s]

    def moved(cur, s, c):
        h = sizes[s]
        old = comp(cur, s)
        new = int(cay[coff[s] + old * h + c])
        return cur + (new - old) * strides[s]

    def leaves(v, cur, used, w, j0, jcap):
        room = X // v
        missing = full & ~used if require_all else 0
        for s in range(nslots):
            if missing and missing != (1 << s):
                continue
            J = min(bisect.bisect_right(primes, _iroot(room, weights[s])), jcap)
            if J <= j0:
                continue
            h = sizes[s]
            base = poff[s]
            hi_row = pref[base + J * h : base + (J + 1) * h]
            lo_row = pref[base + j0 * h : base + (j0 + 1) * h]
            for c in np.flatnonzero(hi_row != lo_row).tolist():
                counts[moved(cur, s, c)] += w * int(hi_row[c] - lo_row[c])

    def walk(v, cur, used, w, j0, jcap):
        leaves(v, cur, used, w, j0, jcap)
        room = X // v
        for j in range(j0, jcap):
            # a child must leave room for one more prime beyond it
            if lowf[j] > room or lowf[j + 1] > room // lowf[j]:
                break
            for o in range(start[j], start[j + 1]):
                f = factor[o]
                if f > room or lowf[j + 1] > room // f:
                    continue
                s = oslot[o]
                walk(v * f, moved(cur, s, ocls[o]), used | (1 << s), w * omult[o], j + 1, len(primes))

    walk(1, 0, 0, 1, lo, min(hi, len(primes)))
    return counts
