# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled class-tally kernel; same contract as ``_pykernel.tally_range``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow as cpow

ctypedef long long i64


cdef struct Ctx:
    i64 X
    i64 n
    i64 nslots
    i64 full
    bint require_all
    const i64* primes
    const i64* start
    const i64* factor
    const i64* oslot
    const i64* ocls
    const i64* omult
    const i64* lowf
    const i64* weights
    const i64* sizes
    const i64* strides
    const i64* coff
    const int* cay
    const i64* pref
    const i64* poff
    i64* counts


cdef inline bint pow_le(i64 r, i64 k, i64 y) noexcept nogil:
    cdef i64 acc = 1
    cdef i64 i
    for i in range(k):
        if acc > y // r:
            return False
        acc *= r
    return True


cdef inline i64 iroot(i64 x, i64 k) noexcept nogil:
    if k == 1 or x < 2:
        return x
    cdef i64 r = <i64>(cpow(<double>x, 1.0 / k) + 0.5)
    while r > 0 and not pow_le(r, k, x):
        r -= 1
    while pow_le(r + 1, k, x):
        r += 1
    return r


cdef inline i64 upper_bound(const i64* a, i64 n, i64 x) noexcept nogil:
    cdef i64 lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline i64 moved(Ctx* c, i64 cur, i64 s, i64 k) noexcept nogil:
    cdef i64 h = c.sizes[s]
    cdef i64 old = (cur // c.strides[s]) % h
    cdef i64 new = c.cay[c.coff[s] + old * h + k]
    return cur + (new - old) * c.strides[s]


cdef void leaves(Ctx* c, i64 v, i64 cur, i64 used, i64 w, i64 j0, i64 jcap) noexcept nogil:
    cdef i64 room = c.X // v
    cdef i64 missing = (c.full & ~used) if c.require_all else 0
    cdef i64 s, J, h, k, d
    cdef const i64* hi_row
    cdef const i64* lo_row
    for s in range(c.nslots):
        if missing != 0 and missing != (<i64>1 << s):
            continue
        J = upper_bound(c.primes, c.n, iroot(room, c.weights[s]))
        if J > jcap:
            J = jcap
        if J <= j0:
            continue
        h = c.sizes[s]
        hi_row = c.pref + c.poff[s] + J * h
        lo_row = c.pref + c.poff[s] + j0 * h
        for k in range(h):
            d = hi_row[k] - lo_row[k]
            if d:
                c.counts[moved(c, cur, s, k)] += w * d


cdef void walk(Ctx* c, i64 v, i64 cur, i64 used, i64 w, i64 j0, i64 jcap) noexcept nogil:
    leaves(c, v, cur, used, w, j0, jcap)
    cdef i64 room = c.X // v
    cdef i64 j, o, f, s
    for j in range(j0, jcap):
        if c.lowf[j] > room or c.lowf[j + 1] > room // c.lowf[j]:
            break
        for o in range(c.start[j], c.start[j + 1]):
            f = c.factor[o]
            if f > room or c.lowf[j + 1] > room // f:
                continue
            s = c.oslot[o]
            walk(c, v * f, moved(c, cur, s, c.ocls[o]), used | (<i64>1 << s), w * c.omult[o], j + 1, c.n)


def tally_range(tab, i64 lo, i64 hi, bint include_root, bint require_all):
    cdef i64 n = len(tab.primes)
    cdef const i64[::1] primes = np.ascontiguousarray(tab.primes, dtype=np.int64)
    cdef const i64[::1] start = np.ascontiguousarray(tab.opt_start, dtype=np.int64)
    cdef const i64[::1] factor = np.ascontiguousarray(tab.opt_factor, dtype=np.int64)
    cdef const i64[::1] oslot = np.ascontiguousarray(tab.opt_slot, dtype=np.int64)
    cdef const i64[::1] ocls = np.ascontiguousarray(tab.opt_cls, dtype=np.int64)
    cdef const i64[::1] omult = np.ascontiguousarray(tab.opt_mult, dtype=np.int64)
    cdef const i64[::1] lowf = np.ascontiguousarray(np.append(tab.lowf, tab.X + 1), dtype=np.int64)
    cdef const i64[::1] weights = np.ascontiguousarray(tab.slot_weight, dtype=np.int64)
    cdef const i64[::1] sizes = np.ascontiguousarray(tab.sizes, dtype=np.int64)
    cdef const i64[::1] strides = np.ascontiguousarray(tab.strides, dtype=np.int64)
    cdef const i64[::1] coff = np.ascontiguousarray(tab.cay_offsets, dtype=np.int64)
    cdef const int[::1] cay = np.ascontiguousarray(tab.cayley, dtype=np.intc)
    cdef const i64[::1] pref = np.ascontiguousarray(tab.prefix, dtype=np.int64)
    cdef const i64[::1] poff = np.ascontiguousarray(tab.prefix_offsets, dtype=np.int64)
    out = np.zeros(tab.order, dtype=np.int64)
    cdef i64[::1] counts = out
    cdef i64 dummy_i = 0
    cdef int dummy_c = 0
    cdef Ctx c
    if tab.X < 1:
        return out
    c.X = tab.X
    c.n = n
    c.nslots = len(tab.sizes)
    if c.nslots > 62:
        raise ValueError("too many components for the bitmask kernel")
    c.full = (<i64>1 << c.nslots) - 1
    c.require_all = require_all
    # empty buffers still need a valid pointer
    c.primes = &primes[0] if primes.shape[0] else &dummy_i
    c.start = &start[0]
    c.factor = &factor[0] if factor.shape[0] else &dummy_i
    c.oslot = &oslot[0] if oslot.shape[0] else &dummy_i
    c.ocls = &ocls[0] if ocls.shape[0] else &dummy_i
    c.omult = &omult[0] if omult.shape[0] else &dummy_i
    c.lowf = &lowf[0]
    c.weights = &weights[0] if weights.shape[0] else &dummy_i
    c.sizes = &sizes[0] if sizes.shape[0] else &dummy_i
    c.strides = &strides[0] if strides.shape[0] else &dummy_i
    c.coff = &coff[0] if coff.shape[0] else &dummy_i
    c.cay = &cay[0] if cay.shape[0] else &dummy_c
    c.pref = &pref[0] if pref.shape[0] else &dummy_i
    c.poff = &poff[0] if poff.shape[0] else &dummy_i
    c.counts = &counts[0]
    if include_root and (not require_all or c.nslots == 0):
        counts[0] += 1
    if hi > n:
        hi = n
    with nogil:
        walk(&c, 1, 0, 0, 1, lo, hi)
    return out
