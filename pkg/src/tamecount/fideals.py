"""Weights, the ideal set F of squarefree degree-one ideals, weighted and
module indices, the local counting function nu, and streaming enumeration.

An ideal of Lambda is stored per nontrivial orbit representative t as a
tuple of prime ideals of K(t) = Q(zeta_|t|).  Members of F use at most one
prime above each rational prime p, every such prime has degree one, and p
does not divide |t|.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence

import numpy as np

from .abelian import Element, FiniteAbelianGroup, OrbitTable, euler_phi, factorize, orbit_table
from .cyclo import (
    ComponentField,
    CycloPrime,
    ModifiedRayClassGroup,
    TrivialClassGroup,
    degree_one_primes,
    ray_class_group,
)
from .errors import InvalidWeightError, ParameterError
from .primes import iroot, primes_upto

# Weights ---------------------------------------------------------------------


@dataclass(frozen=True)
class Weight:
    """W: T -> Z_{>=0} with W(1) = 0 and W(t) >= 1 on T'."""

    orbits: OrbitTable = field(repr=False, compare=False)
    values: Mapping[Element, int]
    name: str = "custom"

    def __post_init__(self):
        ident = self.orbits.group.identity
        for t in self.orbits.reps:
            w = self.values.get(t)
            if w is None:
                raise InvalidWeightError(f"no weight given for {t}")
            if int(w) != w or w < 0:
                raise InvalidWeightError(f"weight at {t} must be a nonnegative integer, got {w}")
            if t == ident and w != 0:
                raise InvalidWeightError("the identity must have weight 0")
            if t != ident and w == 0:
                raise InvalidWeightError(f"weight vanishes at nontrivial {t}")

    def __call__(self, t: Element) -> int:
        return int(self.values[tuple(t)])

    @property
    def alpha(self) -> int:
        return min((self(t) for t in self.orbits.nontrivial), default=1)

    @property
    def is_constant(self) -> bool:
        return len({self(t) for t in self.orbits.nontrivial}) <= 1

    def multiplicity(self, n: int) -> int:
        """d_n for the trivial character: #{t in T' : W(t) = n}."""
        return sum(1 for t in self.orbits.nontrivial if self(t) == n)

    @property
    def max_value(self) -> int:
        return max((self(t) for t in self.orbits.nontrivial), default=0)

    def as_list(self) -> list[int]:
        return [self(t) for t in self.orbits.nontrivial]


def weight_disc(orbits: OrbitTable) -> Weight:
    """W(t) = (|t| - 1) |G| / |t|, the tame discriminant exponent."""
    G = orbits.group.order
    return Weight(orbits, {t: (orbits.order(t) - 1) * G // orbits.order(t) for t in orbits.reps}, "disc")


def weight_ram(orbits: OrbitTable) -> Weight:
    ident = orbits.group.identity
    return Weight(orbits, {t: 0 if t == ident else 1 for t in orbits.reps}, "ram")


def weight_custom(orbits: OrbitTable, values: Sequence[int] | Mapping[Element, int]) -> Weight:
    """Values are listed in ``orbits.nontrivial`` order, or given as a map."""
    ident = orbits.group.identity
    if isinstance(values, Mapping):
        vals = {tuple(k): int(v) for k, v in values.items()}
        vals.setdefault(ident, 0)
    else:
        values = list(values)
        if len(values) != len(orbits.nontrivial):
            raise InvalidWeightError(
                f"expected {len(orbits.nontrivial)} weights (one per nontrivial orbit), got {len(values)}"
            )
        vals = {ident: 0, **{t: int(w) for t, w in zip(orbits.nontrivial, values)}}
    return Weight(orbits, vals, "custom")


def parse_weight(orbits: OrbitTable, value) -> Weight:
    if isinstance(value, Weight):
        return value
    if isinstance(value, str):
        key = value.strip().lower()
        if key == "disc":
            return weight_disc(orbits)
        if key == "ram":
            return weight_ram(orbits)
        try:
            value = [int(x) for x in key.replace(",", " ").split()]
        except ValueError:
            raise InvalidWeightError(f"unknown weight {value!r}") from None
    return weight_custom(orbits, value)


def default_modulus(group: FiniteAbelianGroup) -> int:
    return math.lcm(group.order, group.exponent**2)


# The algebra Lambda with its component data --------------------------------


@dataclass(frozen=True)
class Component:
    slot: int
    rep: Element
    order: int
    field: ComponentField
    weight: int

    @property
    def degree(self) -> int:
        return euler_phi(self.order)


class LambdaAlgebra:
    """Everything the counting layer needs about (G, W, M): components,
    the modified ray class group and per-prime option data."""

    def __init__(self, group: FiniteAbelianGroup, weight="disc", modulus: int | None = None, *, strict_modulus=False):
        self.group = group
        self.orbits = orbit_table(group)
        self.weight = parse_weight(self.orbits, weight)
        self.modulus = default_modulus(group) if modulus is None else int(modulus)
        if self.modulus < 1:
            raise ParameterError("modulus must be a positive integer")
        if not self.modulus_ok:
            msg = f"modulus {self.modulus} is not divisible by |G| = {group.order} and exp(G)^2 = {group.exponent ** 2}"
            if strict_modulus:
                raise ParameterError(msg)
            warnings.warn(msg, stacklevel=2)
        self.components = [
            Component(i, t, self.orbits.order(t), ComponentField(self.orbits.order(t)), self.weight(t))
            for i, t in enumerate(self.orbits.nontrivial)
        ]
        self.class_blind = any(not c.field.supported for c in self.components)
        if self.class_blind:
            groups = [TrivialClassGroup(c.field, self.modulus) for c in self.components]
        else:
            groups = [ray_class_group(c.field, self.modulus) for c in self.components]
        self.rcg = ModifiedRayClassGroup(groups)
        self._modulus_primes = set(factorize(self.modulus))
        self._quad_cache: dict[tuple[int, int], list[tuple[CycloPrime, int]]] = {}

    @property
    def modulus_ok(self) -> bool:
        M = self.modulus
        return M % self.group.order == 0 and M % self.group.exponent**2 == 0

    @property
    def alpha(self) -> int:
        return self.weight.alpha

    @property
    def nslots(self) -> int:
        return len(self.components)

    def slot_of(self, t: Element) -> int:
        t = tuple(t)
        for c in self.components:
            if c.rep == t:
                return c.slot
        raise ParameterError(f"{t} is not a nontrivial orbit representative")

    def eligible(self, comp: Component, p: int) -> bool:
        """p can contribute a prime of F in this component."""
        return p not in self._modulus_primes and comp.order % p != 0 and p % comp.order == 1 % comp.order

    def component_options(self, comp: Component, p: int) -> list[tuple[CycloPrime, int]]:
        """Degree-one primes of K(t) over p with their component class."""
        if not self.eligible(comp, p):
            return []
        key = (comp.slot, p)
        hit = self._quad_cache.get(key)
        if hit is not None:
            return hit
        grp = self.rcg.groups[comp.slot]
        out = [(P, grp.ideal_class(P)) for P in degree_one_primes(comp.field, p)]
        if comp.field.true_conductor > 1:
            self._quad_cache[key] = out
        return out

    def options(self, p: int) -> list[tuple[int, CycloPrime, int]]:
        """All (slot, prime, component class) choices above p."""
        return [(c.slot, P, k) for c in self.components for P, k in self.component_options(c, p)]

    def lift_class(self, slot: int, k: int) -> int:
        """Encode a component class as an element of Cl'."""
        return k * self.rcg.strides[slot]

    # vectorised option table for the counting kernel -----------------------
    def option_table(self, X: int, omit: Sequence[int] = ()) -> "OptionTable":
        return build_option_table(self, X, omit)


# Ideals of Lambda -----------------------------------------------------------


@dataclass(frozen=True)
class LambdaIdeal:
    """Per-component prime factorisations; missing components are trivial."""

    orbits: OrbitTable = field(repr=False, compare=False)
    parts: tuple[tuple[Element, tuple[CycloPrime, ...]], ...] = ()

    @classmethod
    def from_mapping(cls, orbits: OrbitTable, mapping: Mapping[Element, Sequence[CycloPrime]]) -> "LambdaIdeal":
        ident = orbits.group.identity
        parts = []
        for t in orbits.reps:
            primes = tuple(mapping.get(t, ()))
            if t == ident and primes:
                raise ParameterError("the trivial component carries no ideal")
            if primes:
                parts.append((t, primes))
        return cls(orbits, tuple(parts))

    def component(self, t: Element) -> tuple[CycloPrime, ...]:
        for s, primes in self.parts:
            if s == tuple(t):
                return primes
        return ()

    def primes(self) -> Iterator[tuple[Element, CycloPrime]]:
        for t, ps in self.parts:
            for P in ps:
                yield t, P

    def is_trivial(self) -> bool:
        return not self.parts

    def __str__(self) -> str:
        if not self.parts:
            return "1"
        return " * ".join(f"[{t}]" + "".join(str(P) for P in ps) for t, ps in self.parts)


def is_in_F(a: LambdaIdeal) -> bool:
    seen = set()
    for t, P in a.primes():
        if P.f != 1 or P.p in seen or a.orbits.order(t) % P.p == 0:
            return False
        seen.add(P.p)
    return True


def module_index(a: LambdaIdeal) -> int:
    return math.prod(P.norm for _, P in a.primes())


def weighted_index(a: LambdaIdeal, W: Weight) -> int:
    return math.prod(P.norm ** W(t) for t, P in a.primes())


def nu(b: int, W: Weight, orbits: OrbitTable | None = None) -> int:
    """Number of ideals in F with weighted index b (no coprimality to M)."""
    if b < 1:
        raise ParameterError("nu is defined on positive integers")
    orbits = orbits or W.orbits
    total = 1
    for p, e in factorize(b).items():
        local = sum(
            euler_phi(orbits.order(t))
            for t in orbits.nontrivial
            if W(t) == e and orbits.order(t) % p != 0 and p % orbits.order(t) == 1 % orbits.order(t)
        )
        if local == 0:
            return 0
        total *= local
    return total


def enumerate_F(X: int, lam: LambdaAlgebra, omit: Sequence[Element] = ()) -> Iterator[tuple[LambdaIdeal, int]]:
    """Stream (ideal, weighted index) for every member of F coprime to M with
    weighted index <= X, depth first over increasing rational primes."""
    if X < 1:
        return
    skip = {lam.slot_of(t) for t in omit}
    a = lam.alpha
    primes = [int(p) for p in primes_upto(iroot(X, a))]
    table = [[o for o in lam.options(p) if o[0] not in skip] for p in primes]
    reps = [c.rep for c in lam.components]
    weights = [c.weight for c in lam.components]

    def build(chosen):
        mapping: dict[Element, list[CycloPrime]] = {}
        for slot, P in chosen:
            mapping.setdefault(reps[slot], []).append(P)
        return LambdaIdeal.from_mapping(lam.orbits, mapping)

    def walk(start, v, chosen):
        for j in range(start, len(primes)):
            p = primes[j]
            if v * p**a > X:
                break
            for slot, P, _ in table[j]:
                nv = v * p ** weights[slot]
                if nv <= X:
                    chosen.append((slot, P))
                    yield build(chosen), nv
                    yield from walk(j + 1, nv, chosen)
                    chosen.pop()

    yield LambdaIdeal(lam.orbits), 1
    yield from walk(0, 1, [])


def ideal_class(a: LambdaIdeal, lam: LambdaAlgebra) -> int:
    """The class of a in Cl' (coprime to M)."""
    k = 0
    for t, P in a.primes():
        slot = lam.slot_of(t)
        grp = lam.rcg.groups[slot]
        parts = list(lam.rcg.decode(k))
        parts[slot] = int(grp.table[parts[slot], grp.ideal_class(P)])
        k = lam.rcg.encode(parts)
    return k


# Option table ---------------------------------------------------------------


@dataclass
class OptionTable:
    """Flat per-prime option arrays consumed by the counting kernel.

    Options of prime index j live in ``opt_start[j]:opt_start[j+1]``;
    options with identical (slot, class) are merged into one with
    multiplicity ``opt_mult``.  ``prefix[s]`` holds running option counts
    of slot s by component class, for closed-form counting of the last
    prime of an ideal.
    """

    X: int
    primes: np.ndarray
    opt_start: np.ndarray
    opt_factor: np.ndarray
    opt_slot: np.ndarray
    opt_cls: np.ndarray
    opt_mult: np.ndarray
    lowf: np.ndarray
    slot_weight: np.ndarray
    prefix: np.ndarray
    prefix_offsets: np.ndarray
    sizes: np.ndarray
    strides: np.ndarray
    cay_offsets: np.ndarray
    cayley: np.ndarray
    order: int

    @property
    def nslots(self) -> int:
        return len(self.sizes)


def _capped_power(p: np.ndarray, e: int, cap: int) -> np.ndarray:
    """p**e elementwise, saturated at cap (int64 safe)."""
    out = np.ones_like(p)
    for _ in range(e):
        big = out > cap // np.maximum(p, 1)
        out = np.where(big, cap, np.minimum(out * np.where(big, 1, p), cap))
    return out


def build_option_table(lam: LambdaAlgebra, X: int, omit: Sequence[int] = ()) -> OptionTable:
    X = int(X)
    cap = X + 1
    a = lam.alpha
    primes = primes_upto(iroot(X, a)) if X >= 1 else np.zeros(0, dtype=np.int64)
    primes = primes[~np.isin(primes, list(lam._modulus_primes))]
    n = len(primes)
    cols = {"idx": [], "slot": [], "cls": [], "mult": []}
    for comp in lam.components:
        if comp.slot in omit:
            continue
        q = comp.order
        mask = (primes % q == 1 % q) & (primes % q != 0)
        mask &= _capped_power(primes, comp.weight, cap) <= X
        idx = np.flatnonzero(mask)
        grp = lam.rcg.groups[comp.slot]
        if len(grp) == 1:
            cls = np.zeros(len(idx), dtype=np.int64)
            mult = np.full(len(idx), comp.field.degree, dtype=np.int64)
        elif comp.field.true_conductor == 1:
            M = lam.modulus
            lookup = np.array([grp._index.get((r,), -1) for r in range(M)], dtype=np.int64)
            cls = lookup[primes[idx] % M]
            mult = np.ones(len(idx), dtype=np.int64)
        else:
            ii, cc = [], []
            for j in idx:
                for _, k in lam.component_options(comp, int(primes[j])):
                    ii.append(j)
                    cc.append(k)
            idx = np.array(ii, dtype=np.int64)
            cls = np.array(cc, dtype=np.int64)
            mult = np.ones(len(idx), dtype=np.int64)
        cols["idx"].append(idx)
        cols["slot"].append(np.full(len(idx), comp.slot, dtype=np.int64))
        cols["cls"].append(cls)
        cols["mult"].append(mult)
    if cols["idx"]:
        idx, slot, cls, mult = (np.concatenate(cols[k]).astype(np.int64) for k in ("idx", "slot", "cls", "mult"))
    else:
        idx = slot = cls = mult = np.zeros(0, dtype=np.int64)
    # merge duplicate (prime, slot, class) options
    order = np.lexsort((cls, slot, idx))
    idx, slot, cls, mult = idx[order], slot[order], cls[order], mult[order]
    if len(idx):
        new = np.ones(len(idx), dtype=bool)
        new[1:] = (idx[1:] != idx[:-1]) | (slot[1:] != slot[:-1]) | (cls[1:] != cls[:-1])
        starts = np.flatnonzero(new)
        mult = np.add.reduceat(mult, starts)
        idx, slot, cls = idx[starts], slot[starts], cls[starts]
    opt_start = np.searchsorted(idx, np.arange(n + 1)).astype(np.int64)
    weights = np.array([c.weight for c in lam.components], dtype=np.int64)
    factor = np.empty(len(idx), dtype=np.int64)
    for s, w in enumerate(weights):
        sel = slot == s
        factor[sel] = _capped_power(primes[idx[sel]], int(w), cap)
    sizes, strides, cay_offsets, cayley = lam.rcg.cayley_arrays()
    # prefix[s][k, c] = sum of multiplicities of slot-s options with class c over primes[:k]
    blocks, offs, off = [], [], 0
    for s, h in enumerate(sizes):
        h = int(h)
        grid = np.zeros((n + 1, h), dtype=np.int64)
        sel = slot == s
        np.add.at(grid, (idx[sel] + 1, cls[sel]), mult[sel])
        np.cumsum(grid, axis=0, out=grid)
        blocks.append(grid.ravel())
        offs.append(off)
        off += grid.size
    prefix = np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.int64)
    return OptionTable(
        X=X,
        primes=primes.astype(np.int64),
        opt_start=opt_start,
        opt_factor=factor,
        opt_slot=slot.astype(np.int64),
        opt_cls=cls.astype(np.int64),
        opt_mult=mult.astype(np.int64),
        lowf=_capped_power(primes.astype(np.int64), a, cap),
        slot_weight=weights,
        prefix=prefix.astype(np.int64),
        prefix_offsets=np.array(offs, dtype=np.int64),
        sizes=sizes,
        strides=strides,
        cay_offsets=cay_offsets,
        cayley=cayley,
        order=lam.rcg.order,
    )
