"""Ideal arithmetic in the cyclotomic components Q, Q(i), Q(zeta_3).

Ring elements are coefficient tuples.  ``(a,)`` is the rational integer a;
``(a, b)`` is a + b*w with w = i (w^2 = -1) or w = zeta_3 (w^2 = -1 - w).
Norm forms:

    Z[i]       N(a + b i)  = a^2 + b^2
    Z[zeta_3]  N(a + b w)  = a^2 - a b + b^2

Every supported component has class number one, so each prime ideal is
principal and ray classes modulo M are classes of generators in
(O/M)^x / <roots of unity>.  Infinite places carry no condition.

Components whose conductor lies outside {1, 2, 3, 4, 6} are still described
by their splitting data (degree-one primes are labelled by the image r of
zeta mod p), but have no generators and no class arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .abelian import euler_phi, factorize
from .errors import CoprimalityError, ParameterError

SUPPORTED_CONDUCTORS = (1, 2, 3, 4, 6)


def field_conductor(n: int) -> int:
    """Q(zeta_n) = Q(zeta_{n/2}) when n = 2 mod 4."""
    return n // 2 if n % 4 == 2 else n


def multiplicative_order(a: int, n: int) -> int:
    if n == 1:
        return 1
    k, x = 1, a % n
    while x != 1:
        x = x * a % n
        k += 1
    return k


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    qs = list(factorize(p - 1))
    g = 2
    while any(pow(g, (p - 1) // q, p) == 1 for q in qs):
        g += 1
    return g


def roots_of_unity_mod(n: int, p: int) -> list[int]:
    """Primitive n-th roots of unity mod p (requires p = 1 mod n)."""
    if n == 1:
        return [1]
    z = pow(primitive_root(p), (p - 1) // n, p)
    return sorted(pow(z, k, p) for k in range(1, n + 1) if math.gcd(k, n) == 1)


@dataclass(frozen=True)
class ComponentField:
    """The Wedderburn component Q(zeta_n) attached to an element of order n."""

    conductor: int

    @property
    def true_conductor(self) -> int:
        return field_conductor(self.conductor)

    @property
    def degree(self) -> int:
        return euler_phi(self.true_conductor)

    @property
    def supported(self) -> bool:
        return self.conductor in SUPPORTED_CONDUCTORS

    @property
    def ring(self) -> str:
        return {1: "Z", 4: "Z[i]", 3: "Z[w]"}.get(self.true_conductor, f"Z[zeta_{self.true_conductor}]")

    @property
    def name(self) -> str:
        return {1: "Q", 4: "Q(i)", 3: "Q(zeta3)"}.get(self.true_conductor, f"Q(zeta{self.true_conductor})")

    def _require(self):
        if not self.supported:
            raise ParameterError(f"no element arithmetic for {self.name}")

    # element arithmetic -------------------------------------------------
    def mul(self, x: tuple, y: tuple) -> tuple:
        n = self.true_conductor
        if n == 1:
            return (x[0] * y[0],)
        (a, b), (c, d) = x, y
        if n == 4:
            return (a * c - b * d, a * d + b * c)
        if n == 3:
            return (a * c - b * d, a * d + b * c - b * d)
        self._require()

    def norm(self, x: tuple) -> int:
        n = self.true_conductor
        if n == 1:
            return abs(x[0])
        a, b = x
        if n == 4:
            return a * a + b * b
        if n == 3:
            return a * a - a * b + b * b
        self._require()

    def conjugate(self, x: tuple) -> tuple:
        n = self.true_conductor
        if n == 1:
            return x
        a, b = x
        return (a, -b) if n == 4 else (a - b, -b)

    def units(self) -> list[tuple]:
        n = self.true_conductor
        if n == 1:
            return [(1,), (-1,)]
        if n == 4:
            return [(1, 0), (0, 1), (-1, 0), (0, -1)]
        if n == 3:
            return [(1, 0), (0, 1), (-1, -1), (-1, 0), (0, -1), (1, 1)]
        self._require()

    def embed(self, x: tuple) -> tuple[float, ...]:
        """Coordinates in R (degree 1) or R^2 = C."""
        n = self.true_conductor
        if n == 1:
            return (float(x[0]),)
        a, b = x
        if n == 4:
            return (float(a), float(b))
        return (a - b / 2.0, b * math.sqrt(3) / 2.0)

    def reduce(self, x: tuple, M: int) -> tuple:
        return tuple(c % M for c in x)

    def format(self, x: tuple) -> str:
        if len(x) == 1:
            return str(x[0])
        sym = "i" if self.true_conductor == 4 else "w"
        a, b = x
        return f"{a}{b:+d}{sym}"


@dataclass(frozen=True)
class CycloPrime:
    """A prime of O_{K(t)} above p, with residue degree f.  Degree-one primes
    carry ``root``, the image of zeta mod the prime; supported fields carry
    an exact generator."""

    field: ComponentField
    p: int
    f: int
    root: int | None = None
    generator: tuple | None = field(default=None, compare=False)

    @property
    def norm(self) -> int:
        return self.p**self.f

    def __str__(self) -> str:
        if self.generator is not None:
            return f"({self.field.format(self.generator)})"
        if self.root is not None:
            return f"({self.p}, z{self.field.true_conductor}-{self.root})"
        return f"({self.p})"


class SplittingType(NamedTuple):
    f: int
    ramified: bool
    count: int


def splitting_type(field: ComponentField, p: int) -> SplittingType:
    n = field.true_conductor
    if n > 1 and n % p == 0:
        # only p | n ramifies; for n in {3, 4} there is a single prime, f = 1
        m = n
        while m % p == 0:
            m //= p
        f = multiplicative_order(p, m)
        return SplittingType(f, True, euler_phi(m) // f)
    f = multiplicative_order(p, n)
    return SplittingType(f, False, field.degree // f)


def _gauss_reduce(field: ComponentField, u: tuple, v: tuple) -> tuple:
    """Shortest nonzero vector of the lattice spanned by u, v under the norm
    form (Lagrange reduction)."""

    def q(x):
        return field.norm(x)

    def b2(x, y):  # twice the bilinear form
        return q((x[0] + y[0], x[1] + y[1])) - q(x) - q(y)

    while True:
        if q(u) > q(v):
            u, v = v, u
        m = round(Fraction(b2(u, v), 2 * q(u)))
        if m == 0:
            return u
        v = (v[0] - m * u[0], v[1] - m * u[1])
        if q(v) >= q(u):
            return u


def prime_generator(field: ComponentField, p: int, r: int) -> tuple:
    """Generator pi = a + b w of the degree-one prime (p, w - r)."""
    if field.true_conductor == 1:
        return (p,)
    field._require()
    # pi in P  <=>  a + b r = 0 mod p ; P has norm p and is principal, so the
    # reduced basis vector has norm exactly p.
    pi = _gauss_reduce(field, (p, 0), ((-r) % p, 1))
    assert field.norm(pi) == p and (pi[0] + pi[1] * r) % p == 0
    return pi


def degree_one_primes(field: ComponentField, p: int) -> list[CycloPrime]:
    n = field.true_conductor
    if n == 1:
        return [CycloPrime(field, p, 1, 1, (p,))]
    if p % n != 1:
        return []
    out = []
    for r in roots_of_unity_mod(n, p):
        # the chosen root is the image of w; for Q(i) w = i is a 4th root,
        # for Q(zeta_3) w = zeta_3 is a cube root
        gen = prime_generator(field, p, r) if field.supported else None
        out.append(CycloPrime(field, p, 1, r, gen))
    return out


_RAMIFIED_GENERATORS = {(4, 2): (1, 1), (3, 3): (1, -1)}


def primes_above(field: ComponentField, p: int) -> list[CycloPrime]:
    """All primes of K(t) above p."""
    st = splitting_type(field, p)
    if st.ramified:
        gen = _RAMIFIED_GENERATORS.get((field.true_conductor, p))
        return [CycloPrime(field, p, st.f, None, gen) for _ in range(st.count)]
    if st.f == 1:
        return degree_one_primes(field, p)
    if field.supported:  # inert in a quadratic field
        return [CycloPrime(field, p, 2, None, (p, 0))]
    return [CycloPrime(field, p, st.f, None, None) for _ in range(st.count)]


# Ray class groups ----------------------------------------------------------


class RayClassGroup:
    """(O/M)^x modulo the image of the roots of unity, as an explicit finite
    abelian group with a discrete-log table and an exact character table."""

    def __init__(self, field: ComponentField, modulus: int):
        if modulus < 1:
            raise ParameterError("modulus must be >= 1")
        field._require()
        self.field = field
        self.modulus = M = modulus
        deg = 1 if field.true_conductor == 1 else 2
        units = field.units()
        reps, index = [], {}
        for x in np.ndindex(*(M,) * deg):
            x = tuple(int(c) for c in x)
            if math.gcd(field.norm(x), M) != 1 or x in index:
                continue
            orbit = {field.reduce(field.mul(u, x), M) for u in units}
            rep = min(orbit)
            k = len(reps)
            reps.append(rep)
            for y in orbit:
                index[y] = k
        self.unit_count = len(index)
        one = index[field.reduce(units[0], M)]
        order_key = sorted(range(len(reps)), key=lambda k: (k != one, reps[k]))
        reps[one] = field.reduce(units[0], M)
        self.reps = [reps[k] for k in order_key]
        remap = {old: new for new, old in enumerate(order_key)}
        self._index = {y: remap[k] for y, k in index.items()}
        self.orbit_sizes = np.bincount(np.array(list(self._index.values()), dtype=np.int64), minlength=len(self.reps))
        h = len(self.reps)
        self.table = np.empty((h, h), dtype=np.int32)
        for a in range(h):
            for b in range(a, h):
                c = self._index[field.reduce(field.mul(self.reps[a], self.reps[b]), M)]
                self.table[a, b] = self.table[b, a] = c
        self._build_structure()

    def __len__(self) -> int:
        return len(self.reps)

    @property
    def order(self) -> int:
        return len(self.reps)

    def class_of_element(self, x: tuple) -> int:
        x = self.field.reduce(x, self.modulus)
        try:
            return self._index[x]
        except KeyError:
            raise CoprimalityError(f"{x} is not a unit mod {self.modulus}") from None

    def label(self, k: int) -> str:
        return self.field.format(self.reps[k])

    def _build_structure(self):
        """Greedy generators with triangular relations; normal-form exponent
        vectors for every class."""
        h = len(self.reps)
        vec = {0: ()}
        gens, rel_orders, relations = [], [], []
        for cand in range(h):
            if cand in vec:
                continue
            m, x = 1, cand
            while x not in vec:
                x = int(self.table[x, cand])
                m += 1
            relations.append(vec[x])
            rel_orders.append(m)
            gens.append(cand)
            new = {}
            for elt, v in vec.items():
                y = elt
                for j in range(m):
                    new[y] = v + (0,) * (len(gens) - 1 - len(v)) + (j,)
                    y = int(self.table[y, cand])
            vec = new
        self.generators = gens
        self.relation_orders = rel_orders
        self.vectors = [tuple(vec[k]) + (0,) * (len(gens) - len(vec[k])) for k in range(h)]
        self.exponent = math.lcm(1, *(self.element_order(k) for k in range(h)))
        # characters: values X_i (in units of 1/N) on the greedy generators
        N = self.exponent
        chars = [()]
        for i, m in enumerate(rel_orders):
            rel = relations[i]
            nxt = []
            for xs in chars:
                s = sum(c * x for c, x in zip(rel, xs))
                for k in range(m):
                    val = Fraction(s + k * N, m)
                    assert val.denominator == 1
                    nxt.append(xs + (int(val) % N,))
            chars = nxt
        V = np.array(self.vectors, dtype=np.int64).reshape(h, len(gens))
        X = np.array(chars, dtype=np.int64).reshape(len(chars), len(gens))
        self.char_table = (X @ V.T) % N  # [chi, class] -> k with chi = exp(2 pi i k / N)

    def element_order(self, k: int) -> int:
        m, x = 1, k
        while x != 0:
            x = int(self.table[x, k])
            m += 1
        return m

    @cached_property
    def invariant_factors(self) -> tuple[int, ...]:
        from .abelian import invariant_factors

        orders = [self.element_order(k) for k in range(len(self))]
        cyc = []
        for p in factorize(len(self)):
            # |{x : p^j x = 0}| = p^{sum_i min(j, e_i)}
            logs = [0]
            j = 1
            while True:
                cnt = sum(1 for o in orders if (p**j) % o == 0)
                logs.append(round(math.log(cnt, p)))
                if logs[-1] == logs[-2]:
                    break
                j += 1
            ranks = [logs[j] - logs[j - 1] for j in range(1, len(logs))]
            for j in range(len(ranks)):
                count = ranks[j] - (ranks[j + 1] if j + 1 < len(ranks) else 0)
                cyc += [p ** (j + 1)] * count
        return invariant_factors(cyc) if cyc else ()

    def ideal_class(self, P: CycloPrime) -> int:
        if math.gcd(P.norm, self.modulus) != 1:
            raise CoprimalityError(f"{P} is not coprime to {self.modulus}")
        if P.generator is None:
            raise ParameterError(f"{P} has no generator")
        return self.class_of_element(P.generator)

    def characters(self) -> list["RayCharacter"]:
        return [RayCharacter(self, i) for i in range(len(self))]


@dataclass(frozen=True)
class RayCharacter:
    rcg: RayClassGroup = field(repr=False, compare=False)
    index: int

    def exponent(self, cls: int) -> Fraction:
        return Fraction(int(self.rcg.char_table[self.index, cls]), self.rcg.exponent)

    def is_trivial(self) -> bool:
        return self.index == 0

    def __call__(self, P: CycloPrime) -> complex:
        """chi(P) as a complex number; 0 when P is not coprime to M."""
        if math.gcd(P.norm, self.rcg.modulus) != 1:
            return 0j
        e = self.exponent(self.rcg.ideal_class(P))
        return complex(np.exp(2j * np.pi * float(e)))


def trivial_ray_class_group(field: ComponentField, modulus: int) -> "TrivialClassGroup":
    return TrivialClassGroup(field, modulus)


class TrivialClassGroup:
    """Stand-in for class-blind components: one class, one character."""

    def __init__(self, field: ComponentField, modulus: int):
        self.field = field
        self.modulus = modulus
        self.reps = [None]
        self.table = np.zeros((1, 1), dtype=np.int32)
        self.char_table = np.zeros((1, 1), dtype=np.int64)
        self.exponent = 1
        self.invariant_factors = ()
        self.orbit_sizes = np.array([1])

    def __len__(self):
        return 1

    order = property(lambda self: 1)

    def label(self, k: int) -> str:
        return "*"

    def ideal_class(self, P: CycloPrime) -> int:
        if math.gcd(P.norm, self.modulus) != 1:
            raise CoprimalityError(f"{P} is not coprime to {self.modulus}")
        return 0

    def characters(self):
        return [RayCharacter(self, 0)]


def ray_class_group(field: ComponentField, modulus: int) -> RayClassGroup:
    return _cached_rcg(field.conductor, modulus)


@lru_cache(maxsize=None)
def _cached_rcg(conductor: int, modulus: int) -> RayClassGroup:
    return RayClassGroup(ComponentField(conductor), modulus)


def ideal_class(P: CycloPrime, rcg: RayClassGroup) -> int:
    return rcg.ideal_class(P)


def ray_characters(rcg: RayClassGroup) -> list[RayCharacter]:
    return rcg.characters()


class ModifiedRayClassGroup:
    """Product over the nontrivial orbit representatives of the component ray
    class groups.  A class is encoded as a mixed-radix integer."""

    def __init__(self, groups: Sequence):
        self.groups = list(groups)
        self.sizes = [len(g) for g in self.groups]
        self.strides = []
        s = 1
        for h in self.sizes:
            self.strides.append(s)
            s *= h
        self.order = s
        self.exponent = math.lcm(1, *(g.exponent for g in self.groups))

    def __len__(self) -> int:
        return self.order

    def encode(self, parts: Sequence[int]) -> int:
        return sum(c * s for c, s in zip(parts, self.strides))

    def decode(self, k: int) -> tuple[int, ...]:
        return tuple((k // s) % h for s, h in zip(self.strides, self.sizes))

    def label(self, k: int) -> str:
        parts = self.decode(k)
        return "|".join(g.label(c) for g, c in zip(self.groups, parts)) if parts else "1"

    def labels(self) -> list[str]:
        return [self.label(k) for k in range(self.order)]

    def mul(self, a: int, b: int) -> int:
        return self.encode(
            int(g.table[x, y]) for g, x, y in zip(self.groups, self.decode(a), self.decode(b))
        )

    def characters(self):
        """Characters as tuples of component character indices (trivial first)."""
        return list(np.ndindex(*self.sizes)) if self.sizes else [()]

    def char_exponent(self, chi: Sequence[int], k: int) -> Fraction:
        """chi(class k) = exp(2 pi i * returned value)."""
        total = Fraction(0)
        for g, c, x in zip(self.groups, chi, self.decode(k)):
            total += Fraction(int(g.char_table[c, x]), g.exponent)
        return total - math.floor(total)

    def cayley_arrays(self):
        """Flattened component tables for the enumeration kernel."""
        offsets, flat = [], []
        off = 0
        for g in self.groups:
            offsets.append(off)
            flat.append(np.asarray(g.table, dtype=np.int32).ravel())
            off += len(g) ** 2
        cay = np.concatenate(flat) if flat else np.zeros(0, dtype=np.int32)
        return (
            np.array(self.sizes, dtype=np.int64),
            np.array(self.strides, dtype=np.int64),
            np.array(offsets, dtype=np.int64),
            cay.astype(np.int32),
        )
