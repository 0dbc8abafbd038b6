"""Finite abelian groups, their duals, the Stickelberger pairing and the
rational orbit decomposition of G(-1).

Group elements are exponent vectors ``(e_1, ..., e_k)`` with
``0 <= e_i < d_i`` for the invariant factors ``d_1 | ... | d_k``; the group
law is written additively.  A character is identified by an exponent vector
``c`` of the same shape and acts by

    chi_c(g) = exp(2 pi i * sum_i c_i g_i / d_i),

so every character value is an exact rational modulo 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import InvalidGroupError

Element = tuple  # exponent vector


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorisation; only used on small integers."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n: int) -> int:
    result = n
    for p in factorize(n):
        result = result // p * (p - 1)
    return result


def invariant_factors(factors: Sequence[int]) -> tuple[int, ...]:
    """Normalise an arbitrary list of cyclic orders to a divisibility chain."""
    by_prime: dict[int, list[int]] = {}
    for d in factors:
        for p, e in factorize(d).items():
            by_prime.setdefault(p, []).append(p**e)
    length = max((len(v) for v in by_prime.values()), default=0)
    chain = [1] * length
    for powers in by_prime.values():
        powers.sort(reverse=True)
        for i, q in enumerate(powers):
            chain[length - 1 - i] *= q
    return tuple(chain)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1]

    @property
    def identity(self) -> Element:
        return (0,) * self.rank

    def elements(self) -> Iterator[Element]:
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def add(self, g: Element, h: Element) -> Element:
        return tuple((a + b) % d for a, b, d in zip(g, h, self.invariant_factors))

    def scale(self, g: Element, u: int) -> Element:
        """The power g^u (additively u*g)."""
        return tuple((a * u) % d for a, d in zip(g, self.invariant_factors))

    def element_order(self, g: Element) -> int:
        return math.lcm(*(d // math.gcd(a, d) for a, d in zip(g, self.invariant_factors)))

    def characters(self) -> list["Character"]:
        return [Character(self, c) for c in self.elements()]

    def trivial_character(self) -> "Character":
        return Character(self, self.identity)

    def __str__(self) -> str:
        return " x ".join(f"C{d}" for d in self.invariant_factors)


def make_group(factors: Iterable[int]) -> FiniteAbelianGroup:
    """Build G from cyclic factor orders, normalising to invariant factors."""
    factors = [int(d) for d in factors]
    if not factors:
        raise InvalidGroupError("empty factor list")
    if any(d < 2 for d in factors):
        raise InvalidGroupError(f"cyclic factors must be >= 2, got {factors}")
    return FiniteAbelianGroup(invariant_factors(factors))


def abelian_groups_up_to(n: int) -> list[FiniteAbelianGroup]:
    """Every abelian group of order 2..n, one per isomorphism class."""
    out = []
    for order in range(2, n + 1):
        seen = set()

        def chains(m, smallest):
            if m == 1:
                yield ()
                return
            for d in range(smallest, m + 1):
                if m % d == 0:
                    for rest in chains(m // d, d):
                        yield (d,) + rest

        for ch in chains(order, 2):
            inv = invariant_factors(ch)
            if inv not in seen:
                seen.add(inv)
                out.append(FiniteAbelianGroup(inv))
    return out


@dataclass(frozen=True)
class Character:
    group: FiniteAbelianGroup = field(repr=False)
    exponents: Element

    def value(self, g: Element) -> Fraction:
        """The exponent e in [0, 1) with chi(g) = exp(2 pi i e)."""
        return stickelberger_pairing(self, g)

    def __mul__(self, other: "Character") -> "Character":
        return Character(self.group, self.group.add(self.exponents, other.exponents))

    def is_trivial(self) -> bool:
        return not any(self.exponents)


def stickelberger_pairing(chi: Character, g: Element) -> Fraction:
    G = chi.group
    total = sum(Fraction(c * a, d) for c, a, d in zip(chi.exponents, g, G.invariant_factors))
    return total - math.floor(total)


class GroupRingElement:
    """A finitely supported coefficient map over the elements of G or of its
    dual.  Keys are exponent vectors; zero coefficients are dropped."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Element, int | Fraction] | None = None):
        self.coeffs = {tuple(k): v for k, v in (coeffs or {}).items() if v != 0}

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return GroupRingElement(out)

    def __rmul__(self, scalar) -> "GroupRingElement":
        return GroupRingElement({k: scalar * v for k, v in self.coeffs.items()})

    def __getitem__(self, key: Element):
        return self.coeffs.get(tuple(key), 0)

    def is_integral(self) -> bool:
        return all(Fraction(v).denominator == 1 for v in self.coeffs.values())

    def __repr__(self) -> str:
        terms = " + ".join(f"{v}*{k}" for k, v in sorted(self.coeffs.items()))
        return f"GroupRingElement({terms or '0'})"


def stickelberger_theta(G: FiniteAbelianGroup, alpha: GroupRingElement) -> GroupRingElement:
    """Theta(alpha) = sum_g <alpha, g> g with the pairing extended linearly."""
    out = {}
    for g in G.elements():
        out[g] = sum(
            (a * stickelberger_pairing(Character(G, chi), g) for chi, a in alpha.coeffs.items()),
            Fraction(0),
        )
    return GroupRingElement(out)


def determinant(G: FiniteAbelianGroup, alpha: GroupRingElement) -> Character:
    """det(sum a_chi chi) = prod chi^{a_chi}, returned as a character."""
    acc = [0] * G.rank
    for chi, a in alpha.coeffs.items():
        for i, c in enumerate(chi):
            acc[i] += int(a) * c
    return Character(G, tuple(x % d for x, d in zip(acc, G.invariant_factors)))


def in_A_hatG(G: FiniteAbelianGroup, alpha: GroupRingElement) -> bool:
    return determinant(G, alpha).is_trivial()


# Vectorised forms for exhaustive sweeps over Z[G^] ---------------------------


def pairing_matrix(G: FiniteAbelianGroup) -> np.ndarray:
    """Integer matrix P with P[chi, g] = exp(G) * <chi, g>; rows and columns
    follow ``G.elements()`` order."""
    e = G.exponent
    elems = list(G.elements())
    P = np.zeros((len(elems), len(elems)), dtype=np.int64)
    for i, chi in enumerate(elems):
        for j, g in enumerate(elems):
            P[i, j] = (stickelberger_pairing(Character(G, chi), g) * e).numerator
    return P


def theta_integral_mask(G: FiniteAbelianGroup, alphas: np.ndarray) -> np.ndarray:
    """For each row of integer coefficients (indexed like ``G.elements()``),
    whether Theta of that row has integral coefficients."""
    P = pairing_matrix(G)
    return np.all((alphas.astype(np.int64) @ P) % G.exponent == 0, axis=1)


def det_trivial_mask(G: FiniteAbelianGroup, alphas: np.ndarray) -> np.ndarray:
    chars = np.array(list(G.elements()), dtype=np.int64).reshape(G.order, G.rank)
    d = np.array(G.invariant_factors, dtype=np.int64)
    return np.all((alphas.astype(np.int64) @ chars) % d == 0, axis=1)


# Orbits of G(-1) under Gal(Q(zeta)/Q) -------------------------------------


@dataclass(frozen=True)
class OrbitTable:
    """Orbit representatives T of G under g -> g^u, u a unit mod exp(G).

    Over Q the twist by the inverse cyclotomic character does not change the
    orbits, and the field cut out by the stabiliser of t is Q(zeta_|t|).
    """

    group: FiniteAbelianGroup
    reps: tuple[Element, ...]
    orbits: Mapping[Element, tuple[Element, ...]]

    def order(self, t: Element) -> int:
        return self.group.element_order(t)

    def conductor(self, t: Element) -> int:
        return self.order(t)

    def degree(self, t: Element) -> int:
        return euler_phi(self.order(t))

    @cached_property
    def nontrivial(self) -> tuple[Element, ...]:
        return tuple(t for t in self.reps if any(t))

    def rep_of(self, g: Element) -> Element:
        for t, orb in self.orbits.items():
            if tuple(g) in orb:
                return t
        raise KeyError(g)


def orbit_table(G: FiniteAbelianGroup) -> OrbitTable:
    seen: set[Element] = set()
    orbits = {}
    for g in G.elements():
        if g in seen:
            continue
        n = G.element_order(g)
        orb = sorted({G.scale(g, u) for u in range(1, max(n, 2)) if math.gcd(u, n) == 1} | {g})
        seen.update(orb)
        orbits[orb[0]] = tuple(orb)
    reps = tuple(sorted(orbits, key=lambda t: (G.element_order(t), t)))
    return OrbitTable(G, reps, {t: orbits[t] for t in reps})
