"""Class-resolved counts kappa(c, X; M), the component-omitting and
all-components variants, and assembly of per-fiber counts N."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import numpy as np

from . import kernel
from .abelian import Element
from .errors import InvalidPartitionError, ParameterError
from .fideals import LambdaAlgebra


@dataclass(frozen=True)
class ClassTally:
    modulus: int
    weight: tuple[int, ...]
    X: int
    counts: np.ndarray = field(repr=False)
    labels: tuple[str, ...] = field(repr=False)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __getitem__(self, label: str | int) -> int:
        if isinstance(label, str):
            return int(self.counts[self.labels.index(label)])
        return int(self.counts[label])

    def as_dict(self) -> dict[str, int]:
        return {lab: int(c) for lab, c in zip(self.labels, self.counts)}

    def __sub__(self, other: "ClassTally") -> "ClassTally":
        return ClassTally(self.modulus, self.weight, self.X, self.counts - other.counts, self.labels)

    def __add__(self, other: "ClassTally") -> "ClassTally":
        return ClassTally(self.modulus, self.weight, self.X, self.counts + other.counts, self.labels)


def _tally(lam: LambdaAlgebra, X: int, omit=(), require_all=False, threads=None, backend=None) -> ClassTally:
    X = int(X)
    if X < 1:
        counts = np.zeros(lam.rcg.order, dtype=np.int64)
    else:
        counts = kernel.tally(lam.option_table(X, omit), require_all=require_all, threads=threads, backend=backend)
    return ClassTally(lam.modulus, tuple(lam.weight.as_list()), X, counts, tuple(lam.rcg.labels()))


def kappa_all(lam: LambdaAlgebra, X: int, **kw) -> ClassTally:
    """Counts of F-ideals coprime to M with weighted index <= X, by class."""
    return _tally(lam, X, **kw)


def kappa_omit(lam: LambdaAlgebra, t: Element, X: int, **kw) -> ClassTally:
    """As ``kappa_all`` but only ideals whose t-component is trivial."""
    if tuple(t) not in lam.orbits.nontrivial:
        raise ParameterError(f"{t} is not in T' = {lam.orbits.nontrivial}")
    return _tally(lam, X, omit=(lam.slot_of(t),), **kw)


def kappa_omit_set(lam: LambdaAlgebra, ts: Sequence[Element], X: int, **kw) -> ClassTally:
    return _tally(lam, X, omit=tuple(lam.slot_of(t) for t in ts), **kw)


def kappa_full(lam: LambdaAlgebra, X: int, **kw) -> ClassTally:
    """Ideals with every component nontrivial, counted directly."""
    return _tally(lam, X, require_all=True, **kw)


def kappa_full_by_subtraction(lam: LambdaAlgebra, X: int, **kw) -> ClassTally:
    """kappa_all minus the sum of the single-component omissions.

    Agrees with ``kappa_full`` only when |T'| = 1: with more components an
    ideal missing several components is subtracted once per missing one.
    """
    out = kappa_all(lam, X, **kw)
    for t in lam.orbits.nontrivial:
        out = out - kappa_omit(lam, t, X, **kw)
    return out


def kappa_full_by_inclusion_exclusion(lam: LambdaAlgebra, X: int, **kw) -> ClassTally:
    """sum over S subset of T' of (-1)^|S| times the count omitting S."""
    ts = lam.orbits.nontrivial
    out = None
    for r in range(len(ts) + 1):
        for S in itertools.combinations(ts, r):
            term = kappa_omit_set(lam, S, X, **kw)
            if r % 2:
                term = ClassTally(term.modulus, term.weight, term.X, -term.counts, term.labels)
            out = term if out is None else out + term
    return out


@dataclass(frozen=True)
class FiberPartition:
    """Labelled fibers of Cl' (by class label) and the kernel orders."""

    fibers: Mapping[Hashable, Sequence[str]]
    k_psi: int = 1
    k_f: int = 1
    equal_size: bool = False

    def __post_init__(self):
        if self.k_psi < 1 or self.k_f < 1:
            raise InvalidPartitionError("kernel orders must be positive integers")
        if self.equal_size and any(len(v) != self.k_f for v in self.fibers.values()):
            raise InvalidPartitionError(f"fibers are not all of size k_f = {self.k_f}")

    @classmethod
    def trivial(cls, labels: Sequence[str], k_psi: int = 1, k_f: int = 1) -> "FiberPartition":
        return cls({"all": tuple(labels)}, k_psi, k_f)

    @classmethod
    def singletons(cls, labels: Sequence[str], k_psi: int = 1) -> "FiberPartition":
        return cls({lab: (lab,) for lab in labels}, k_psi, 1, True)


@dataclass(frozen=True)
class AssembledCounts:
    per_fiber: dict
    constant_shape: dict | None  # k_psi * k_f * kappa per fiber, for constant W


def assemble_N(tally: ClassTally, fibers: FiberPartition, *, constant_weight: bool = False) -> AssembledCounts:
    """N(fiber) = k_psi * sum of kappa over the fiber's classes."""
    seen: list[str] = [lab for members in fibers.fibers.values() for lab in members]
    if len(seen) != len(set(seen)):
        raise InvalidPartitionError("fibers overlap")
    if set(seen) != set(tally.labels):
        missing = set(tally.labels) - set(seen)
        extra = set(seen) - set(tally.labels)
        raise InvalidPartitionError(f"partition mismatch: missing {sorted(missing)[:5]}, unknown {sorted(extra)[:5]}")
    lookup = tally.as_dict()
    per = {name: fibers.k_psi * sum(lookup[lab] for lab in members) for name, members in fibers.fibers.items()}
    shape = None
    if constant_weight:
        # under constant W every class has the same asymptotic count
        shape = {name: fibers.k_psi * fibers.k_f * lookup[members[0]] for name, members in fibers.fibers.items() if members}
    return AssembledCounts(per, shape)
