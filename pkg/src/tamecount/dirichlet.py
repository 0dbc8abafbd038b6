"""Euler products D(s, chi) and L(s, chi), the correction psi = D / L, pole
orders and leading coefficients, Tauberian predictions and the
equidistribution verdict.

Characters of Cl' are tuples of component character indices (index 0 is the
trivial character of that component).  Primes dividing M contribute the
factor 1 to every product.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .cyclo import degree_one_primes, primes_above, splitting_type
from .errors import CoprimalityError, DivergenceError, ParameterError, SingularFactorError
from .fideals import LambdaAlgebra
from .lvalues import ComponentL
from .primes import primes_upto

Char = tuple  # component character indices


def trivial_char(lam: LambdaAlgebra) -> Char:
    return (0,) * lam.nslots


def _phase(lam: LambdaAlgebra, slot: int, chi_s: int, cls) -> np.ndarray | complex:
    grp = lam.rcg.groups[slot]
    k = np.asarray(grp.char_table[chi_s, cls], dtype=float)
    return np.exp(2j * np.pi * k / grp.exponent)


def char_value(lam: LambdaAlgebra, chi: Char, k: int) -> complex:
    """chi evaluated on the class with index k of Cl'."""
    return complex(np.exp(2j * np.pi * float(lam.rcg.char_exponent(chi, k))))


# single-prime factors ---------------------------------------------------------


def _local_primes(lam: LambdaAlgebra, p: int):
    """(slot, f, class) for every prime of Lambda above p (p not dividing M)."""
    out = []
    for comp in lam.components:
        if comp.order % p == 0:
            continue
        grp = lam.rcg.groups[comp.slot]
        if comp.field.supported:
            for P in primes_above(comp.field, p):
                out.append((comp.slot, P.f, grp.ideal_class(P)))
        else:
            st = splitting_type(comp.field, p)
            out += [(comp.slot, st.f, 0)] * st.count
    return out


def euler_factor_D(lam: LambdaAlgebra, p: int, s: complex, chi: Char) -> complex:
    """1 + sum over degree-one primes P | p of chi(P) p^(-W(t) s)."""
    if lam.modulus % p == 0:
        return 1 + 0j
    total = 1 + 0j
    for slot, f, cls in _local_primes(lam, p):
        if f == 1:
            w = lam.components[slot].weight
            total += complex(_phase(lam, slot, chi[slot], cls)) * p ** (-w * s)
    return total


def euler_factor_L(lam: LambdaAlgebra, p: int, s: complex, chi: Char) -> complex:
    if lam.modulus % p == 0:
        return 1 + 0j
    total = 1 + 0j
    for slot, f, cls in _local_primes(lam, p):
        w = lam.components[slot].weight
        z = complex(_phase(lam, slot, chi[slot], cls)) * p ** (-f * w * s)
        total /= 1 - z
    return total


def primes_above_count(lam: LambdaAlgebra, p: int) -> int:
    """n(p), the number of primes of Lambda above p (p coprime to M)."""
    return len(_local_primes(lam, p))


def _log1p(z: np.ndarray) -> np.ndarray:
    """Complex log(1 + z), accurate for small |z|."""
    u = 1 + z
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(u == 1, z, np.log(u) * z / (u - 1))


# vectorised prime data ---------------------------------------------------------


@dataclass
class SlotPrimes:
    idx: np.ndarray  # positions in PrimeData.primes
    f: np.ndarray
    cls: np.ndarray
    weight: int


class PrimeData:
    """Every prime of Lambda above p <= P_max with p coprime to M."""

    def __init__(self, lam: LambdaAlgebra, P_max: int):
        self.P_max = int(P_max)
        ps = primes_upto(self.P_max)
        if lam.modulus > 1:
            ps = ps[np.gcd(ps, lam.modulus) == 1]
        self.primes = ps
        self.logp = np.log(ps.astype(float))
        self.slots: list[SlotPrimes] = []
        for comp in lam.components:
            grp = lam.rcg.groups[comp.slot]
            ok = np.flatnonzero(ps % comp.order != 0)
            if comp.field.true_conductor == 1:
                if len(grp) == 1:
                    cls = np.zeros(len(ok), dtype=np.int64)
                else:
                    M = lam.modulus
                    lookup = np.array([grp._index.get((r,), -1) for r in range(M)], dtype=np.int64)
                    cls = lookup[ps[ok] % M]
                self.slots.append(SlotPrimes(ok, np.ones(len(ok), dtype=np.int64), cls, comp.weight))
                continue
            ii, ff, cc = [], [], []
            for j in ok.tolist():
                p = int(ps[j])
                if comp.field.supported:
                    if p % comp.field.true_conductor == 1:
                        for _, k in lam.component_options(comp, p):
                            ii.append(j), ff.append(1), cc.append(k)
                    else:  # inert in a quadratic field
                        k = grp.class_of_element((p, 0)) if len(grp) > 1 else 0
                        ii.append(j), ff.append(2), cc.append(k)
                else:
                    st = splitting_type(comp.field, p)
                    for _ in range(st.count):
                        ii.append(j), ff.append(st.f), cc.append(0)
            self.slots.append(
                SlotPrimes(np.array(ii, dtype=np.int64), np.array(ff, dtype=np.int64), np.array(cc, dtype=np.int64), comp.weight)
            )
        self.n_max = sum(c.field.degree for c in lam.components)

    def factors(self, lam: LambdaAlgebra, s: complex, chi: Char) -> tuple[np.ndarray, np.ndarray]:
        """Per prime: D_p and log L_p."""
        n = len(self.primes)
        D = np.ones(n, dtype=complex)
        logL = np.zeros(n, dtype=complex)
        for slot, sp in enumerate(self.slots):
            if not len(sp.idx):
                continue
            z = _phase(lam, slot, chi[slot], sp.cls) * np.exp(-(sp.f * sp.weight) * s * self.logp[sp.idx])
            one = sp.f == 1
            np.add.at(D, sp.idx[one], z[one])
            np.add.at(logL, sp.idx, -_log1p(-z))
        return D, logL


_PRIME_DATA: dict = {}


def prime_data(lam: LambdaAlgebra, P_max: int) -> PrimeData:
    key = (id(lam), int(P_max))
    hit = _PRIME_DATA.get(key)
    if hit is None or hit[0] is not lam:
        hit = (lam, PrimeData(lam, P_max))
        _PRIME_DATA.clear()
        _PRIME_DATA[key] = hit
    return hit[1]


# tail bounds ----------------------------------------------------------------


def prime_power_tail(P: float, b: float) -> float:
    """Upper bound for sum over primes p > P of p^-b (b > 1), from
    pi(x) < 1.25506 x / log x."""
    if b <= 1:
        return math.inf
    P = max(P, 2.0)
    return 1.25506 * b / ((b - 1) * math.log(P)) * P ** (1 - b)


@dataclass(frozen=True)
class SeriesValue:
    """A truncated product with a bound on its relative truncation error."""

    value: complex
    rel_tail: float
    P_max: int

    @property
    def abs_tail(self) -> float:
        return abs(self.value) * self.rel_tail if math.isfinite(self.rel_tail) else math.inf


def evaluate_series(lam: LambdaAlgebra, kind: str, s: complex, chi: Char | None = None, P_max: int = 10**5) -> SeriesValue:
    """prod_{p <= P_max} D_p(s, chi) (kind "D") or L_p(s, chi) (kind "L")."""
    if P_max < 2:
        raise ParameterError("P_max must be at least 2")
    chi = trivial_char(lam) if chi is None else tuple(chi)
    kind = kind.upper()
    if kind not in ("D", "L"):
        raise ParameterError(f"unknown series kind {kind!r}")
    a = lam.alpha * complex(s).real
    trivial = not any(chi)
    if a <= 1 and trivial:
        raise DivergenceError(f"Re(s) = {complex(s).real} is not beyond the abscissa 1/{lam.alpha}")
    pd = prime_data(lam, P_max)
    D, logL = pd.factors(lam, s, chi)
    if kind == "D":
        if np.any(np.abs(D) == 0):
            raise SingularFactorError("an Euler factor of D vanishes")
        logv = np.sum(np.log(D))
    else:
        logv = np.sum(logL)
    n = pd.n_max
    r0 = (P_max + 1) ** (-a) if a > 0 else 1.0
    if a <= 1 or n * r0 >= 1:
        tail = math.inf
    else:
        E = n * prime_power_tail(P_max, a) / (1 - n * r0)
        tail = math.expm1(E)
    return SeriesValue(complex(cmath.exp(logv)), tail, int(P_max))


def psi_tail_bound(n: int, a: float, P_max: int) -> float:
    """Relative error of psi truncated at P_max, with a = alpha Re(s)."""
    if 2 * a <= 1:
        return math.inf
    r0 = (P_max + 1) ** (-a)
    B = n + (n * (n - 1) / 2 + n * n) * (1 + r0) ** n
    eps_max = B * r0 * r0
    if eps_max >= 1:
        return math.inf
    E = B * prime_power_tail(P_max, 2 * a) / (1 - eps_max)
    return math.expm1(E)


def psi_correction(lam: LambdaAlgebra, s: complex, chi: Char | None = None, P_max: int = 10**5) -> SeriesValue:
    """prod_{p <= P_max} D_p / L_p, analytic for Re(s) > 1/(2 alpha)."""
    chi = trivial_char(lam) if chi is None else tuple(chi)
    a = lam.alpha * complex(s).real
    if 2 * a <= 1:
        raise ParameterError(f"psi needs Re(s) > 1/(2 alpha) = {1 / (2 * lam.alpha)}")
    pd = prime_data(lam, P_max)
    D, logL = pd.factors(lam, s, chi)
    if np.any(np.abs(D) == 0):
        raise SingularFactorError("an Euler factor of D vanishes")
    logv = np.sum(np.log(D)) - np.sum(logL)
    return SeriesValue(complex(cmath.exp(logv)), psi_tail_bound(pd.n_max, a, P_max), int(P_max))


# comparison bound --------------------------------------------------------------


@dataclass(frozen=True)
class BoundCheck:
    p: int
    s: complex
    lhs: float
    rhs: float
    holds: bool


def check_comp1_bound(lam: LambdaAlgebra, p: int, s: complex, chi: Char | None = None, sigma0: float | None = None) -> BoundCheck:
    """|L_p - D_p| <= [n(n+1)/(1 - 2^-sigma0)^(n+2) + n] p^(-2 alpha Re s)."""
    chi = trivial_char(lam) if chi is None else tuple(chi)
    if lam.modulus % p == 0:
        raise CoprimalityError(f"p = {p} divides the modulus")
    a = lam.alpha * complex(s).real
    if sigma0 is None:
        sigma0 = a / 2
    if not 0 < sigma0 < a:
        raise ParameterError(f"sigma0 must lie in (0, {a})")
    local = _local_primes(lam, p)
    n = len(local)
    z = np.array(
        [complex(_phase(lam, slot, chi[slot], cls)) * p ** (-f * lam.components[slot].weight * s) for slot, f, cls in local],
        dtype=complex,
    )
    # Q = prod 1/(1 - z) - 1 - sum z, accumulated without cancellation
    Q, S = 0j, 0j
    for zi in z:
        Q = (Q + zi * (S + zi)) / (1 - zi)
        S += zi
    higher = sum((zi for zi, (_, f, _) in zip(z, local) if f > 1), 0j)
    lhs = abs(Q + higher)
    rhs = (n * (n + 1) / (1 - 2.0 ** (-sigma0)) ** (n + 2) + n) * p ** (-2 * a)
    slack = 16 * np.finfo(float).eps * float(np.sum(np.abs(z)))
    return BoundCheck(p, complex(s), float(lhs), rhs, lhs <= rhs + slack)


# poles and leading coefficients ----------------------------------------------


@dataclass(frozen=True)
class PoleData:
    """d_n(chi) for 1 <= n < 2 alpha over all characters of Cl'."""

    chars: np.ndarray  # (number of characters, number of slots)
    orders: dict[int, np.ndarray]
    weights: tuple[int, ...]

    def d(self, n: int, chi: Char) -> int:
        return sum(1 for w, c in zip(self.weights, chi) if c == 0 and w == n)

    def trivial(self, n: int) -> int:
        return int(self.orders[n][0])


def pole_data(lam: LambdaAlgebra) -> PoleData:
    chars = np.array(lam.rcg.characters(), dtype=np.int64).reshape(-1, lam.nslots)
    weights = np.array([c.weight for c in lam.components])
    orders = {}
    for n in range(1, 2 * lam.alpha):
        sel = weights == n
        orders[n] = np.sum((chars[:, sel] == 0), axis=1)
    return PoleData(chars, orders, tuple(int(w) for w in weights))


def d_n(lam: LambdaAlgebra, n: int, chi: Char) -> int:
    return sum(1 for c, x in zip(lam.components, chi) if x == 0 and c.weight == n)


class LFunctions:
    """Component L-functions of one algebra, cached per component."""

    def __init__(self, lam: LambdaAlgebra):
        self.lam = lam
        self.components = [ComponentL(c.field, lam.rcg.groups[c.slot], c.order) for c in lam.components]

    @cached_property
    def residues(self) -> list[float]:
        return [L.residue() for L in self.components]

    def value(self, slot: int, u: float, chi_s: int) -> complex:
        return self.components[slot].value(u, chi_s)


def _lfunctions(lam: LambdaAlgebra) -> LFunctions:
    cached = getattr(lam, "_lfunctions", None)
    if cached is None:
        cached = LFunctions(lam)
        lam._lfunctions = cached
    return cached


def residue_b(lam: LambdaAlgebra, n: int, chi: Char | None = None, P_max: int = 10**5) -> SeriesValue:
    """b_n(chi) = lim_{s -> 1/n} (s - 1/n)^{d_n(1)} D(s, chi), with the bound
    on its relative truncation error (from psi)."""
    if not 1 <= n < 2 * lam.alpha:
        raise ParameterError(f"n must satisfy 1 <= n < {2 * lam.alpha}")
    chi = trivial_char(lam) if chi is None else tuple(chi)
    if d_n(lam, n, chi) < lam.weight.multiplicity(n):
        return SeriesValue(0j, 0.0, int(P_max))
    Ls = _lfunctions(lam)
    val = 1 + 0j
    for comp in lam.components:
        if comp.weight == n:  # chi is trivial here
            val *= Ls.residues[comp.slot] / n
        else:
            val *= Ls.value(comp.slot, comp.weight / n, chi[comp.slot])
    psi = psi_correction(lam, 1.0 / n, chi, P_max)
    return SeriesValue(val * psi.value, psi.rel_tail, int(P_max))


def series_value(lam: LambdaAlgebra, s: float, chi: Char | None = None, P_max: int = 10**5) -> SeriesValue:
    """D(s, chi) = psi(s, chi) prod_t L_t(W(t) s, chi_t), valid for real
    s > 1/(2 alpha) away from the poles."""
    chi = trivial_char(lam) if chi is None else tuple(chi)
    Ls = _lfunctions(lam)
    val = 1 + 0j
    for comp in lam.components:
        val *= Ls.value(comp.slot, comp.weight * s, chi[comp.slot])
    psi = psi_correction(lam, s, chi, P_max)
    return SeriesValue(val * psi.value, psi.rel_tail, int(P_max))


# predictions ------------------------------------------------------------------


def candidate_characters(lam: LambdaAlgebra, n: int | None = None) -> list[Char]:
    """Characters with d_n(chi) = d_n(1): trivial on every weight-n slot."""
    n = lam.alpha if n is None else n
    ranges = [range(1) if c.weight == n else range(len(lam.rcg.groups[c.slot])) for c in lam.components]
    out = [()]
    for r in ranges:
        out = [x + (k,) for x in out for k in r]
    return out


def _class_char_matrix(lam: LambdaAlgebra, chars: Sequence[Char]) -> np.ndarray:
    """[i, k] = chi_i(class k)."""
    h = lam.rcg.order
    ks = np.arange(h)
    acc = np.zeros((len(chars), h))
    for slot, grp in enumerate(lam.rcg.groups):
        comp_cls = (ks // lam.rcg.strides[slot]) % lam.rcg.sizes[slot]
        idx = np.array([c[slot] for c in chars], dtype=np.int64)
        acc += np.asarray(grp.char_table, dtype=float)[idx][:, comp_cls] / grp.exponent
    return np.exp(2j * np.pi * acc)


@dataclass(frozen=True)
class AsymptoticPrediction:
    beta: float
    delta: int
    tau_total: float
    tau: np.ndarray = field(repr=False)  # per class of Cl'
    tau_error: float = 0.0
    labels: tuple[str, ...] = field(default=(), repr=False)

    def count(self, X: float, cls: int | None = None) -> float:
        return tauberian_predict(self, X, cls)


def predict(lam: LambdaAlgebra, P_max: int = 10**5) -> AsymptoticPrediction:
    """beta = 1/alpha, delta = d_alpha(1) and tau per class, from the
    residues b_alpha(chi) of the candidate characters."""
    a = lam.alpha
    chars = candidate_characters(lam, a)
    bs = [residue_b(lam, a, chi, P_max) for chi in chars]
    vals = np.array([b.value for b in bs])
    mat = _class_char_matrix(lam, chars)
    tau = np.real(np.conj(mat).T @ vals) / lam.rcg.order
    err = sum(b.abs_tail for b in bs) / lam.rcg.order
    return AsymptoticPrediction(
        beta=1.0 / a,
        delta=lam.weight.multiplicity(a),
        tau_total=float(np.real(bs[0].value)),
        tau=tau,
        tau_error=err,
        labels=tuple(lam.rcg.labels()),
    )


def tauberian_predict(pred: AsymptoticPrediction, X: float, cls: int | None = None) -> float:
    """tau / (beta Gamma(delta)) X^beta (log X)^(delta - 1)."""
    if pred.delta < 1 or pred.beta <= 0:
        raise ParameterError("needs delta >= 1 and beta > 0")
    if X < 2:
        raise ParameterError("X must be at least 2")
    tau = pred.tau_total if cls is None else float(pred.tau[cls])
    return tau / (pred.beta * math.gamma(pred.delta)) * X**pred.beta * math.log(X) ** (pred.delta - 1)


# equidistribution -------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    chi: Char
    magnitude: float
    threshold: float

    @property
    def margin(self) -> float:
        return self.magnitude / self.threshold if self.threshold else math.inf


@dataclass(frozen=True)
class Verdict:
    independent: bool
    witnesses: list[Witness]
    checked: list[Witness]
    premise_min_abs_D: float | None = None
    premise_pmax: int | None = None

    @property
    def premise_holds(self) -> bool | None:
        return None if self.premise_min_abs_D is None else self.premise_min_abs_D > 0


def min_abs_D(lam: LambdaAlgebra, s: float, chi: Char, P_max: int) -> float:
    """min over p <= P_max of |D_p(s, chi)|."""
    pd = prime_data(lam, P_max) if P_max >= 2 else None
    if pd is None or not len(pd.primes):
        return 1.0
    D, _ = pd.factors(lam, s, chi)
    return float(np.min(np.abs(D)))


def equidistribution_verdict(
    lam: LambdaAlgebra, threshold: float | None = None, P_max: int = 10**5, premise_pmax: int = 10**4
) -> Verdict:
    """The counts are asymptotically class independent iff b_alpha(chi) = 0
    for every nontrivial chi.  Characters with d_alpha(chi) < d_alpha(1)
    vanish exactly; the others are evaluated and compared against
    ``threshold`` (default: ten times the truncation bound)."""
    if threshold is not None and threshold <= 0:
        raise ParameterError("threshold must be positive")
    a = lam.alpha
    checked, witnesses = [], []
    for chi in candidate_characters(lam, a):
        if not any(chi):
            continue
        b = residue_b(lam, a, chi, P_max)
        thr = threshold if threshold is not None else 10 * b.abs_tail
        w = Witness(chi, abs(b.value), thr)
        checked.append(w)
        if w.magnitude > thr:
            witnesses.append(w)
    premise = None
    if witnesses:
        premise = min(min_abs_D(lam, 1.0 / a, w.chi, premise_pmax) for w in witnesses)
    return Verdict(not witnesses, witnesses, checked, premise, premise_pmax if witnesses else None)


# exact coefficient identities ----------------------------------------------


def cyclotomic_polynomial(N: int) -> np.ndarray:
    """Integer coefficients of Phi_N, lowest degree first."""
    num = np.zeros(N + 1, dtype=np.int64)
    num[0], num[N] = -1, 1
    for d in range(1, N):
        if N % d == 0:
            num = _poly_divide_exact(num, cyclotomic_polynomial(d))
    return num


def _poly_divide_exact(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    quo, rem = _poly_divmod(num, den)
    assert not np.any(rem), "inexact cyclotomic division"
    return quo


def _poly_divmod(num: np.ndarray, den: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Division by a monic integer polynomial (lowest degree first)."""
    num = np.array(num, dtype=object)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return np.zeros(1, dtype=object), num
    quo = np.zeros(len(num) - dd, dtype=object)
    for i in range(len(num) - 1, dd - 1, -1):
        q = num[i]
        if q:
            quo[i - dd] = q
            num[i - dd : i + 1] -= q * np.asarray(den, dtype=object)
    return quo, num[:dd]


def is_zero_at_root_of_unity(coeffs: np.ndarray, N: int) -> bool:
    """Whether sum_k coeffs[k] zeta_N^k vanishes, exactly."""
    if N == 1:
        return int(np.sum(coeffs)) == 0
    _, rem = _poly_divmod(np.asarray(coeffs, dtype=object), cyclotomic_polynomial(N))
    return not any(rem)


def twisted_coefficients(lam: LambdaAlgebra, chi: Char, m_max: int) -> np.ndarray:
    """Dirichlet coefficients of prod_p D_p(s, chi) for m <= m_max, exactly:
    row m holds integers a_k with coefficient sum_k a_k zeta_N^k, where N is
    the exponent of Cl'."""
    N = lam.rcg.exponent
    c = np.zeros((m_max + 1, N), dtype=np.int64)
    c[1, 0] = 1
    for p in primes_upto(m_max).tolist():
        opts = lam.options(p)
        if not opts:
            continue
        old = c.copy()
        for slot, _, k in opts:
            f = p ** lam.components[slot].weight
            if f > m_max:
                continue
            e = lam.rcg.char_exponent(chi, lam.lift_class(slot, k)) * N
            K = m_max // f
            c[f : f * K + 1 : f] += np.roll(old[1 : K + 1], int(e), axis=1)
    return c


def fourier_identity_holds(lam: LambdaAlgebra, class_counts: np.ndarray, m_max: int) -> bool:
    """Check |Cl'| a_c(m) = sum_chi conj(chi(c)) c_chi(m) in Z[zeta_N] for
    every class c and m <= m_max.  ``class_counts[m, c]`` is a_c(m)."""
    N = lam.rcg.exponent
    h = lam.rcg.order
    chars = lam.rcg.characters()
    twisted = [twisted_coefficients(lam, chi, m_max) for chi in chars]
    for k in range(h):
        acc = np.zeros((m_max + 1, N), dtype=np.int64)
        for chi, tc in zip(chars, twisted):
            e = int(lam.rcg.char_exponent(chi, k) * N)
            acc += np.roll(tc, -e, axis=1)
        acc[:, 0] -= h * np.asarray(class_counts[:, k], dtype=np.int64)
        for m in np.flatnonzero(np.any(acc != 0, axis=1)):
            if not is_zero_at_root_of_unity(acc[m], N):
                return False
    return True
