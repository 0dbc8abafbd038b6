"""Values and residues of the component L-functions

    L_t(u, chi) = sum over ideals a of K(t) coprime to M|t| of chi(a) N(a)^-u

for real u, including analytic continuation to u <= 1.

* trivial chi: the Dedekind zeta of Q(zeta_n) factored into primitive
  Dirichlet L-functions, with the Euler factors at p | M|t| removed;
* chi on a rational component: a periodic Dirichlet series mod M;
* chi on Q(i) or Q(zeta_3): sums over cosets r + M O of N(x)^-u, evaluated
  by splitting the theta integral at t = 1 (Epstein zeta with a shift).
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .abelian import factorize
from .cyclo import ComponentField, primes_above, splitting_type

DPS = 30
_CUTOFF = 70.0  # terms with pi|y|^2 beyond this are below e^-70


def _mp():
    ctx = mpmath.mp.clone()
    ctx.dps = DPS
    return ctx


# Dirichlet characters -------------------------------------------------------


@lru_cache(maxsize=None)
def dirichlet_characters(n: int) -> tuple[tuple[complex, ...], ...]:
    """All characters of (Z/n)^x as value tuples of length n (0 off units)."""
    units = [r for r in range(n) if math.gcd(r, n) == 1] if n > 1 else [0]
    # cyclic decomposition via CRT over prime powers
    gens, orders = [], []
    for p, e in factorize(n).items():
        q = p**e
        rest = n // q
        if p == 2:
            blocks = [(q - 1, 2)] if e >= 2 else []
            if e >= 3:
                blocks.append((5, q // 4))
        else:
            g = next(g for g in range(2, q + 1) if math.gcd(g, p) == 1 and _order_mod(g, q) == q // p * (p - 1))
            blocks = [(g, q // p * (p - 1))]
        for g, o in blocks:
            # lift g mod q to n with 1 on the complementary factor
            lift = next(x for x in range(1, n + 1) if x % q == g % q and x % rest == 1 % rest)
            gens.append(lift)
            orders.append(o)
    # discrete logs of every unit in terms of the generators
    logs = {1 % n: (0,) * len(gens)}
    for i, (g, o) in enumerate(zip(gens, orders)):
        new = {}
        for x, v in logs.items():
            y = x
            for k in range(o):
                w = list(v)
                w[i] = k
                new[y] = tuple(w)
                y = y * g % n
        logs = new
    out = []
    for ks in itertools.product(*(range(o) for o in orders)):
        vals = [0j] * n
        for r in units:
            e = sum(Fraction(k * l, o) for k, l, o in zip(ks, logs[r], orders))
            vals[r] = complex(np.exp(2j * np.pi * float(e)))
        if n == 1:
            vals = [1 + 0j]
        out.append(tuple(vals))
    return tuple(out)


def _order_mod(g: int, n: int) -> int:
    k, x = 1, g % n
    while x != 1:
        x = x * g % n
        k += 1
    return k


def primitive_values(chi: tuple[complex, ...]) -> tuple[complex, ...]:
    """Values mod the conductor of the primitive character inducing chi."""
    n = len(chi)
    for d in sorted(x for x in range(1, n + 1) if n % x == 0):
        ok = all(
            abs(chi[r] - 1) < 1e-9 for r in range(n) if math.gcd(r, n) == 1 and r % d == 1 % d
        )
        if ok:
            vals = []
            for r in range(d):
                if math.gcd(r, d) != 1:
                    vals.append(0j)
                    continue
                lift = next(r + j * d for j in range(n) if math.gcd(r + j * d, n) == 1)
                vals.append(chi[lift % n])
            return tuple(vals) if d > 1 else (1 + 0j,)
    raise AssertionError("unreachable")


def _is_principal(vals) -> bool:
    return all(abs(v) < 1e-12 or abs(v - 1) < 1e-12 for v in vals)


def dirichlet_l(ctx, u, vals):
    """sum chi(k) k^-u for a periodic chi; at u = 1 a non-principal chi uses
    L(1, chi) = -(1/q) sum chi(k) digamma(k/q), which needs no cancellation
    of poles."""
    q = len(vals)
    if u == 1 and not _is_principal(vals):
        return -sum(ctx.mpc(v) * ctx.digamma(ctx.mpf(k) / q) for k, v in enumerate(vals) if k and v) / q
    return ctx.dirichlet(ctx.mpf(u), list(vals))


# trivial character: Dedekind zeta with removed Euler factors --------------


def _removed_primes(field: ComponentField, modulus: int, order: int) -> list[tuple[int, int, int]]:
    """(p, f, count) for primes of K(t) above p | M|t|."""
    out = []
    for p in sorted(set(factorize(modulus)) | set(factorize(order))):
        st = splitting_type(field, p)
        out.append((p, st.f, st.count))
    return out


def trivial_value(field: ComponentField, modulus: int, order: int, u: float) -> float:
    """L_t(u, 1); u = 1 is the pole (use ``trivial_residue``)."""
    ctx = _mp()
    u = ctx.mpf(u)
    val = ctx.zeta(u)
    for chi in dirichlet_characters(field.true_conductor)[1:]:
        val *= dirichlet_l(ctx, u, primitive_values(chi))
    for p, f, count in _removed_primes(field, modulus, order):
        val *= (1 - ctx.mpf(p) ** (-f * u)) ** count
    return float(ctx.re(val))


def trivial_residue(field: ComponentField, modulus: int, order: int) -> float:
    """Residue of L_t(u, 1) at u = 1."""
    ctx = _mp()
    val = ctx.mpf(1)
    for chi in dirichlet_characters(field.true_conductor)[1:]:
        val *= dirichlet_l(ctx, 1, primitive_values(chi))
    for p, f, count in _removed_primes(field, modulus, order):
        val *= (1 - ctx.mpf(p) ** (-f)) ** count
    return float(ctx.re(val))


def closed_form_residue(field: ComponentField, modulus: int) -> float:
    """Class-number-formula residue for the ideals coprime to M:
    phi(M)/M over Q, and (1/w) |(O/M)^x| pi / covol(M O) otherwise."""
    n = field.true_conductor
    if n == 1:
        return sum(1 for r in range(modulus) if math.gcd(r, modulus) == 1) / modulus if modulus > 1 else 1.0
    units = sum(
        1 for a in range(modulus) for b in range(modulus) if math.gcd(field.norm((a, b)), modulus) == 1
    )
    w = len(field.units())
    covol = modulus**2 * (1.0 if n == 4 else math.sqrt(3) / 2)
    return units * math.pi / (w * covol)


# shifted Epstein zeta --------------------------------------------------------


def _basis(field: ComponentField, modulus: int) -> np.ndarray:
    cols = [field.embed((modulus, 0)), field.embed((0, modulus))]
    return np.array(cols, dtype=float).T


def _points(a: np.ndarray, B: np.ndarray, radius: float) -> np.ndarray:
    """Vectors a + B k with |.| <= radius."""
    d = B.shape[0]
    Binv = np.linalg.inv(B)
    K = int(math.ceil((radius + np.linalg.norm(a)) * np.linalg.norm(Binv, 2))) + 1
    grids = np.meshgrid(*([np.arange(-K, K + 1)] * d), indexing="ij")
    ks = np.stack([g.ravel() for g in grids], axis=1)
    pts = a[None, :] + ks @ B.T
    return pts[np.einsum("ij,ij->i", pts, pts) <= radius * radius]


def epstein_regular(s: float, shifts: np.ndarray, B: np.ndarray) -> tuple[list, object]:
    """For each shift a (rows), the part of

        Z(s; a) = sum over x in a + B Z^d, x != 0, of |x|^(-2s)

    without the common pole term; returns (regular parts, pole term).  The
    pole term is c^(-2s) pi^s / (Gamma(s) (s - d/2)) for every shift."""
    ctx = _mp()
    d = B.shape[0]
    V = abs(np.linalg.det(B))
    c = V ** (1.0 / d)
    B0 = B / c
    D0 = np.linalg.inv(B0).T
    R = math.sqrt(_CUTOFF / math.pi)
    s = ctx.mpf(s)
    pre = ctx.mpf(c) ** (-2 * s) * ctx.pi**s / ctx.gamma(s)
    half = ctx.mpf(d) / 2
    duals = _points(np.zeros(d), D0, R)
    duals = duals[np.einsum("ij,ij->i", duals, duals) > 1e-18]
    dual_norm = [ctx.pi * ctx.mpf(float(x)) for x in np.einsum("ij,ij->i", duals, duals)]
    dual_gamma = [ctx.power(q, s - half) * ctx.gammainc(half - s, q) for q in dual_norm]
    out = []
    for a in shifts:
        a0 = np.asarray(a, dtype=float) / c
        total = ctx.mpf(0)
        for y in _points(a0, B0, R):
            q = float(y @ y)
            if q < 1e-18:
                total -= 1 / s  # the excluded zero vector
                continue
            q = ctx.pi * ctx.mpf(q)
            total += ctx.power(q, -s) * ctx.gammainc(s, q)
        phases = np.cos(2 * np.pi * (duals @ a0))
        for ph, g in zip(phases, dual_gamma):
            total += ctx.mpf(float(ph)) * g
        out.append(pre * total)
    pole = pre / (s - half)
    return out, pole


class ComponentL:
    """L_t(u, chi) for every ray class character chi of one component."""

    def __init__(self, field: ComponentField, rcg, order: int):
        self.field = field
        self.rcg = rcg
        self.modulus = rcg.modulus
        self.order = order
        self._class_cache: dict[float, np.ndarray] = {}

    def _extra_factor(self, u: float, chi: int) -> complex:
        """Remove Euler factors at p | |t| with p not dividing M."""
        val = 1 + 0j
        for p in factorize(self.order):
            if self.modulus % p == 0:
                continue
            for P in primes_above(self.field, p):
                cls = self.rcg.ideal_class(P)
                e = float(self.rcg.char_table[chi, cls]) / self.rcg.exponent
                val *= 1 - np.exp(2j * np.pi * e) * P.norm ** (-u)
        return val

    def value(self, u: float, chi: int) -> complex:
        if chi == 0:
            return complex(trivial_value(self.field, self.modulus, self.order, u))
        if self.field.true_conductor == 1:
            base = self._rational_value(u, chi)
        else:
            base = self._quadratic_value(u, chi)
        return base * self._extra_factor(u, chi)

    def residue(self) -> float:
        return trivial_residue(self.field, self.modulus, self.order)

    def _rational_value(self, u: float, chi: int) -> complex:
        ctx = _mp()
        M = self.modulus
        N = self.rcg.exponent
        vals = [0j] * M
        for r in range(M):
            if math.gcd(r, M) == 1:
                k = int(self.rcg.char_table[chi, self.rcg.class_of_element((r,))])
                vals[r] = complex(np.exp(2j * np.pi * k / N))
        return complex(dirichlet_l(ctx, u, vals))

    def _class_sums(self, u: float) -> np.ndarray:
        """Regular parts of the coset sums, one per class (times |class|)."""
        key = float(u)
        hit = self._class_cache.get(key)
        if hit is None:
            B = _basis(self.field, self.modulus)
            shifts = np.array([self.field.embed(r) for r in self.rcg.reps], dtype=float)
            regular, _ = epstein_regular(u, shifts, B)
            hit = np.array([float(x) for x in regular]) * np.asarray(self.rcg.orbit_sizes, dtype=float)
            self._class_cache[key] = hit
        return hit

    def _quadratic_value(self, u: float, chi: int) -> complex:
        sums = self._class_sums(u)
        k = np.asarray(self.rcg.char_table[chi], dtype=float)
        phases = np.exp(2j * np.pi * k / self.rcg.exponent)
        # the common pole term cancels: the character sums to zero over units
        w = len(self.field.units())
        return complex(np.dot(phases, sums) / w)


def component_l(field: ComponentField, rcg, order: int) -> ComponentL:
    return ComponentL(field, rcg, order)
