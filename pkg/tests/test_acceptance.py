"""Acceptance suite: nine end-to-end checks, each printing one PASS/FAIL line.

Run under pytest (``pytest tests/test_acceptance.py -v``) or directly
(``python tests/test_acceptance.py``).
"""

import itertools
import math
import sys
import time
import warnings
from collections import Counter
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tamecount import enumerate_F, kappa_all, kappa_full, kappa_omit, nu
from tamecount.abelian import abelian_groups_up_to, det_trivial_mask, theta_integral_mask
from tamecount.counting import kappa_full_by_inclusion_exclusion, kappa_full_by_subtraction
from tamecount.dirichlet import (
    check_comp1_bound,
    equidistribution_verdict,
    fourier_identity_holds,
    predict,
    tauberian_predict,
)
from tamecount.fideals import ideal_class
from tamecount.primes import primes_upto

from conftest import algebra

TEST_GROUPS = ([2], [3], [4], [2, 2])
_LINES: list[str] = []


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {n}: {detail}"
        _LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return emit


@lru_cache(maxsize=None)
def c2_tally_1e7():
    lam = algebra([2], "ram", 16)
    return lam, kappa_all(lam, 10**7)


# 1 ----------------------------------------------------------------------------


def test_criterion_1_stickelberger_exactness(report):
    t0 = time.perf_counter()
    checked, mismatches = 0, 0
    for G in abelian_groups_up_to(8):
        rows = np.array(list(itertools.product(range(-2, 3), repeat=G.order)), dtype=np.int64)
        theta = theta_integral_mask(G, rows)
        det = det_trivial_mask(G, rows)
        checked += len(rows)
        mismatches += int(np.count_nonzero(theta != det))
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and dt < 10
    report(1, ok, f"{checked} elements over all |G| <= 8, {mismatches} mismatches, {dt:.1f}s (< 10s)")


# 2 ----------------------------------------------------------------------------


def test_criterion_2_nu_oracle(report):
    t0 = time.perf_counter()
    m_max = 10**4
    failures = []
    checked = 0
    for factors, weight in itertools.product(TEST_GROUPS, ("ram", "disc")):
        table = None
        # default modulus: indices coprime to M; M = 1: every index
        for M in (None, 1):
            lam = algebra(factors, weight, M)
            counts = Counter(idx for _, idx in enumerate_F(m_max, lam))
            if table is None:
                table = np.array([0] + [nu(m, lam.weight) for m in range(1, m_max + 1)], dtype=np.int64)
            for m in range(1, m_max + 1):
                if math.gcd(m, lam.modulus) != 1:
                    continue
                checked += 1
                if counts.get(m, 0) != table[m]:
                    failures.append((factors, weight, lam.modulus, m))
        for a in range(1, m_max + 1):
            for b in range(1, m_max // a + 1):
                if math.gcd(a, b) == 1 and table[a * b] != table[a] * table[b]:
                    failures.append((factors, weight, "mult", a, b))
    dt = time.perf_counter() - t0
    ok = not failures and dt < 30
    report(2, ok, f"{checked} index comparisons and all coprime pairs <= 1e4, {len(failures)} failures, {dt:.1f}s (< 30s)")


# 3 ----------------------------------------------------------------------------


def class_coefficients(lam, m_max):
    out = np.zeros((m_max + 1, lam.rcg.order), dtype=np.int64)
    for a, idx in enumerate_F(m_max, lam):
        out[idx, ideal_class(a, lam)] += 1
    return out


def test_criterion_3_fourier_identity(report):
    t0 = time.perf_counter()
    results = {}
    for factors, M in (([2], 16), ([3], 9)):
        for weight in ("disc", "ram"):
            lam = algebra(factors, weight, M)
            results[(factors[0], M, weight)] = fourier_identity_holds(lam, class_coefficients(lam, 10**4), 10**4)
    dt = time.perf_counter() - t0
    ok = all(results.values()) and dt < 60
    detail = ", ".join(f"C{g} M={M} {w}: {'exact' if v else 'BROKEN'}" for (g, M, w), v in results.items())
    report(3, ok, f"{detail}; m <= 1e4, {dt:.1f}s (< 60s)")


# 4 ----------------------------------------------------------------------------


def test_criterion_4_comparison_bound(report):
    t0 = time.perf_counter()
    checks, fails, worst = 0, 0, 0.0
    for factors, weight in itertools.product(TEST_GROUPS, ("disc", "ram")):
        lam = algebra(factors, weight)
        chars = lam.rcg.characters()
        for s in (0.6, 0.8, 1.0, 1.5, 2.0):
            for p in primes_upto(1000).tolist():
                if lam.modulus % p == 0:
                    continue
                for chi in chars:
                    b = check_comp1_bound(lam, p, s, chi)
                    checks += 1
                    fails += not b.holds
                    worst = max(worst, b.lhs / b.rhs)
    dt = time.perf_counter() - t0
    ok = fails == 0 and dt < 60
    report(4, ok, f"{checks} grid points, {fails} violations, max lhs/rhs = {worst:.3f}, {dt:.1f}s (< 60s)")


# 5 ----------------------------------------------------------------------------


def test_criterion_5_equidistribution(report):
    _, t = c2_tally_1e7()
    mean = t.total / len(t.counts)
    dev = max(abs(c / mean - 1) for c in t.counts)
    density = t.total / 1e7
    rel = abs(density / (4 / math.pi**2) - 1)
    ok = dev <= 0.02 and rel <= 0.03
    report(5, ok, f"counts {t.counts.tolist()}, max class deviation {dev:.2e} (<= 0.02), total/X off 4/pi^2 by {rel:.2e} (<= 0.03)")


# 6 ----------------------------------------------------------------------------


def shifted_log_power(X, kappa):
    """Fit kappa / X = C (log X + b)^k; return (k, b) minimising the
    log-space residual over a grid of shifts b."""
    L = np.log(np.asarray(X, dtype=float))
    y = np.log(np.asarray(kappa, dtype=float) / np.asarray(X, dtype=float))
    best = None
    for b in np.linspace(-5, 30, 3501):
        u = np.log(L + b)
        k, c = np.polyfit(u, y, 1)
        res = float(np.sum((y - (k * u + c)) ** 2))
        if best is None or res < best[0]:
            best = (res, k, b)
    return best[1], best[2]


def test_criterion_6_growth_exponents(report):
    schedule = [10**4, 10**5, 10**6, 10**7, 10**8]
    c3 = algebra([3], "disc")
    k3 = [kappa_all(c3, X).total for X in schedule]
    slope = np.polyfit(np.log(schedule), np.log(k3), 1)[0]
    v4 = algebra([2, 2], "ram")
    kv = [kappa_all(v4, X).total for X in schedule]
    naive = np.polyfit(np.log(np.log(schedule)), np.log(np.array(kv) / schedule), 1)[0]
    power, shift = shifted_log_power(schedule, kv)
    ok = abs(slope - 0.5) <= 0.05 and abs(power - 2) <= 0.5
    report(
        6,
        ok,
        f"C3 disc exponent {slope:.4f} (0.5 +- 0.05); C2xC2 ram log-power {power:.3f} (2 +- 0.5) "
        f"from kappa/X = C(log X + {shift:.2f})^k [pure power fit gives {naive:.3f}]",
    )


# 7 ----------------------------------------------------------------------------


def test_criterion_7_non_equidistribution_witness(report):
    lam = algebra([2, 2], "1,1,2", 16)
    v = equidistribution_verdict(lam, P_max=10**5, premise_pmax=10**4)
    t0 = lam.components[2].slot  # the weight-2 orbit
    in_S = [w for w in v.witnesses if w.chi[t0] != 0 and all(w.chi[c.slot] == 0 for c in lam.components if c.weight == lam.alpha)]
    best = max(v.witnesses, key=lambda w: w.magnitude, default=None)
    ok = (not v.independent) and bool(in_S) and bool(v.premise_holds)
    detail = "no witness"
    if best is not None:
        detail = (
            f"independent={v.independent}, {len(v.witnesses)} witnesses, best chi={best.chi} |b_1|={best.magnitude:.4f} "
            f"vs 10x tail {best.threshold:.2e} (margin {best.margin:.0f}), min |D_p| over p <= 1e4 = {v.premise_min_abs_D:.4f}"
        )
    report(7, ok, detail)


# 8 ----------------------------------------------------------------------------


def test_criterion_8a_omitted_component_share_decreases(report):
    lam = algebra([2, 2], "ram")
    schedule = [10**3, 10**4, 10**5, 10**6]
    totals = [kappa_all(lam, X).total for X in schedule]
    ratios = {}
    for t in lam.orbits.nontrivial:
        ratios[t] = [kappa_omit(lam, t, X).total / tot for X, tot in zip(schedule, totals)]
    ok = all(all(a > b for a, b in zip(r, r[1:])) for r in ratios.values())
    shown = "; ".join(f"t={t}: " + ", ".join(f"{x:.3f}" for x in r) for t, r in ratios.items())
    report("8a", ok, f"kappa_omit/kappa_all across 1e3..1e6: {shown}")


def test_criterion_8b_full_count_formula(report):
    lam = algebra([2, 2], "ram")
    X = 10**4
    direct = kappa_full(lam, X)
    formula = kappa_full_by_subtraction(lam, X)
    incl_excl = kappa_full_by_inclusion_exclusion(lam, X)
    ok = np.array_equal(direct.counts, formula.counts)
    report(
        "8b",
        ok,
        f"direct all-components count {direct.total} vs kappa_all - sum kappa_omit = {formula.total} "
        f"(inclusion-exclusion gives {incl_excl.total}, equal to direct: {np.array_equal(direct.counts, incl_excl.counts)})",
    )


# 9 ----------------------------------------------------------------------------


def test_criterion_9_tauberian(report):
    lam, t = c2_tally_1e7()
    pred = predict(lam, P_max=10**5)
    expected = tauberian_predict(pred, 1e7)
    rel = abs(t.total - expected) / expected
    ok = rel <= 0.05
    report(
        9,
        ok,
        f"beta={pred.beta}, delta={pred.delta}, tau={pred.tau_total:.8f}; kappa_total(1e7)={t.total} "
        f"vs predicted {expected:.1f}, relative error {rel:.2e} (<= 0.05)",
    )


if __name__ == "__main__":
    warnings.simplefilter("ignore")
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
