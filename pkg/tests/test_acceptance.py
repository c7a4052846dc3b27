"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the
terminal output) or directly with ``python tests/test_acceptance.py``.
"""
import cmath
import math
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from helpers import exact_poly, float_poly, hermitian_exact, hermitian_square
from psdg import _sturm
from psdg.certsearch import (
    ModuleKind,
    MembershipStatus,
    TruncatedPreordering,
    check_membership,
    denominator_search,
    fejer_riesz,
    verify_report,
)
from psdg.circle import MoebiusMap, lambda_recover, lambda_transform
from psdg.counterexamples import (
    claim1_q,
    fk_build,
    fk_conditions,
    fk_determinant_residual,
    fk_psd_report,
    fk_refute_claim2_sdp,
    two_unbounded_factorize,
)
from psdg.gaussq import GaussQ
from psdg.polymat import MatrixPoly, Mode
from psdg.reduction import h2f_reduce, pivot_unitaries, schur_split
from psdg.sdp import Status
from psdg.semialg import Description, Interval, Point, SemialgSet, natural_description

INF = math.inf
HALF = GaussQ(Fraction(1, 2))
I_ = GaussQ(0, 1)
UNIT = Description([[0, 1], [1, -1]])


@pytest.fixture
def report(capsys):
    def emit(num, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def sp(*c):
    return MatrixPoly.scalar([Fraction(v) for v in c])


def _fx(x):
    return MatrixPoly.scalar([0.0, 1.0]).to_float()


# 1 ---------------------------------------------------------------------------------
def _closed_forms(G, k, l):
    g = lambda a, b: G.entry(a - 1, b - 1)  # noqa: E731
    if k == l:
        return g(k, k), g(k, k)
    p = (g(k, l) + g(l, k) + g(k, k) + g(l, l)).scale(HALF)
    r = (g(l, k) - g(k, l)).scale(I_ * HALF) + (g(k, k) + g(l, l)).scale(HALF)
    return p, r


def test_c01_exact_identities(report):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    bad = 0
    count = 120
    for _ in range(count):
        n = int(rng.integers(1, 5))
        G = hermitian_exact(rng, n, int(rng.integers(0, 5)))
        k = int(rng.integers(1, n + 1))
        l = int(rng.integers(k, n + 1))
        U, V = pivot_unitaries(n, k, l)
        p, r = _closed_forms(G, k, l)
        bad += U.top_left(G) != p or V.top_left(G) != r
        if n >= 2:
            # raises if either congruence identity leaves a non-zero residual
            try:
                schur_split(G)
            except Exception:
                bad += 1
    dt = time.perf_counter() - t0
    report(1, bad == 0 and dt < 10, f"{count} inputs, {bad} mismatches, {dt:.2f}s (limit 10s)")


# 2 ---------------------------------------------------------------------------------
def test_c02_fejer_riesz(report):
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    worst, deg_ok = 0.0, True
    for _ in range(20):
        n = int(rng.integers(1, 4))
        half = int(rng.integers(1, 5))
        F = hermitian_square(rng, n, half) + hermitian_square(rng, n, int(rng.integers(0, half + 1)))
        G, _ = fejer_riesz(F)
        worst = max(worst, (G.adjoint() * G).distance(F))
        deg_ok &= G.degree <= F.degree / 2
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and deg_ok and dt < 60
    report(2, ok, f"max residual {worst:.2e} (<= 1e-6), degree bound {deg_ok}, {dt:.1f}s (limit 60s)")


# 3 ---------------------------------------------------------------------------------
def _psd_on_unit(rng, n=2):
    x = sp(0, 1).to_float()
    one_minus = sp(1, -1).to_float()
    I = MatrixPoly.identity(n, Mode.FLOAT)
    F = hermitian_square(rng, n, 3)
    F = F + hermitian_square(rng, n, 2) * x * I
    F = F + hermitian_square(rng, n, 2) * one_minus * I
    F = F + hermitian_square(rng, n, 2) * (x * one_minus) * I
    return F


def test_c03_compact_saturation(report):
    rng = np.random.default_rng(303)
    T = TruncatedPreordering(UNIT, 2, 6)
    members, worst = 0, 0.0
    for _ in range(20):
        F = _psd_on_unit(rng)
        rep = check_membership(F, T)
        if rep.status is MembershipStatus.MEMBER:
            v = verify_report(F, T, rep.certificate, 1e-6 * max(1.0, F.max_abs()))
            members += bool(v["ok"])
            worst = max(worst, v["residual"])
    report(3, members == 20 and worst <= 1e-6, f"{members}/20 verified MEMBER at d=6, max residual {worst:.2e}")


# 4 ---------------------------------------------------------------------------------
def test_c04_fk_instance(report):
    c = fk_conditions(0, 1, 2, 1)
    inst = fk_build(0, 1, 2, 1)
    resid = fk_determinant_residual(inst)
    psd = fk_psd_report(inst, SemialgSet([Interval(0, 1), Interval(2, INF)]))
    vals = c["values"]
    ok = vals["Dsq"] == 6 and vals["vertex"] == 2 and resid <= 1e-20 and psd["pass"]
    report(4, ok, f"Dsq={vals['Dsq']} vertex={vals['vertex']} det residual {resid:.1e} psd_report {psd['pass']}")


# 5 ---------------------------------------------------------------------------------
def test_c05_claim2_refutation(report):
    inst = fk_build(0, 1, 2, 1)
    S2 = natural_description(SemialgSet([Interval(0, 1), Point(2), Point(3)]))
    t0 = time.perf_counter()
    out = fk_refute_claim2_sdp(inst, S2)
    dt = time.perf_counter() - t0
    chk = out.diagnostics.get("witness_check") or {}
    lam, inner = chk.get("lambda_max", INF), chk.get("inner", -INF)
    ok = out.status is Status.INFEASIBLE and lam <= -1e-8 and inner >= 1e-8 and dt < 30
    report(5, ok, f"status {out.status.value}, lambda_max {lam:.2e}, inner {inner:.2e}, {dt:.1f}s (limit 30s)")


# 6 ---------------------------------------------------------------------------------
def _root_strictly_inside(p, lo, hi):
    sf = _sturm.squarefree(p)
    for r in _sturm.real_roots(p):
        if r.exact:
            if lo < r.value < hi:
                return True
            continue
        # an irrational root differs from the rational endpoints: shrink until separated
        while r.lo < lo < r.hi or r.lo < hi < r.hi:
            r = _sturm.refine(sf, r, (r.hi - r.lo) / 4)
        if lo <= r.lo and r.hi <= hi:
            return True
    return False


def test_c06_claim1_signs(report):
    rng = np.random.default_rng(606)
    checked = failures = 0
    while checked < 50:
        x1 = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
        x2 = x1 + Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 4)))
        x3 = x2 + Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 4)))
        k = Fraction(int(rng.integers(1, 41)), int(rng.integers(1, 5)))
        c = fk_conditions(x1, x2, x3, k)
        if not (c["c31"] and c["c32"] and c["c33"]):
            continue
        inst = fk_build(x1, x2, x3, k)
        checked += 1
        k0 = Fraction(int(rng.integers(1, 65)), 64)
        if not _sturm.evaluate(claim1_q(inst, k0), x1) < 0:
            failures += 1
        q0 = claim1_q(inst, 0)
        # negative throughout (x2, x3): no root inside and negative at the midpoint
        if _sturm.evaluate(q0, (x2 + x3) / 2) >= 0 or _root_strictly_inside(q0, x2, x3):
            failures += 1
    report(6, failures == 0, f"{checked} instances, {failures} sign failures")


# 7 ---------------------------------------------------------------------------------
def test_c07_two_unbounded(report):
    rng = np.random.default_rng(707)
    worst, deg_ok = 0.0, True
    for _ in range(10):
        n = int(rng.integers(1, 3))
        a = Fraction(int(rng.integers(-3, 3)))
        b = a + int(rng.integers(1, 4))
        gen = sp(a * b, -(a + b), 1).to_float() * MatrixPoly.identity(n, Mode.FLOAT)
        G0 = float_poly(rng, n, 2)
        H0 = float_poly(rng, n, 1)
        F = G0.adjoint() * G0 + H0.adjoint() * H0 * gen
        G, H, _ = two_unbounded_factorize(F, a, b)
        worst = max(worst, (G.adjoint() * G + H.adjoint() * H * gen).distance(F) / max(1.0, F.max_abs()))
        D = F.degree
        deg_ok &= G.degree <= D / 2 and (H.is_zero() or H.degree <= D / 2 - 1)
    report(7, worst <= 1e-6 and deg_ok, f"10 instances, max relative residual {worst:.2e}, degree bounds {deg_ok}")


# 8 ---------------------------------------------------------------------------------
def test_c08_denominator_search(report):
    inst = fk_build(0, 1, 2, 1)
    S = natural_description(SemialgSet([Interval(0, 1), Interval(2, INF)]))
    t0 = time.perf_counter()
    res = denominator_search(inst.F, S, w=1j, k_max=12)
    budget = 12
    if res.status != "FOUND":
        res = denominator_search(inst.F, S, w=1j, k_max=24)
        budget = 24
    ok = False
    detail = f"status {res.status} within k <= {budget}"
    if res.status == "FOUND":
        T = TruncatedPreordering(S, 2, res.d)
        v = verify_report(res.multiplied, T, res.certificate, 1e-6 * max(1.0, res.multiplied.max_abs()))
        ok = bool(v["ok"])
        detail += f", k={res.k} d={res.d}, certificate residual {v['residual']:.2e}"
    report(8, ok, detail + f", {time.perf_counter() - t0:.1f}s")


# 9 ---------------------------------------------------------------------------------
def test_c09_moebius_round_trip(report):
    rng = np.random.default_rng(909)
    M = MoebiusMap()
    exact_bad = 0
    for _ in range(40):
        F = exact_poly(rng, int(rng.integers(1, 3)), int(rng.integers(0, 5)))
        d = 0 if F.is_zero() else F.degree
        exact_bad += lambda_recover(M, lambda_transform(M, F), d) != F
    m = MoebiusMap(cmath.exp(0.3j), -0.5 + 1.5j)
    worst = 0.0
    for _ in range(20):
        F = float_poly(rng, 2, 4)
        F = F + F.adjoint()
        back = lambda_recover(m, lambda_transform(m, F), 4)
        worst = max(worst, back.distance(F) / max(1.0, F.max_abs()))
    report(9, exact_bad == 0 and worst <= 1e-9,
           f"exact mismatches {exact_bad}/40, FLOAT max residual {worst:.2e} (<= 1e-9)")


# 10 --------------------------------------------------------------------------------
def test_c10_h2f(report):
    F = MatrixPoly.from_entries([[sp(0, 1), sp(0)], [sp(0), sp(1, -1)]])
    K = SemialgSet([Interval(0, 1)])
    parts = []
    ok = True
    for x0 in (0, Fraction(1, 2), 1j):
        h, plan = h2f_reduce(F, K, UNIT, x0)
        v = plan.verify()
        good = any(h.evaluate(x0).flat) and h.degree <= 8 and v["ok"]
        ok &= bool(good)
        parts.append(f"x0={x0}: deg h={h.degree} verified={v['ok']}")
    report(10, ok, "; ".join(parts))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
