import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import hermitian_square
from psdg.certsearch import (
    CertBlock,
    Certificate,
    FactorizationError,
    MembershipStatus,
    ModuleKind,
    TruncatedPreordering,
    build_membership_sdp,
    check_membership,
    denominator_search,
    extract_certificate,
    fejer_riesz,
    verify_certificate,
)
from psdg.counterexamples import fk_build
from psdg.polymat import MatrixPoly, Mode
from psdg.sdp import SdpOutcome, Status
from psdg.semialg import Description, Interval, Point, SemialgSet, natural_description

INF = math.inf
QM = ModuleKind.QUADRATIC_MODULE
EMPTY = Description([])
UNIT = Description([[0, 1], [1, -1]])  # {x, 1 - x}


def sp(*c):
    return MatrixPoly.scalar([Fraction(v) for v in c])


def psd_on_unit_interval(rng, n=2, deg=4):
    """sigma_0 + sigma_1 x + sigma_2 (1 - x) with random Gram factors."""
    half = deg // 2
    F = hermitian_square(rng, n, half)
    F = F + hermitian_square(rng, n, half - 1) * sp(0, 1).to_float() * MatrixPoly.identity(n, Mode.FLOAT)
    F = F + hermitian_square(rng, n, half - 1) * sp(1, -1).to_float() * MatrixPoly.identity(n, Mode.FLOAT)
    return F


# --- build ------------------------------------------------------------------------
def test_build_block_sizes():
    p = build_membership_sdp(sp(0, 1), TruncatedPreordering(Description([[0, 1]]), 1, 1, QM))
    assert p.blocks == [1, 1]
    p = build_membership_sdp(sp(0, 0, 1), TruncatedPreordering(EMPTY, 1, 2))
    assert p.blocks == [2]


def test_build_rejects_bad_input():
    with pytest.raises(ValueError):
        build_membership_sdp(sp(0, 0, 1), TruncatedPreordering(EMPTY, 1, 1))
    nonherm = MatrixPoly.constant([[0, 1], [0, 0]])
    with pytest.raises(ValueError):
        build_membership_sdp(nonherm, TruncatedPreordering(EMPTY, 2, 0))


def test_preordering_exponent_count():
    S = Description([[0, 1], [1, -1], [2, -3, 1]])
    assert len(TruncatedPreordering(S, 1, 4).exponents()) == 8
    assert len(TruncatedPreordering(S, 1, 4, QM).exponents()) == 4


# --- membership ---------------------------------------------------------------------
def test_membership_simple_examples():
    rep = check_membership(sp(0, 1), TruncatedPreordering(Description([[0, 1]]), 1, 1, QM))
    assert rep.status is MembershipStatus.MEMBER
    rep = check_membership(sp(0, 0, 1), TruncatedPreordering(EMPTY, 1, 2))
    assert rep.status is MembershipStatus.MEMBER
    rep = check_membership(sp(-1), TruncatedPreordering(EMPTY, 1, 0))
    assert rep.status is MembershipStatus.NOT_MEMBER_AT_DEGREE


def test_membership_matrix_on_unit_interval():
    rng = np.random.default_rng(11)
    F = psd_on_unit_interval(rng)
    T = TruncatedPreordering(UNIT, 2, 4, QM)
    rep = check_membership(F, T)
    assert rep.status is MembershipStatus.MEMBER
    assert verify_certificate(F, T, rep.certificate, 1e-6 * F.max_abs())


def test_membership_fk_not_member_at_degree_two():
    inst = fk_build(0, 1, 2, 1)
    S2 = natural_description(SemialgSet([Interval(0, 1), Point(2), Point(3)]))
    rep = check_membership(inst.F, TruncatedPreordering(S2, 2, 2), reduce_degree=False)
    assert rep.status is MembershipStatus.NOT_MEMBER_AT_DEGREE
    assert rep.notes["witness_check"]["ok"]


def test_zero_polynomial_is_member():
    T = TruncatedPreordering(UNIT, 2, 2, QM)
    rep = check_membership(MatrixPoly.zero(2), T)
    assert rep.status is MembershipStatus.MEMBER
    assert all(not b.Q.any() for b in rep.certificate.blocks)


# --- extraction -------------------------------------------------------------------
def _outcome(Q):
    return SdpOutcome(Status.FEASIBLE, [np.asarray(Q, dtype=complex)])


def test_extract_examples():
    T = TruncatedPreordering(EMPTY, 1, 2)
    C = extract_certificate(_outcome(np.diag([0.0, 1.0])), T, sp(0, 0, 1))
    assert C.residual < 1e-14
    # eigen-reconstruction of the clipped Gram rounds at machine precision
    C = extract_certificate(_outcome([[1.0, 1.0], [1.0, 1.0]]), T, sp(1, 2, 1))
    assert C.residual < 1e-14
    C = extract_certificate(_outcome(np.diag([-1e-12, 1.0])), T, sp(0, 0, 1))
    assert C.blocks[0].clipped == pytest.approx(1e-12)
    assert C.residual < 1e-11
    with pytest.raises(ValueError):
        extract_certificate(_outcome(np.diag([-1e-3, 1.0])), T, sp(0, 0, 1))


# --- verification ------------------------------------------------------------------
def test_verify_round_trip_and_tamper():
    rng = np.random.default_rng(5)
    F = psd_on_unit_interval(rng)
    T = TruncatedPreordering(UNIT, 2, 4, QM)
    C = check_membership(F, T).certificate
    assert verify_certificate(F, T, C, 1e-6 * F.max_abs())
    C2 = Certificate.from_json(C.to_json())
    assert verify_certificate(F, T, C2, 1e-6 * F.max_abs())
    C2.blocks[0].Q[0, 0] += 1
    assert not verify_certificate(F, T, C2, 1e-6 * F.max_abs())


def test_verify_hand_built():
    S = Description([[0, 1]])
    T = TruncatedPreordering(S, 1, 1, QM)
    C = Certificate(S, 1, 1, QM, [CertBlock((0,), [Fraction(1)], 0, np.zeros((1, 1))),
                                   CertBlock((1,), [Fraction(0), Fraction(1)], 0, np.ones((1, 1)))])
    assert verify_certificate(sp(0, 1), T, C, 1e-12)


# --- Fejer-Riesz --------------------------------------------------------------------
def test_fejer_riesz_examples():
    G, r = fejer_riesz(MatrixPoly.identity(2))
    assert r < 1e-9 and G.degree == 0
    F = sp(1, 0, 1)
    G, r = fejer_riesz(F)
    assert r < 1e-7 and G.degree == 1
    rng = np.random.default_rng(2)
    F = hermitian_square(rng, 3, 2)
    G, r = fejer_riesz(F)
    assert (G.adjoint() * G).distance(F) <= 1e-6 * max(1.0, F.max_abs())
    assert G.degree <= 2


def test_fejer_riesz_rejects_odd_and_negative():
    with pytest.raises(ValueError):
        fejer_riesz(sp(0, 1))
    with pytest.raises(FactorizationError):
        fejer_riesz(sp(-1, 0, 1))


@settings(max_examples=15)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=3), st.integers(1, 5))
def test_fejer_riesz_scalar_oracle(roots, c):
    p = sp(c)
    for r in roots:
        p = p * sp(Fraction(-r, 2), 1) * sp(Fraction(-r, 2), 1)
    G, resid = fejer_riesz(p)
    assert resid <= 1e-6 * max(1.0, p.max_abs())
    assert G.degree == p.degree // 2
    t = np.linspace(-10, 10, 1000)
    vals = np.polyval([float(v.re) for v in p.scalar_coeffs()[::-1]], t)
    assert np.all(vals >= 0)


# --- soundness and monotonicity ------------------------------------------------------
@settings(max_examples=8)
@given(st.integers(0, 10**6))
def test_member_results_are_sound_and_monotone(seed):
    rng = np.random.default_rng(seed)
    F = psd_on_unit_interval(rng, 2, 2)
    for d in (2, 4):
        T = TruncatedPreordering(UNIT, 2, d, QM)
        rep = check_membership(F, T, tol=1e-8)
        assert rep.status is MembershipStatus.MEMBER
        assert verify_certificate(F, T, rep.certificate, 10 * 1e-8 * max(1.0, F.max_abs()))


@settings(max_examples=6)
@given(st.integers(1, 12))
def test_claim2_refutation_stable_over_k(j):
    k = Fraction(j, 2)
    inst = fk_build(0, 1, 2, k)
    S2 = natural_description(SemialgSet([Interval(0, 1), Point(2), Point(3)]))
    rep = check_membership(inst.F, TruncatedPreordering(S2, 2, 2), reduce_degree=False)
    assert rep.status is MembershipStatus.NOT_MEMBER_AT_DEGREE


# --- denominators ---------------------------------------------------------------------
def test_denominator_search_k_zero():
    res = denominator_search(sp(0, 1), natural_description(SemialgSet([Interval(0, INF)])), k_max=2)
    assert res.status == "FOUND" and res.k == 0


def test_denominator_search_exhausted_for_negative():
    res = denominator_search(-MatrixPoly.identity(2), natural_description(SemialgSet([Interval(0, INF)])), k_max=2)
    assert res.status == "EXHAUSTED" and res.certificate is None


def test_denominator_search_rejects_real_w():
    with pytest.raises(ValueError):
        denominator_search(sp(1), EMPTY, w=2.0)
