import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import exact_poly, hermitian_exact
from psdg.circle import (
    Arc,
    CircleSet,
    MoebiusMap,
    angle_point,
    circle_description_check,
    circle_description_report,
    format_angle,
    lambda_recover,
    lambda_transform,
    moebius_apply,
    moebius_inverse,
    parse_angle,
    transfer_description,
    transfer_set,
)
from psdg.gaussq import GaussQ
from psdg.polymat import LaurentMatrixPoly, MatrixPoly, Mode
from psdg.semialg import Description, Interval, Point, SemialgSet

M = MoebiusMap()


def sp(*c):
    return MatrixPoly.scalar([Fraction(v) for v in c])


# --- the map ---------------------------------------------------------------------------
def test_moebius_examples():
    assert moebius_apply(M, 0) == GaussQ(-1)
    assert moebius_apply(M, math.inf) == GaussQ(1)
    assert moebius_inverse(M, GaussQ(1)) == math.inf


def test_moebius_validation():
    with pytest.raises(ValueError):
        MoebiusMap(2, 1j)
    with pytest.raises(ValueError):
        MoebiusMap(1, 3)


@settings(max_examples=100)
@given(st.fractions(max_denominator=50).filter(lambda q: abs(q) < 100))
def test_moebius_exact_round_trip(x):
    z = moebius_apply(M, x)
    assert z.norm2() == 1
    assert moebius_inverse(M, z) == GaussQ(x)


def test_moebius_lands_on_circle():
    rng = np.random.default_rng(0)
    m = MoebiusMap(cmath.exp(0.7j), 0.3 + 2j)
    for t in rng.standard_normal(1000) * 50:
        assert abs(abs(moebius_apply(m, float(t))) - 1) <= 1e-12


# --- Lambda transform --------------------------------------------------------------------
def test_lambda_constant():
    L = lambda_transform(M, MatrixPoly.identity(2))
    assert L == LaurentMatrixPoly({0: np.eye(2, dtype=int)}, 2)


def test_lambda_of_x_is_hermitian():
    L = lambda_transform(M, sp(0, 1))
    assert L.is_hermitian()
    # (z - 1)^*(z - 1) lambda^-1(z) = i (z - 1/z)
    assert L == LaurentMatrixPoly({1: [[GaussQ(0, 1)]], -1: [[GaussQ(0, -1)]]}, 1)


def test_lambda_matches_definition_at_samples():
    F = sp(1, 0, 1)
    L = lambda_transform(M, F)
    for t in np.linspace(-5, 5, 11):
        z = complex(moebius_apply(M, float(t)))
        direct = (abs(z - 1) ** 2) * (t * t + 1)
        assert abs(L.evaluate(z)[0, 0] - direct) <= 1e-10


def test_recover_examples():
    F = sp(1, 0, 1)
    assert lambda_recover(M, lambda_transform(M, F), 2) == F
    I2 = MatrixPoly.identity(2)
    assert lambda_recover(M, lambda_transform(M, I2), 0) == I2


def test_recover_rejects_wrong_shape():
    L = LaurentMatrixPoly({3: [[1]]}, 1)
    with pytest.raises(ValueError):
        lambda_recover(M, L, 2)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.integers(0, 4))
def test_exact_round_trip(seed, n, deg):
    rng = np.random.default_rng(seed)
    F = exact_poly(rng, n, deg)
    d = 0 if F.is_zero() else F.degree
    assert lambda_recover(M, lambda_transform(M, F), d) == F


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(0, 3))
def test_transform_preserves_hermitian(seed, n, deg):
    rng = np.random.default_rng(seed)
    H = hermitian_exact(rng, n, deg)
    assert lambda_transform(M, H).is_hermitian()


def test_float_round_trip():
    rng = np.random.default_rng(4)
    m = MoebiusMap(cmath.exp(0.3j), -0.5 + 1.5j)
    for _ in range(20):
        c = rng.standard_normal((5, 2, 2)) + 1j * rng.standard_normal((5, 2, 2))
        F = MatrixPoly(c + c.conj().transpose(0, 2, 1), Mode.FLOAT, n=2)
        back = lambda_recover(m, lambda_transform(m, F), 4)
        assert back.distance(F) <= 1e-9 * max(1.0, F.max_abs())


def test_positivity_transfers():
    F = MatrixPoly.from_entries([[sp(0, 1), sp(0)], [sp(0), sp(1, -1)]])
    L = lambda_transform(M, F)
    for t in np.linspace(0, 1, 21):
        z = complex(moebius_apply(M, float(t)))
        assert np.linalg.eigvalsh(L.evaluate(z)).min() >= -1e-12


# --- angles and sets ------------------------------------------------------------------------
def test_angles():
    assert parse_angle("3/2·π") == Fraction(3, 2)
    assert parse_angle("3/2*pi") == Fraction(3, 2)
    assert parse_angle("0.25") == pytest.approx(0.25)
    assert format_angle(Fraction(1, 2)) == "1/2·π"
    assert angle_point(Fraction(1, 2)) == GaussQ(0, 1)
    with pytest.raises(ValueError):
        parse_angle("north")


def test_circle_set_json():
    K = CircleSet([Arc(Fraction(1), Fraction(3, 2))], [Fraction(1, 4)])
    assert CircleSet.from_json(K.to_json()).to_json() == K.to_json()
    with pytest.raises(ValueError, match="arcs\\[0\\]"):
        CircleSet.from_json({"arcs": [{"from_angle": "1"}]})


def test_transfer_of_unit_interval():
    K = transfer_set(M, SemialgSet([Interval(0, 1)]))
    assert K.to_json() == {"arcs": [{"from_angle": "1·π", "to_angle": "3/2·π"}], "points": []}


# --- Corollary conditions ---------------------------------------------------------------------
def test_full_circle_vacuous():
    assert circle_description_check([], CircleSet([Arc(0, 2)]))


def test_transferred_saturated_description_passes():
    S = Description([[0, 1], [1, -1]])
    K = transfer_set(M, SemialgSet([Interval(0, 1)]))
    assert circle_description_check(transfer_description(M, S), K)


def test_squared_generator_fails():
    S = Description([[0, 1], [1, -1]])
    K = transfer_set(M, SemialgSet([Interval(0, 1)]))
    b = transfer_description(M, Description([[0, 0, 1]]))[0]  # x^2 vanishes doubly at 0
    g2 = transfer_description(M, S)[1]
    assert not circle_description_check([b, g2], K)


def test_isolated_point_condition():
    # K = [0, 1] u {2}; generators x, (x - 1)(x - 2), 2 - x
    K = SemialgSet([Interval(0, 1), Point(2)])
    S = Description([[0, 1], [2, -3, 1], [2, -1]])
    CK = transfer_set(M, K)
    rep = circle_description_report(transfer_description(M, S), CK)
    assert rep["ok"] and rep["isolated"][0]["pair"] is not None
    # without 2 - x the point is cut out by a single generator only
    assert not circle_description_check(transfer_description(M, Description([[0, 1], [2, -3, 1]])), CK)
