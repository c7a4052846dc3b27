from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import hermitian_exact
from psdg.gaussq import GaussQ
from psdg.polymat import MatrixPoly
from psdg.reduction import (
    PivotCase,
    ReductionError,
    factor_out_root,
    h2f_reduce,
    pivot_unitaries,
    schur_split,
    select_pivot,
)
from psdg.semialg import Description, Interval, SemialgSet

HALF = GaussQ(Fraction(1, 2))
I_ = GaussQ(0, 1)


def sp(*c):
    return MatrixPoly.scalar([GaussQ(v) if not isinstance(v, GaussQ) else v for v in c])


x = sp(0, 1)
ZERO = sp(0)


def p_formula(G, k, l):
    g = lambda a, b: G.entry(a - 1, b - 1)  # noqa: E731
    if k == l:
        return g(k, k)
    return (g(k, l) + g(l, k) + g(k, k) + g(l, l)).scale(HALF)


def r_formula(G, k, l):
    g = lambda a, b: G.entry(a - 1, b - 1)  # noqa: E731
    if k == l:
        return g(k, k)
    return (g(l, k) - g(k, l)).scale(I_ * HALF) + (g(k, k) + g(l, l)).scale(HALF)


# --- pivot unitaries ---------------------------------------------------------------
def test_pivot_unitaries_examples():
    U, V = pivot_unitaries(2, 1, 1)
    assert U.t == (0, 0) and np.all(U.M == np.array([[GaussQ(1), GaussQ(0)], [GaussQ(0), GaussQ(1)]]))
    U, _ = pivot_unitaries(3, 2, 2)
    expect = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
    assert all(U.M[i, j] == GaussQ(expect[i][j]) for i in range(3) for j in range(3))
    rng = np.random.default_rng(1)
    G = hermitian_exact(rng, 2, 2)
    U, _ = pivot_unitaries(2, 1, 2)
    assert U.top_left(G) == p_formula(G, 1, 2)


def test_pivot_unitaries_range():
    with pytest.raises(ValueError):
        pivot_unitaries(3, 2, 1)
    with pytest.raises(ValueError):
        pivot_unitaries(3, 1, 4)


def test_pivot_unitaries_are_unitary():
    for n in range(1, 7):
        for k in range(1, n + 1):
            for l in range(k, n + 1):
                U, V = pivot_unitaries(n, k, l)
                assert U.is_unitary() and V.is_unitary()
                assert all(z.im == 0 for z in U.M.flat)
                assert np.allclose(U.to_float() @ U.to_float().conj().T, np.eye(n))


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(0, 4), st.data())
def test_pivot_entries_match_closed_forms(seed, n, deg, data):
    rng = np.random.default_rng(seed)
    G = hermitian_exact(rng, n, deg)
    k = data.draw(st.integers(1, n))
    l = data.draw(st.integers(k, n))
    U, V = pivot_unitaries(n, k, l)
    assert U.top_left(G) == p_formula(G, k, l)
    assert V.top_left(G) == r_formula(G, k, l)


# --- Schur split ----------------------------------------------------------------------
def test_schur_split_examples():
    F = MatrixPoly.from_entries([[sp(1), ZERO], [ZERO, sp(2, 1)]])
    d, D, _, _ = schur_split(F)
    assert d == sp(1) and D == sp(2, 1)
    F = MatrixPoly.from_entries([[x, sp(1)], [sp(1), x]])
    d, D, _, _ = schur_split(F)
    assert d == sp(0, 0, 0, 1)
    assert D == sp(0, -1, 0, 1)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(0, 4))
def test_schur_identities_hold_exactly(seed, n, deg):
    rng = np.random.default_rng(seed)
    F = hermitian_exact(rng, n, deg)
    # schur_split checks both congruences itself and raises otherwise
    d, D, Lp, Lm = schur_split(F)
    a = F.entry(0, 0)
    assert Lm == Lp.adjoint()
    mid = MatrixPoly.from_entries([[d] + [ZERO] * (n - 1)] + [[ZERO] * n for _ in range(n - 1)])
    assert (a * a * a * a) * F == Lm * (mid + _embed(D, n)) * Lp


def _embed(D, n):
    rows = [[ZERO] * n]
    for i in range(n - 1):
        rows.append([ZERO] + [D.entry(i, j) for j in range(n - 1)])
    return MatrixPoly.from_entries(rows)


def test_schur_split_rejects_non_hermitian():
    F = MatrixPoly.from_entries([[x, sp(1)], [ZERO, x]])
    with pytest.raises(ValueError):
        schur_split(F)


# --- roots and pivots -------------------------------------------------------------------
def test_factor_out_root_examples():
    I2 = MatrixPoly.identity(2)
    c, m, G = factor_out_root((x * x) * I2, 0)
    assert c == x and m == 2 and G == I2
    c, m, G = factor_out_root(sp(1, 0, 1) * I2, 1j)
    assert c == sp(1, 0, 1) and m == 1 and G == I2
    c, m, G = factor_out_root(I2, Fraction(3, 2))
    assert m == 0 and G == I2


def test_select_pivot_examples():
    pd = select_pivot(MatrixPoly.from_entries([[sp(1), ZERO], [ZERO, x]]), 0)
    assert pd.case is PivotCase.CASE1 and pd.k0 == 1 and pd.pivot == sp(1)
    pd = select_pivot(MatrixPoly.constant([[0, 1], [1, 0]]), 0)
    assert pd.case is PivotCase.CASE2_P and pd.pivot == sp(1)
    G = MatrixPoly.from_entries([[ZERO, sp(I_)], [sp(-I_), ZERO]])
    pd = select_pivot(G, 0)
    assert pd.case is PivotCase.CASE2_R and pd.pivot == sp(1)
    with pytest.raises(ValueError):
        select_pivot(x * MatrixPoly.identity(2), 0)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(0, 3),
       st.sampled_from([0, Fraction(1, 2), 1j, complex(1, 2)]), st.booleans())
def test_select_pivot_never_fails(seed, n, deg, x0, zero_diag):
    rng = np.random.default_rng(seed)
    G = hermitian_exact(rng, n, deg)
    if zero_diag:
        # force the off-diagonal cases
        rows = [[ZERO if i == j else G.entry(i, j) for j in range(n)] for i in range(n)]
        G = MatrixPoly.from_entries(rows)
    if not any(G.evaluate(x0).flat):
        return
    pd = select_pivot(G, x0)
    assert any(pd.pivot.evaluate(x0).flat)
    assert pd.T.top_left(G) == pd.pivot


# --- h^2 F ---------------------------------------------------------------------------------
K01 = SemialgSet([Interval(0, 1)])
S01 = Description([[0, 1], [1, -1]])


def test_h2f_scalar_and_zero():
    h, plan = h2f_reduce(sp(0, 1), K01, S01, Fraction(1, 2))
    assert h == sp(1)
    assert plan.verify()["ok"]
    h, plan = h2f_reduce(MatrixPoly.zero(2), K01, S01, 0)
    assert h == sp(1)


@pytest.mark.parametrize("x0", [0, Fraction(1, 2), 1j])
def test_h2f_diagonal_example(x0):
    F = MatrixPoly.from_entries([[x, ZERO], [ZERO, sp(1, -1)]])
    h, plan = h2f_reduce(F, K01, S01, x0)
    assert any(h.evaluate(x0).flat)
    assert h.degree <= plan.notes["degree_bound"] == 8
    assert plan.verify()["ok"]


def test_h2f_rejects_non_psd():
    F = MatrixPoly.from_entries([[x, ZERO], [ZERO, sp(-1)]])
    with pytest.raises(ReductionError):
        h2f_reduce(F, K01, S01, 0)


def test_h2f_off_diagonal_pivot():
    F = MatrixPoly.from_entries([[sp(1, 0, 1), x], [x, sp(1, 0, 1)]])
    h, plan = h2f_reduce(F, K01, S01, 1j)
    assert any(h.evaluate(1j).flat)
    assert plan.steps[0].pivot_data.case is PivotCase.CASE2_P
    assert plan.verify()["ok"]
