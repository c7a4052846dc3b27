"""Random instance generators shared by the test modules."""

from fractions import Fraction

import numpy as np

from psdg.gaussq import GaussQ
from psdg.polymat import MatrixPoly, Mode


def small_q(rng, lo=-3, hi=3, den=3):
    return Fraction(int(rng.integers(lo, hi + 1)), int(rng.integers(1, den + 1)))


def gq(rng, imag=True):
    return GaussQ(small_q(rng), small_q(rng) if imag else 0)


def exact_poly(rng, n, deg, imag=True):
    c = np.empty((deg + 1, n, n), dtype=object)
    for idx in np.ndindex(c.shape):
        c[idx] = gq(rng, imag)
    return MatrixPoly(c, Mode.EXACT, n=n)


def hermitian_exact(rng, n, deg, imag=True):
    A = exact_poly(rng, n, deg, imag)
    # A + A^* is Hermitian; keeps entries Gaussian rational
    return A + A.adjoint()


def float_poly(rng, n, deg, real=False):
    c = rng.standard_normal((deg + 1, n, n))
    if not real:
        c = c + 1j * rng.standard_normal((deg + 1, n, n))
    return MatrixPoly(c, Mode.FLOAT, n=n)


def hermitian_square(rng, n, deg, real=False):
    G = float_poly(rng, n, deg, real)
    return G.adjoint() * G
