"""Exact Gaussian rationals (a + bi with a, b in Q).

Backed by gmpy2.mpq for speed; Fraction, int and "p/q" strings are accepted
wherever a rational is expected.
"""
from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

__all__ = ["GaussQ", "to_rational", "to_gaussq", "rational_str"]


def to_rational(value):
    """Coerce int, Fraction, mpq or a "p/q" string to mpq."""
    if type(value) is type(mpq()):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        return mpq(value.strip())
    if isinstance(value, Rational):
        return mpq(int(value.numerator), int(value.denominator))
    if isinstance(value, float):
        if not value.is_integer():
            raise TypeError(f"refusing to coerce non-integral float {value!r} to an exact rational")
        return mpq(int(value))
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def rational_str(q) -> str:
    q = to_rational(q)
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


class GaussQ:
    """Immutable element of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = to_rational(re)
        self.im = to_rational(im)

    @classmethod
    def _raw(cls, re, im):
        z = object.__new__(cls)
        z.re = re
        z.im = im
        return z

    # arithmetic -----------------------------------------------------------
    def __add__(self, o):
        if type(o) is not GaussQ:
            o = _coerce(o)
            if o is NotImplemented:
                return o
        return GaussQ._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        if type(o) is not GaussQ:
            o = _coerce(o)
            if o is NotImplemented:
                return o
        return GaussQ._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, o):
        if type(o) is not GaussQ:
            o = _coerce(o)
            if o is NotImplemented:
                return o
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return GaussQ._raw(a * c, b)
        return GaussQ._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if type(o) is not GaussQ:
            o = _coerce(o)
            if o is NotImplemented:
                return o
        den = o.re * o.re + o.im * o.im
        if not den:
            raise ZeroDivisionError("division by zero in Q(i)")
        a, b, c, d = self.re, self.im, o.re, o.im
        return GaussQ._raw((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (GaussQ._raw(mpq(1), mpq(0)) / self) ** (-k)
        out = GaussQ._raw(mpq(1), mpq(0))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __neg__(self):
        return GaussQ._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self):
        return GaussQ._raw(self.re, -self.im)

    def norm2(self):
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    # comparisons / conversion -------------------------------------------
    def __eq__(self, o):
        if type(o) is not GaussQ:
            o = _coerce(o)
            if o is NotImplemented:
                return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        if not self.im:
            return f"GaussQ({rational_str(self.re)})"
        return f"GaussQ({rational_str(self.re)}, {rational_str(self.im)})"

    def __str__(self):
        if not self.im:
            return rational_str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{rational_str(self.re)}{sign}{rational_str(abs(self.im))}i"


def _coerce(o):
    if type(o) is GaussQ:
        return o
    if isinstance(o, complex):
        return GaussQ(_float_exact(o.real), _float_exact(o.imag))
    try:
        return GaussQ._raw(to_rational(o), mpq(0))
    except TypeError:
        return NotImplemented


def _float_exact(x: float):
    if not float(x).is_integer():
        raise TypeError(f"refusing to coerce non-integral float {x!r} to an exact rational")
    return int(x)


def to_gaussq(value) -> GaussQ:
    """Coerce ints, rationals, GaussQ, (re, im) pairs or integral complex to GaussQ."""
    if type(value) is GaussQ:
        return value
    if isinstance(value, (tuple, list)) and len(value) == 2:
        return GaussQ(value[0], value[1])
    z = _coerce(value)
    if z is NotImplemented:
        raise TypeError(f"cannot interpret {value!r} as a Gaussian rational")
    return z
