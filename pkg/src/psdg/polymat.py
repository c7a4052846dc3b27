"""Univariate matrix polynomials over C with the involution fixing x.

Two arithmetic modes share one container:

* ``Mode.EXACT``: coefficients are :class:`~psdg.gaussq.GaussQ` stored in
  object arrays; every operation is exact.
* ``Mode.FLOAT``: coefficients are complex128.

Coefficient stacks have shape ``(deg + 1, n, n)``; index ``m`` holds the
coefficient of ``x**m``. Trailing zero matrices are stripped on construction,
so the zero polynomial has an empty stack and degree ``-inf``.
"""
from __future__ import annotations

import math
from enum import Enum
from fractions import Fraction
from numbers import Number

import numpy as np

from .gaussq import GaussQ, rational_str, to_gaussq, to_rational

__all__ = [
    "Mode",
    "MatrixPoly",
    "LaurentMatrixPoly",
    "NEG_INF",
    "add",
    "mul",
    "adjoint",
    "is_hermitian",
    "evaluate",
    "determinant",
    "affine_substitute",
    "reversal",
    "laurent_adjoint",
]

NEG_INF = -math.inf
FLOAT_HERMITIAN_TOL = 1e-10


class Mode(str, Enum):
    EXACT = "exact"
    FLOAT = "float"


_ZERO = GaussQ(0)
_ONE = GaussQ(1)


def _zero(mode):
    return _ZERO if mode is Mode.EXACT else 0j


def _one(mode):
    return _ONE if mode is Mode.EXACT else 1 + 0j


def _as_exact_array(a) -> np.ndarray:
    a = np.asarray(a, dtype=object)
    out = np.empty(a.shape, dtype=object)
    flat_in = a.reshape(-1)
    flat_out = out.reshape(-1)
    for i, v in enumerate(flat_in):
        flat_out[i] = to_gaussq(v)
    return out


def _as_float_array(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        return np.vectorize(complex, otypes=[complex])(a) if a.size else a.astype(complex)
    return a.astype(complex)


def _scalar_for(mode, c):
    if mode is Mode.EXACT:
        return to_gaussq(c)
    return complex(c)


def _mat_is_zero(m: np.ndarray) -> bool:
    if m.dtype == object:
        return not any(m.flat)
    return not m.any()


# --------------------------------------------------------------------------
# scalar (1-D) helpers shared by determinant, division and the Sturm code
# --------------------------------------------------------------------------
def _trim1(c: np.ndarray) -> np.ndarray:
    k = len(c)
    if c.dtype == object:
        while k and not c[k - 1]:
            k -= 1
    else:
        while k and c[k - 1] == 0:
            k -= 1
    return c[:k]


def _mul1(a, b):
    if len(a) == 0 or len(b) == 0:
        return a[:0]
    return _trim1(np.convolve(a, b))


def _sub1(a, b):
    n = max(len(a), len(b))
    out = np.full(n, _zero(Mode.EXACT if a.dtype == object else Mode.FLOAT), dtype=a.dtype)
    out[: len(a)] = out[: len(a)] + a
    out[: len(b)] = out[: len(b)] - b
    return _trim1(out)


def _divmod1(a, b):
    """Polynomial long division a = q*b + r (coefficients low -> high)."""
    b = _trim1(b)
    if len(b) == 0:
        raise ZeroDivisionError("polynomial division by zero")
    a = _trim1(a.copy())
    if len(a) < len(b):
        return a[:0], a
    q = np.full(len(a) - len(b) + 1, a[0] * 0, dtype=a.dtype)
    lead = b[-1]
    r = a.copy()
    for k in range(len(a) - len(b), -1, -1):
        coef = r[k + len(b) - 1] / lead
        q[k] = coef
        if coef:
            r[k : k + len(b)] = r[k : k + len(b)] - coef * b
    return _trim1(q), _trim1(r[: len(b) - 1])


# --------------------------------------------------------------------------
class MatrixPoly:
    """Immutable n x n matrix polynomial in one variable."""

    __slots__ = ("_c", "mode", "n")

    def __init__(self, coeffs, mode: Mode | str | None = None, n: int | None = None):
        if isinstance(coeffs, np.ndarray):
            arr = coeffs
        else:
            coeffs = list(coeffs)
            if not coeffs:
                if n is None:
                    raise ValueError("empty coefficient list needs an explicit n")
                arr = np.zeros((0, n, n), dtype=object if mode in (Mode.EXACT, "exact", None) else complex)
            else:
                arr = np.array([np.asarray(c, dtype=object if _looks_exact(c) else None) for c in coeffs], dtype=object)
                if arr.ndim == 1:
                    arr = arr.reshape(-1, 1, 1)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1, 1)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError(f"coefficients must have shape (m, n, n), got {arr.shape}")
        if n is not None and arr.shape[0] and arr.shape[1] != n:
            raise ValueError(f"coefficient size {arr.shape[1]} does not match n={n}")
        if mode is None:
            mode = Mode.EXACT if arr.dtype == object and _all_exactish(arr) else Mode.FLOAT
        mode = Mode(mode)
        arr = _as_exact_array(arr) if mode is Mode.EXACT else _as_float_array(arr)
        k = arr.shape[0]
        while k and _mat_is_zero(arr[k - 1]):
            k -= 1
        arr = arr[:k].copy()
        arr.flags.writeable = False
        self._c = arr
        self.mode = mode
        self.n = arr.shape[1] if arr.shape[1] else (n or 0)
        if self.n == 0:
            raise ValueError("matrix size must be positive")

    # constructors --------------------------------------------------------
    @classmethod
    def zero(cls, n: int, mode: Mode = Mode.EXACT) -> "MatrixPoly":
        dtype = object if Mode(mode) is Mode.EXACT else complex
        return cls(np.zeros((0, n, n), dtype=dtype), mode, n=n)

    @classmethod
    def identity(cls, n: int, mode: Mode = Mode.EXACT) -> "MatrixPoly":
        return cls.constant(np.eye(n, dtype=int), mode)

    @classmethod
    def constant(cls, matrix, mode: Mode | None = None) -> "MatrixPoly":
        m = np.asarray(matrix, dtype=object if _looks_exact(matrix) else None)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        return cls(m[None, ...], mode)

    @classmethod
    def scalar(cls, coeffs, mode: Mode | None = None) -> "MatrixPoly":
        """1 x 1 polynomial from a low-to-high coefficient list."""
        coeffs = list(coeffs)
        if not coeffs:
            return cls.zero(1, mode or Mode.EXACT)
        if mode is None:
            mode = Mode.EXACT if _all_exactish(np.asarray(coeffs, dtype=object)) else Mode.FLOAT
        return cls(np.asarray(coeffs, dtype=object).reshape(-1, 1, 1), mode)

    @classmethod
    def monomial(cls, degree: int, n: int = 1, mode: Mode = Mode.EXACT) -> "MatrixPoly":
        mode = Mode(mode)
        dtype = object if mode is Mode.EXACT else complex
        c = np.zeros((degree + 1, n, n), dtype=int).astype(dtype)
        c[degree] = np.eye(n, dtype=int)
        return cls(c, mode)

    @classmethod
    def from_entries(cls, rows) -> "MatrixPoly":
        """Assemble from a nested list of scalar (n = 1) polynomials."""
        rows = [list(r) for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("entry grid must be square")
        mode = Mode.FLOAT if any(p.mode is Mode.FLOAT for r in rows for p in r) else Mode.EXACT
        length = max((len(p._c) for r in rows for p in r), default=0)
        dtype = object if mode is Mode.EXACT else complex
        c = np.empty((length, n, n), dtype=dtype)
        c[...] = _zero(mode)
        for i, r in enumerate(rows):
            for j, p in enumerate(r):
                if p.n != 1:
                    raise ValueError("entries must be scalar polynomials")
                pc = p.coerce(mode)._c[:, 0, 0]
                c[: len(pc), i, j] = pc
        return cls(c, mode, n=n)

    # basic properties ----------------------------------------------------
    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self):
        return len(self._c) - 1 if len(self._c) else NEG_INF

    def is_zero(self) -> bool:
        return len(self._c) == 0

    def coeff(self, m: int) -> np.ndarray:
        if 0 <= m < len(self._c):
            return self._c[m]
        out = np.empty((self.n, self.n), dtype=self._c.dtype)
        out[...] = _zero(self.mode)
        return out

    def padded(self, length: int) -> np.ndarray:
        """Coefficient stack padded with zeros to ``length`` terms."""
        if length < len(self._c):
            raise ValueError("cannot pad below the current length")
        out = np.empty((length, self.n, self.n), dtype=self._c.dtype)
        out[...] = _zero(self.mode)
        out[: len(self._c)] = self._c
        return out

    def entry(self, i: int, j: int) -> "MatrixPoly":
        return MatrixPoly(self._c[:, i : i + 1, j : j + 1].copy(), self.mode, n=1)

    def block(self, rows, cols) -> "MatrixPoly":
        rows = list(rows)
        cols = list(cols)
        if len(rows) != len(cols):
            raise ValueError("only square blocks are matrix polynomials")
        c = self._c[:, rows][:, :, cols]
        return MatrixPoly(c.copy(), self.mode, n=len(rows))

    def coerce(self, mode: Mode) -> "MatrixPoly":
        mode = Mode(mode)
        if mode is self.mode:
            return self
        if mode is Mode.FLOAT:
            return self.to_float()
        raise ValueError("FLOAT -> EXACT needs rationalize() with an explicit denominator bound")

    def to_float(self) -> "MatrixPoly":
        if self.mode is Mode.FLOAT:
            return self
        return MatrixPoly(_as_float_array(self._c), Mode.FLOAT, n=self.n)

    def rationalize(self, max_denominator: int) -> "MatrixPoly":
        """Snap FLOAT coefficients to Gaussian rationals with bounded denominators."""
        if self.mode is Mode.EXACT:
            return self
        out = np.empty(self._c.shape, dtype=object)
        for idx, v in np.ndenumerate(self._c):
            out[idx] = GaussQ(
                Fraction(float(v.real)).limit_denominator(max_denominator),
                Fraction(float(v.imag)).limit_denominator(max_denominator),
            )
        return MatrixPoly(out, Mode.EXACT, n=self.n)

    # arithmetic ------------------------------------------------------------
    def _check_compatible(self, other: "MatrixPoly"):
        if self.n != other.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")
        if self.mode is not other.mode:
            raise ValueError(f"mode mismatch: {self.mode.value} vs {other.mode.value}")

    def __add__(self, other):
        if not isinstance(other, MatrixPoly):
            return NotImplemented
        self._check_compatible(other)
        length = max(len(self._c), len(other._c))
        return MatrixPoly(self.padded(length) + other.padded(length), self.mode, n=self.n)

    def __sub__(self, other):
        if not isinstance(other, MatrixPoly):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return MatrixPoly(-self._c if len(self._c) else self._c, self.mode, n=self.n)

    def __mul__(self, other):
        if isinstance(other, MatrixPoly):
            return _poly_mul(self, other)
        if isinstance(other, (Number, GaussQ)) or _is_mpq(other):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Number, GaussQ)) or _is_mpq(other):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "MatrixPoly":
        c = _scalar_for(self.mode, c)
        if not len(self._c):
            return self
        return MatrixPoly(self._c * c, self.mode, n=self.n)

    def __pow__(self, k: int) -> "MatrixPoly":
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = MatrixPoly.identity(self.n, self.mode)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, MatrixPoly):
            return NotImplemented
        if self.n != other.n or self._c.shape != other._c.shape:
            return False
        if self.mode is Mode.EXACT and other.mode is Mode.EXACT:
            return all(a == b for a, b in zip(self._c.flat, other._c.flat))
        return bool(np.array_equal(self.to_float()._c, other.to_float()._c))

    __hash__ = None

    def distance(self, other: "MatrixPoly") -> float:
        """Coefficientwise max-abs difference, computed in floating point."""
        if self.n != other.n:
            raise ValueError("size mismatch")
        a, b = self.to_float(), other.to_float()
        length = max(len(a._c), len(b._c))
        if length == 0:
            return 0.0
        return float(np.max(np.abs(a.padded(length) - b.padded(length))))

    def max_abs(self) -> float:
        if not len(self._c):
            return 0.0
        return float(np.max(np.abs(self.to_float()._c)))

    def trim(self, tol: float) -> "MatrixPoly":
        """FLOAT only: zero coefficients below ``tol`` in magnitude."""
        if self.mode is Mode.EXACT:
            return self
        c = self._c.copy()
        c[np.abs(c) < tol] = 0
        return MatrixPoly(c, Mode.FLOAT, n=self.n)

    # involution, evaluation and substitutions ------------------------------
    def adjoint(self) -> "MatrixPoly":
        if not len(self._c):
            return self
        return MatrixPoly(np.conjugate(self._c).transpose(0, 2, 1), self.mode, n=self.n)

    def is_hermitian(self, tol: float = FLOAT_HERMITIAN_TOL) -> bool:
        adj = self.adjoint()
        if self.mode is Mode.EXACT:
            return adj == self
        return self.distance(adj) <= tol

    def evaluate(self, x0) -> np.ndarray:
        x0 = _scalar_for(self.mode, x0)
        out = np.empty((self.n, self.n), dtype=self._c.dtype)
        out[...] = _zero(self.mode)
        for m in range(len(self._c) - 1, -1, -1):
            out = out * x0 + self._c[m]
        return out

    __call__ = evaluate

    def affine_substitute(self, alpha, beta) -> "MatrixPoly":
        """Return A(alpha*x + beta)."""
        alpha = _scalar_for(self.mode, alpha)
        beta = _scalar_for(self.mode, beta)
        if not alpha:
            raise ValueError("affine substitution needs alpha != 0")
        if not len(self._c):
            return self
        acc = self._c[-1:].copy()
        for m in range(len(self._c) - 2, -1, -1):
            nxt = np.empty((len(acc) + 1, self.n, self.n), dtype=self._c.dtype)
            nxt[...] = _zero(self.mode)
            nxt[1:] = nxt[1:] + acc * alpha
            nxt[:-1] = nxt[:-1] + acc * beta
            nxt[0] = nxt[0] + self._c[m]
            acc = nxt
        return MatrixPoly(acc, self.mode, n=self.n)

    def reversal(self, D: int) -> "MatrixPoly":
        """Return x**D * A(1/x)."""
        if D < self.degree:
            raise ValueError(f"reversal degree {D} below polynomial degree {self.degree}")
        if not len(self._c):
            return self
        return MatrixPoly(self.padded(D + 1)[::-1].copy(), self.mode, n=self.n)

    def shift(self, k: int) -> "MatrixPoly":
        """Multiply by x**k."""
        if not len(self._c) or k == 0:
            return self
        pad = np.empty((k, self.n, self.n), dtype=self._c.dtype)
        pad[...] = _zero(self.mode)
        return MatrixPoly(np.concatenate([pad, self._c]), self.mode, n=self.n)

    def derivative(self) -> "MatrixPoly":
        if len(self._c) <= 1:
            return MatrixPoly.zero(self.n, self.mode)
        ks = np.arange(1, len(self._c))
        if self.mode is Mode.EXACT:
            c = np.array([self._c[k] * GaussQ(int(k)) for k in ks], dtype=object)
        else:
            c = self._c[1:] * ks[:, None, None]
        return MatrixPoly(c, self.mode, n=self.n)

    def scalar_coeffs(self) -> np.ndarray:
        if self.n != 1:
            raise ValueError("not a scalar polynomial")
        return self._c[:, 0, 0]

    def divmod_scalar(self, p: "MatrixPoly"):
        """Divide every entry by the scalar polynomial ``p``; returns (quotient, remainder)."""
        if p.n != 1:
            raise ValueError("divisor must be scalar")
        p = p.coerce(self.mode)
        pc = p.scalar_coeffs()
        if not len(self._c):
            return self, self
        qlen = max(len(self._c) - len(pc) + 1, 0)
        dtype = self._c.dtype
        q = np.empty((max(qlen, 0), self.n, self.n), dtype=dtype)
        q[...] = _zero(self.mode)
        r = np.empty((len(self._c), self.n, self.n), dtype=dtype)
        r[...] = _zero(self.mode)
        for i in range(self.n):
            for j in range(self.n):
                qi, ri = _divmod1(self._c[:, i, j], pc)
                q[: len(qi), i, j] = qi
                r[: len(ri), i, j] = ri
        return MatrixPoly(q, self.mode, n=self.n), MatrixPoly(r, self.mode, n=self.n)

    def determinant(self) -> "MatrixPoly":
        return determinant(self)

    def real_part_entries_are_real(self) -> bool:
        if self.mode is Mode.EXACT:
            return all(z.is_real() for z in self._c.flat)
        return bool(np.all(self._c.imag == 0))

    # serialisation ------------------------------------------------------------
    def to_json(self) -> dict:
        if self.mode is Mode.EXACT:
            coeffs = [
                [[[rational_str(z.re), rational_str(z.im)] for z in row] for row in mat] for mat in self._c
            ]
        else:
            coeffs = [[[[float(z.real), float(z.imag)] for z in row] for row in mat] for mat in self._c]
        return {"n": self.n, "mode": self.mode.value, "coeffs": coeffs}

    @classmethod
    def from_json(cls, data) -> "MatrixPoly":
        if not isinstance(data, dict):
            raise ValueError("polynomial JSON must be an object")
        for key in ("n", "mode", "coeffs"):
            if key not in data:
                raise ValueError(f"polynomial JSON missing field '{key}'")
        n = data["n"]
        if not isinstance(n, int) or n <= 0:
            raise ValueError("field 'n' must be a positive integer")
        try:
            mode = Mode(data["mode"])
        except ValueError:
            raise ValueError("field 'mode' must be 'exact' or 'float'") from None
        coeffs = data["coeffs"]
        if not isinstance(coeffs, list):
            raise ValueError("field 'coeffs' must be a list")
        dtype = object if mode is Mode.EXACT else complex
        arr = np.empty((len(coeffs), n, n), dtype=dtype)
        for m, mat in enumerate(coeffs):
            if len(mat) != n or any(len(row) != n for row in mat):
                raise ValueError(f"field 'coeffs[{m}]' must be an {n}x{n} matrix")
            for i, row in enumerate(mat):
                for j, pair in enumerate(row):
                    if not (isinstance(pair, list) and len(pair) == 2):
                        raise ValueError(f"field 'coeffs[{m}][{i}][{j}]' must be a [re, im] pair")
                    try:
                        if mode is Mode.EXACT:
                            arr[m, i, j] = GaussQ(_json_rational(pair[0]), _json_rational(pair[1]))
                        else:
                            arr[m, i, j] = complex(float(pair[0]), float(pair[1]))
                    except (TypeError, ValueError):
                        raise ValueError(f"field 'coeffs[{m}][{i}][{j}]' is not a valid number") from None
        return cls(arr, mode, n=n)

    def __repr__(self):
        return f"MatrixPoly(n={self.n}, degree={self.degree}, mode={self.mode.value})"

    def __str__(self):
        if self.n == 1:
            terms = []
            for m, z in enumerate(self.scalar_coeffs()):
                if z:
                    terms.append(f"({z})x^{m}" if m else f"({z})")
            return " + ".join(terms) or "0"
        return repr(self)


def _json_rational(v):
    if isinstance(v, str):
        return to_rational(v)
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    raise TypeError


def _is_mpq(x) -> bool:
    return type(x).__name__ in ("mpq", "mpz")


def _looks_exact(c) -> bool:
    a = np.asarray(c, dtype=object)
    return _all_exactish(a)


def _all_exactish(a: np.ndarray) -> bool:
    for v in a.flat:
        if isinstance(v, (GaussQ, Fraction)) or _is_mpq(v):
            continue
        if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
            continue
        if isinstance(v, str):
            continue
        return False
    return True


def _poly_mul(A: MatrixPoly, B: MatrixPoly) -> MatrixPoly:
    if A.mode is not B.mode:
        raise ValueError(f"mode mismatch: {A.mode.value} vs {B.mode.value}")
    if A.n != B.n and A.n != 1 and B.n != 1:
        raise ValueError(f"size mismatch: {A.n} vs {B.n}")
    n = max(A.n, B.n)
    if A.is_zero() or B.is_zero():
        return MatrixPoly.zero(n, A.mode)
    a, b = A._c, B._c
    la, lb = len(a), len(b)
    out = np.empty((la + lb - 1, n, n), dtype=a.dtype)
    out[...] = _zero(A.mode)
    if A.n == 1 and B.n > 1:
        for i in range(la):
            out[i : i + lb] = out[i : i + lb] + b * a[i, 0, 0]
    elif B.n == 1 and A.n > 1:
        for j in range(lb):
            out[j : j + la] = out[j : j + la] + a * b[j, 0, 0]
    elif la <= lb:
        for i in range(la):
            out[i : i + lb] = out[i : i + lb] + np.matmul(a[i], b)
    else:
        for j in range(lb):
            out[j : j + la] = out[j : j + la] + np.matmul(a, b[j])
    return MatrixPoly(out, A.mode, n=n)


def determinant(A: MatrixPoly) -> MatrixPoly:
    """Determinant via fraction-free (Bareiss) elimination over the polynomial ring."""
    n = A.n
    if n > 8:
        raise ValueError("determinant is limited to n <= 8")
    mode = A.mode
    L = max(len(A.coeffs), 1)
    M = [[_trim1(A.padded(L)[:, i, j].copy()) for j in range(n)] for i in range(n)]
    one = np.array([_one(mode)], dtype=A.coeffs.dtype)
    prev = one
    sign = 1
    for k in range(n - 1):
        if len(M[k][k]) == 0:
            swap = next((r for r in range(k + 1, n) if len(M[r][k])), None)
            if swap is None:
                return MatrixPoly.zero(1, mode)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _sub1(_mul1(M[i][j], M[k][k]), _mul1(M[i][k], M[k][j]))
                q, _ = _divmod1(num, prev) if len(num) else (num, num)
                M[i][j] = q
        prev = M[k][k]
    det = M[n - 1][n - 1]
    if sign < 0:
        det = -det
    if len(det) == 0:
        return MatrixPoly.zero(1, mode)
    return MatrixPoly(det.reshape(-1, 1, 1), mode, n=1)


# module-level spellings of the operations -------------------------------------
def add(A: MatrixPoly, B: MatrixPoly) -> MatrixPoly:
    return A + B


def mul(A: MatrixPoly, B: MatrixPoly) -> MatrixPoly:
    return A * B


def adjoint(A: MatrixPoly) -> MatrixPoly:
    return A.adjoint()


def is_hermitian(A: MatrixPoly, tol: float = FLOAT_HERMITIAN_TOL) -> bool:
    return A.is_hermitian(tol)


def evaluate(A: MatrixPoly, x0) -> np.ndarray:
    return A.evaluate(x0)


def affine_substitute(A: MatrixPoly, alpha, beta) -> MatrixPoly:
    return A.affine_substitute(alpha, beta)


def reversal(A: MatrixPoly, D: int) -> MatrixPoly:
    return A.reversal(D)


# --------------------------------------------------------------------------
class LaurentMatrixPoly:
    """n x n matrix Laurent polynomial: finitely many integer exponents."""

    __slots__ = ("_c", "mode", "n")

    def __init__(self, coeffs: dict, n: int, mode: Mode | str = Mode.EXACT):
        mode = Mode(mode)
        clean = {}
        for e, m in coeffs.items():
            m = np.asarray(m, dtype=object if mode is Mode.EXACT else complex)
            if m.ndim == 0:
                m = m.reshape(1, 1)
            if m.shape != (n, n):
                raise ValueError(f"coefficient at exponent {e} has shape {m.shape}, expected {(n, n)}")
            m = _as_exact_array(m) if mode is Mode.EXACT else _as_float_array(m)
            if not _mat_is_zero(m):
                m.flags.writeable = False
                clean[int(e)] = m
        self._c = dict(sorted(clean.items()))
        self.n = n
        self.mode = mode

    @classmethod
    def from_poly(cls, P: MatrixPoly, shift: int = 0) -> "LaurentMatrixPoly":
        return cls({m + shift: c for m, c in enumerate(P.coeffs)}, P.n, P.mode)

    @property
    def coeffs(self) -> dict:
        return dict(self._c)

    def coeff(self, e: int) -> np.ndarray:
        if e in self._c:
            return self._c[e]
        out = np.empty((self.n, self.n), dtype=object if self.mode is Mode.EXACT else complex)
        out[...] = _zero(self.mode)
        return out

    def is_zero(self) -> bool:
        return not self._c

    @property
    def min_exp(self):
        return min(self._c) if self._c else 0

    @property
    def max_exp(self):
        return max(self._c) if self._c else 0

    def adjoint(self) -> "LaurentMatrixPoly":
        return LaurentMatrixPoly({-e: np.conjugate(m).T for e, m in self._c.items()}, self.n, self.mode)

    def is_hermitian(self, tol: float = FLOAT_HERMITIAN_TOL) -> bool:
        adj = self.adjoint()
        if self.mode is Mode.EXACT:
            return adj == self
        return self.distance(adj) <= tol

    def __add__(self, other):
        if not isinstance(other, LaurentMatrixPoly):
            return NotImplemented
        _check_laurent(self, other)
        out = dict(self._c)
        for e, m in other._c.items():
            out[e] = out[e] + m if e in out else m
        return LaurentMatrixPoly(out, self.n, self.mode)

    def __neg__(self):
        return LaurentMatrixPoly({e: -m for e, m in self._c.items()}, self.n, self.mode)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LaurentMatrixPoly):
            _check_laurent(self, other)
            out: dict = {}
            for e1, m1 in self._c.items():
                for e2, m2 in other._c.items():
                    p = m1 @ m2
                    out[e1 + e2] = out[e1 + e2] + p if (e1 + e2) in out else p
            return LaurentMatrixPoly(out, self.n, self.mode)
        if isinstance(other, (Number, GaussQ)) or _is_mpq(other):
            c = _scalar_for(self.mode, other)
            return LaurentMatrixPoly({e: m * c for e, m in self._c.items()}, self.n, self.mode)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LaurentMatrixPoly):
            return NotImplemented
        if self.n != other.n or set(self._c) != set(other._c):
            return False
        for e in self._c:
            a, b = self._c[e], other._c[e]
            if a.dtype == object and b.dtype == object:
                if not all(x == y for x, y in zip(a.flat, b.flat)):
                    return False
            elif not np.array_equal(_as_float_array(a), _as_float_array(b)):
                return False
        return True

    __hash__ = None

    def distance(self, other: "LaurentMatrixPoly") -> float:
        keys = set(self._c) | set(other._c)
        if not keys:
            return 0.0
        return max(
            float(np.max(np.abs(_as_float_array(self.coeff(e)) - _as_float_array(other.coeff(e))))) for e in keys
        )

    def to_float(self) -> "LaurentMatrixPoly":
        if self.mode is Mode.FLOAT:
            return self
        return LaurentMatrixPoly({e: _as_float_array(m) for e, m in self._c.items()}, self.n, Mode.FLOAT)

    def evaluate(self, z) -> np.ndarray:
        if self.mode is Mode.EXACT and isinstance(z, (GaussQ, int, Fraction)):
            z = to_gaussq(z)
            out = np.empty((self.n, self.n), dtype=object)
            out[...] = _ZERO
            for e, m in self._c.items():
                out = out + m * (z**e)
            return out
        z = complex(z)
        out = np.zeros((self.n, self.n), dtype=complex)
        for e, m in self._c.items():
            out += _as_float_array(m) * z**e
        return out

    __call__ = evaluate

    def derivative(self) -> "LaurentMatrixPoly":
        out = {}
        for e, m in self._c.items():
            if e:
                out[e - 1] = m * (GaussQ(e) if self.mode is Mode.EXACT else e)
        return LaurentMatrixPoly(out, self.n, self.mode)

    def __repr__(self):
        return f"LaurentMatrixPoly(n={self.n}, exponents=[{self.min_exp}, {self.max_exp}], mode={self.mode.value})"


def _check_laurent(a: LaurentMatrixPoly, b: LaurentMatrixPoly):
    if a.n != b.n:
        raise ValueError("size mismatch")
    if a.mode is not b.mode:
        raise ValueError("mode mismatch")


def laurent_adjoint(A: LaurentMatrixPoly) -> LaurentMatrixPoly:
    return A.adjoint()
