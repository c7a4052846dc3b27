"""Transfer between the real line and the unit circle.

A Moebius map lambda(x) = z0 (x - w0)/(x - conj w0) sends the extended real
line onto the unit circle; the Lambda transform turns a matrix polynomial in
x into a Laurent matrix polynomial in z, and back.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .certsearch import DenominatorResult, ModuleKind, denominator_search
from .gaussq import GaussQ, rational_str, to_gaussq
from .polymat import LaurentMatrixPoly, MatrixPoly, Mode
from .semialg import Description, Interval, Point, SemialgSet, natural_description

__all__ = [
    "MoebiusMap",
    "moebius_apply",
    "moebius_inverse",
    "lambda_transform",
    "lambda_recover",
    "Arc",
    "parse_angle",
    "format_angle",
    "CircleSet",
    "transfer_description",
    "transfer_set",
    "circle_description_check",
    "circle_description_report",
    "denominator_kw",
]

UNIT_TOL = 1e-12


def _try_exact(v):
    if isinstance(v, GaussQ):
        return v
    try:
        return to_gaussq(v)
    except TypeError:
        return None


@dataclass(frozen=True)
class MoebiusMap:
    z0: object = 1
    w0: object = 1j

    def __post_init__(self):
        z0, w0 = _try_exact(self.z0), _try_exact(self.w0)
        if z0 is not None and w0 is not None:
            if z0.norm2() != 1:
                raise ValueError("z0 must have modulus 1")
            if w0.im == 0:
                raise ValueError("w0 must have non-zero imaginary part")
            object.__setattr__(self, "z0", z0)
            object.__setattr__(self, "w0", w0)
            return
        z0c, w0c = complex(self.z0), complex(self.w0)
        if abs(abs(z0c) - 1) > UNIT_TOL:
            raise ValueError("z0 must have modulus 1")
        if w0c.imag == 0:
            raise ValueError("w0 must have non-zero imaginary part")
        object.__setattr__(self, "z0", z0c)
        object.__setattr__(self, "w0", w0c)

    @property
    def exact(self) -> bool:
        return isinstance(self.z0, GaussQ)

    @property
    def mode(self) -> Mode:
        return Mode.EXACT if self.exact else Mode.FLOAT

    def im_w0(self):
        return self.w0.im if self.exact else self.w0.imag

    def to_json(self) -> dict:
        def enc(z):
            if isinstance(z, GaussQ):
                return [rational_str(z.re), rational_str(z.im)]
            return [z.real, z.imag]

        return {"z0": enc(self.z0), "w0": enc(self.w0)}


def _conj(z):
    return z.conjugate()


def moebius_apply(m: MoebiusMap, x):
    """lambda(x); x = inf maps to z0. Exact for exact maps and rational x."""
    if x is None or (isinstance(x, float) and math.isinf(x)):
        return m.z0
    if m.exact:
        xe = _try_exact(x)
        if xe is not None:
            if not xe.is_real():
                raise ValueError("x must be real")
            return m.z0 * (xe - m.w0) / (xe - _conj(m.w0))
    z0, w0 = complex(m.z0), complex(m.w0)
    x = float(x)
    return z0 * (x - w0) / (x - w0.conjugate())


def moebius_inverse(m: MoebiusMap, z):
    """(z conj(w0) - z0 w0)/(z - z0); z = z0 maps to inf."""
    if m.exact:
        ze = _try_exact(z)
        if ze is not None:
            if ze == m.z0:
                return math.inf
            return (ze * _conj(m.w0) - m.z0 * m.w0) / (ze - m.z0)
    z0, w0 = complex(m.z0), complex(m.w0)
    z = complex(z)
    if z == z0:
        return math.inf
    return (z * w0.conjugate() - z0 * w0) / (z - z0)


# ---------------------------------------------------------------------------
def _spoly(coeffs, mode: Mode) -> MatrixPoly:
    if mode is Mode.EXACT:
        return MatrixPoly.scalar([to_gaussq(c) for c in coeffs], Mode.EXACT)
    return MatrixPoly.scalar([complex(c) for c in coeffs], Mode.FLOAT)


def _half_degree(F: MatrixPoly) -> int:
    return 0 if F.is_zero() else (int(F.degree) + 1) // 2


def lambda_transform(m: MoebiusMap, F: MatrixPoly) -> LaurentMatrixPoly:
    """((z - z0)^*(z - z0))^k F(lambda^-1(z)) with k = ceil(deg F / 2)."""
    mode = Mode.EXACT if (m.exact and F.mode is Mode.EXACT) else Mode.FLOAT
    F = F if mode is F.mode else F.to_float()
    z0 = m.z0 if mode is Mode.EXACT else complex(m.z0)
    w0 = m.w0 if mode is Mode.EXACT else complex(m.w0)
    if F.is_zero():
        return LaurentMatrixPoly({}, F.n, mode)
    k = _half_degree(F)
    num = _spoly([-z0 * w0, _conj(w0)], mode)  # z conj(w0) - z0 w0
    den = _spoly([-z0, 1], mode)  # z - z0
    acc = MatrixPoly.zero(F.n, mode)
    for j, Fj in enumerate(F.coeffs):
        term = (num**j) * (den ** (2 * k - j))
        acc = acc + MatrixPoly.constant(Fj, mode) * term
    # ((z - z0)^*(z - z0))^k = (-conj z0)^k z^-k (z - z0)^2k
    acc = acc.scale((-_conj(z0)) ** k)
    return LaurentMatrixPoly({e - k: c for e, c in enumerate(acc.coeffs)}, F.n, mode)


def lambda_recover(m: MoebiusMap, L: LaurentMatrixPoly, degF: int, tol: float = 1e-9) -> MatrixPoly:
    """F(x) = ((x - conj w0)(x - w0) / (4 Im(w0)^2))^k Lambda(lambda(x))."""
    if degF < 0:
        raise ValueError("degF must be non-negative")
    mode = Mode.EXACT if (m.exact and L.mode is Mode.EXACT) else Mode.FLOAT
    Lm = L if mode is L.mode else L.to_float()
    k = (degF + 1) // 2
    if Lm.is_zero():
        return MatrixPoly.zero(L.n, mode)
    if Lm.min_exp < -k or Lm.max_exp > k:
        raise ValueError(f"Laurent exponents [{Lm.min_exp}, {Lm.max_exp}] outside [-{k}, {k}]")
    z0 = m.z0 if mode is Mode.EXACT else complex(m.z0)
    w0 = m.w0 if mode is Mode.EXACT else complex(m.w0)
    a = _spoly([-w0, 1], mode)  # x - w0
    b = _spoly([-_conj(w0), 1], mode)  # x - conj(w0)
    acc = MatrixPoly.zero(L.n, mode)
    for j, Lj in Lm.coeffs.items():
        term = (a ** (k + j)) * (b ** (k - j))
        acc = acc + MatrixPoly.constant(Lj, mode) * term.scale(z0**j)
    im = m.im_w0()
    denom = 4 * im * im
    acc = acc.scale(GaussQ(1 / denom**k) if mode is Mode.EXACT else 1.0 / float(denom) ** k)
    if acc.is_zero() or acc.degree <= degF:
        return acc
    tail = acc.coeffs[degF + 1 :]
    if mode is Mode.EXACT:
        raise ValueError("L is not the transform of a polynomial of the declared degree")
    scale = max(1.0, acc.max_abs())
    if float(np.max(np.abs(tail))) > tol * scale:
        raise ValueError("L is not the transform of a polynomial of the declared degree (residual too large)")
    return MatrixPoly(acc.coeffs[: degF + 1].copy(), Mode.FLOAT, n=acc.n)


# ---------------------------------------------------------------------------
_ANGLE_RE = re.compile(r"^\s*([+-]?\d+(?:/\d+)?|[+-]?\d*\.\d+(?:[eE][+-]?\d+)?)\s*(?:[*·]?\s*(?:π|pi))?\s*$")


def parse_angle(text) -> Fraction | float:
    """Angle in units of pi: "3/2·π", "3/2*pi", "3/2" or a number."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, float):
        return text
    mt = _ANGLE_RE.match(str(text))
    if not mt:
        raise ValueError(f"cannot parse angle {text!r}")
    num = mt.group(1)
    return float(num) if "." in num else Fraction(num)


def format_angle(a) -> str:
    if isinstance(a, Fraction):
        return f"{rational_str(a)}·π"
    return f"{a!r}·π"


def _norm_angle(a):
    two = 2
    while a < 0:
        a += two
    while a >= two:
        a -= two
    return a


def angle_point(a) -> complex:
    """e^(i pi a), exact for multiples of pi/2."""
    if isinstance(a, Fraction) and (2 * a).denominator == 1:
        return {0: GaussQ(1), 1: GaussQ(0, 1), 2: GaussQ(-1), 3: GaussQ(0, -1)}[int(2 * _norm_angle(a))]
    return cmath.exp(1j * math.pi * float(a))


def point_angle(z) -> Fraction | float:
    if isinstance(z, GaussQ):
        table = {(1, 0): 0, (0, 1): Fraction(1, 2), (-1, 0): 1, (0, -1): Fraction(3, 2)}
        key = (int(z.re), int(z.im)) if z.re.denominator == 1 and z.im.denominator == 1 else None
        if key in table:
            return Fraction(table[key])
        z = complex(float(z.re), float(z.im))
    return _norm_angle(cmath.phase(complex(z)) / math.pi)


@dataclass(frozen=True)
class Arc:
    """Counter-clockwise closed arc from angle ``start`` to ``end`` (units of pi)."""

    start: object
    end: object

    @property
    def full(self) -> bool:
        return self.end - self.start >= 2

    def contains_angle(self, a, tol: float = 1e-12) -> bool:
        if self.full:
            return True
        d = _norm_angle(a - self.start)
        return float(d) <= float(self.end - self.start) + tol or float(d) >= 2 - tol


class CircleSet:
    def __init__(self, arcs=(), points=()):
        self.arcs = tuple(_merge_arcs(list(arcs)))
        self.points = tuple(p for p in points if not any(a.contains_angle(p) for a in self.arcs))

    def boundary(self) -> list:
        """Angles of the non-isolated boundary points."""
        out = []
        for a in self.arcs:
            if not a.full:
                out += [_norm_angle(a.start), _norm_angle(a.end)]
        return out

    def to_json(self) -> dict:
        return {
            "arcs": [{"from_angle": format_angle(a.start), "to_angle": format_angle(a.end)} for a in self.arcs],
            "points": [format_angle(p) for p in self.points],
        }

    @classmethod
    def from_json(cls, data) -> "CircleSet":
        if not isinstance(data, dict):
            raise ValueError("circle set JSON must be an object")
        arcs = []
        for i, a in enumerate(data.get("arcs", [])):
            try:
                arcs.append(_make_arc(parse_angle(a["from_angle"]), parse_angle(a["to_angle"])))
            except (KeyError, TypeError, ValueError):
                raise ValueError(f"field 'arcs[{i}]' is malformed") from None
        pts = []
        for i, p in enumerate(data.get("points", [])):
            try:
                pts.append(_norm_angle(parse_angle(p)))
            except ValueError:
                raise ValueError(f"field 'points[{i}]' is malformed") from None
        return cls(arcs, pts)


def _make_arc(s, e) -> Arc:
    if e - s >= 2:
        return Arc(0, 2)
    s = _norm_angle(s)
    e = _norm_angle(e)
    if e <= s:
        e += 2
    return Arc(s, e)


def _merge_arcs(arcs: list) -> list:
    if any(a.full for a in arcs):
        return [Arc(0, 2)]
    arcs = list(arcs)
    merged = True
    while merged:
        merged = False
        for i, a in enumerate(arcs):
            for j, b in enumerate(arcs):
                if i == j or not a.contains_angle(b.start):
                    continue
                offset = _norm_angle(b.start - a.start)
                if 2 - float(offset) <= 1e-12:
                    offset = 0
                length = max(a.end - a.start, offset + (b.end - b.start))
                new = Arc(0, 2) if length >= 2 else Arc(a.start, a.start + length)
                arcs = [x for k, x in enumerate(arcs) if k not in (i, j)] + [new]
                merged = True
                break
            if merged:
                break
    return sorted(arcs, key=lambda x: float(x.start))


def transfer_description(m: MoebiusMap, S: Description) -> list:
    """Lambda transforms of the generators."""
    return [lambda_transform(m, g) for g in S.generators]


def transfer_set(m: MoebiusMap, K: SemialgSet) -> CircleSet:
    """Closure of lambda(K) as arcs and points on the circle."""
    ccw = (m.im_w0() > 0)
    a0 = point_angle(m.z0)
    arcs, pts = [], []
    for piece in K.pieces:
        if isinstance(piece, Point):
            pts.append(point_angle(moebius_apply(m, piece.a)))
            continue
        lo = a0 if piece.lo == -math.inf else point_angle(moebius_apply(m, piece.lo))
        hi = a0 if piece.hi == math.inf else point_angle(moebius_apply(m, piece.hi))
        if piece.lo == -math.inf and piece.hi == math.inf:
            arcs.append(Arc(0, 2))
            continue
        arcs.append(_make_arc(lo, hi) if ccw else _make_arc(hi, lo))
    return CircleSet(arcs, pts)


# ---------------------------------------------------------------------------
def _scalar_value(b: LaurentMatrixPoly, z) -> complex:
    return complex(b.to_float().evaluate(complex(z))[0, 0])


def _tangent(b: LaurentMatrixPoly, z) -> float:
    """d/dtheta of b(z e^(i theta)) at theta = 0; real for Hermitian b."""
    zc = complex(z)
    return float((1j * zc * _scalar_value(b.derivative(), zc)).real)


def _coef_scale(b: LaurentMatrixPoly) -> float:
    bf = b.to_float()
    return max([1.0] + [float(np.max(np.abs(c))) for c in bf.coeffs.values()])


def circle_description_report(S: list, K: CircleSet, tol: float = 1e-9, radius: float = 1e-3,
                              samples: int = 16) -> dict:
    for b in S:
        if b.n != 1:
            raise ValueError("circle descriptions are scalar")
    scales = [_coef_scale(b) for b in S]
    out = {"boundary": [], "isolated": []}
    for ang in K.boundary():
        z = angle_point(ang)
        if abs(abs(complex(z)) - 1) > UNIT_TOL:
            raise ValueError("boundary point not on the circle")
        hits = [
            k
            for k, b in enumerate(S)
            if abs(_scalar_value(b, z)) <= tol * scales[k] and abs(_scalar_value(b.derivative(), z)) > tol * scales[k]
        ]
        out["boundary"].append({"angle": format_angle(ang), "generators": hits, "ok": bool(hits)})
    for ang in K.points:
        z = angle_point(ang)
        zeros = [
            k
            for k, b in enumerate(S)
            if abs(_scalar_value(b, z)) <= tol * scales[k] and abs(_scalar_value(b.derivative(), z)) > tol * scales[k]
        ]
        pair = None
        for i, k in enumerate(zeros):
            for l in zeros[i + 1 :]:
                if _tangent(S[k], z) * _tangent(S[l], z) >= 0:
                    continue
                zc = complex(z)
                thetas = [radius * s * (j + 1) / (samples // 2) for s in (-1, 1) for j in range(samples // 2)]
                vals = [
                    (_scalar_value(S[k], zc * cmath.exp(1j * t)) * _scalar_value(S[l], zc * cmath.exp(1j * t))).real
                    for t in thetas
                ]
                if all(v <= tol * scales[k] * scales[l] for v in vals):
                    pair = (k, l)
                    break
            if pair:
                break
        out["isolated"].append({"angle": format_angle(ang), "pair": pair, "ok": pair is not None})
    out["ok"] = all(e["ok"] for e in out["boundary"]) and all(e["ok"] for e in out["isolated"])
    return out


def circle_description_check(S: list, K: CircleSet, tol: float = 1e-9) -> bool:
    """Conditions (a) at non-isolated boundary points and (b) at isolated points."""
    return circle_description_report(S, K, tol)["ok"]


# ---------------------------------------------------------------------------
def denominator_kw(F: MatrixPoly, K: SemialgSet, w=1j, k_max: int = 12, tol: float = 1e-8) -> DenominatorResult:
    """Smallest k with ((x - conj w)(x - w))^k F in the quadratic module of the natural description of K.

    The exponent is found by the line-side search rather than read off the
    degree of a circle certificate.
    """
    S = natural_description(K)
    return denominator_search(F, S, w=w, k_max=k_max, mode=ModuleKind.QUADRATIC_MODULE, tol=tol)
