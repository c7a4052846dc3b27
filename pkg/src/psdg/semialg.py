"""Closed semialgebraic subsets of the real line and their generator descriptions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from . import _sturm
from .gaussq import GaussQ, rational_str
from .polymat import MatrixPoly, Mode

__all__ = [
    "Point",
    "Interval",
    "SemialgSet",
    "Role",
    "Description",
    "ClassLabel",
    "Verdict",
    "natural_description",
    "is_saturated_description",
    "realize",
    "membership",
    "classify",
    "scalar_poly",
    "rational_coeffs",
]

INF = math.inf
DEFAULT_SNAP_WIDTH = Fraction(1, 10**9)


def _frac(v):
    if isinstance(v, float) and math.isinf(v):
        return v
    if isinstance(v, str):
        s = v.strip()
        if s in ("inf", "+inf", "oo"):
            return INF
        if s == "-inf":
            return -INF
        return Fraction(s)
    if isinstance(v, float):
        if not v.is_integer():
            raise TypeError(f"use an exact rational instead of float {v!r}")
        return Fraction(int(v))
    if hasattr(v, "numerator") and hasattr(v, "denominator"):
        return Fraction(int(v.numerator), int(v.denominator))
    return Fraction(v)


def _fmt(v) -> str:
    if v == INF:
        return "+inf"
    if v == -INF:
        return "-inf"
    return rational_str(v)


@dataclass(frozen=True)
class Point:
    a: Fraction

    def __init__(self, a):
        object.__setattr__(self, "a", _frac(a))
        if isinstance(self.a, float):
            raise ValueError("a point must be finite")

    @property
    def lo(self):
        return self.a

    @property
    def hi(self):
        return self.a

    def contains(self, x) -> bool:
        return x == self.a

    def __str__(self):
        return "{" + _fmt(self.a) + "}"


@dataclass(frozen=True)
class Interval:
    lo: object
    hi: object

    def __init__(self, lo, hi):
        lo, hi = _frac(lo), _frac(hi)
        if lo == INF or hi == -INF:
            raise ValueError("interval endpoints out of order")
        if not lo < hi:
            raise ValueError("an interval needs a non-empty interior (lo < hi)")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    @property
    def bounded(self) -> bool:
        return self.lo != -INF and self.hi != INF

    def __str__(self):
        left = "(" if self.lo == -INF else "["
        right = ")" if self.hi == INF else "]"
        return f"{left}{_fmt(self.lo)}, {_fmt(self.hi)}{right}"


class SemialgSet:
    """Finite union of points and closed intervals, kept sorted and merged."""

    __slots__ = ("pieces",)

    def __init__(self, pieces=()):
        self.pieces = tuple(_canonicalize(list(pieces)))

    @classmethod
    def real_line(cls) -> "SemialgSet":
        return cls([Interval(-INF, INF)])

    @classmethod
    def empty(cls) -> "SemialgSet":
        return cls([])

    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def points(self):
        return [p for p in self.pieces if isinstance(p, Point)]

    @property
    def intervals(self):
        return [p for p in self.pieces if isinstance(p, Interval)]

    def is_compact(self) -> bool:
        return all(not isinstance(p, Interval) or p.bounded for p in self.pieces)

    def least(self):
        if not self.pieces or self.pieces[0].lo == -INF:
            return None
        return self.pieces[0].lo

    def greatest(self):
        if not self.pieces or self.pieces[-1].hi == INF:
            return None
        return self.pieces[-1].hi

    def gaps(self):
        return [(a.hi, b.lo) for a, b in zip(self.pieces, self.pieces[1:])]

    def contains(self, x) -> bool:
        return membership(self, x)

    def __eq__(self, other):
        if not isinstance(other, SemialgSet):
            return NotImplemented
        return self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    def __repr__(self):
        return f"SemialgSet({self})"

    def __str__(self):
        return " ∪ ".join(str(p) for p in self.pieces) if self.pieces else "∅"

    def to_json(self) -> dict:
        out = []
        for p in self.pieces:
            if isinstance(p, Point):
                out.append({"point": _fmt(p.a)})
            else:
                out.append({"lo": _fmt(p.lo), "hi": _fmt(p.hi)})
        return {"pieces": out}

    @classmethod
    def from_json(cls, data) -> "SemialgSet":
        if not isinstance(data, dict) or "pieces" not in data or not isinstance(data["pieces"], list):
            raise ValueError("set JSON needs a 'pieces' list")
        pieces = []
        for i, item in enumerate(data["pieces"]):
            try:
                if "point" in item:
                    pieces.append(Point(_frac(str(item["point"]))))
                else:
                    pieces.append(Interval(_frac(str(item["lo"])), _frac(str(item["hi"]))))
            except KeyError as exc:
                raise ValueError(f"field 'pieces[{i}]' is missing key {exc}") from None
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"field 'pieces[{i}]' is invalid: {exc}") from None
        return cls(pieces)


def _canonicalize(pieces):
    pieces = sorted(pieces, key=lambda p: (p.lo, p.hi))
    out = []
    for p in pieces:
        if out and p.lo <= out[-1].hi:
            last = out.pop()
            lo, hi = last.lo, max(last.hi, p.hi)
            out.append(Interval(lo, hi) if lo < hi else Point(lo))
        else:
            out.append(p)
    return out


def membership(K: SemialgSet, x) -> bool:
    x = _frac(x)
    return any(p.contains(x) for p in K.pieces)


# ---------------------------------------------------------------------------
def scalar_poly(coeffs) -> MatrixPoly:
    """Real scalar polynomial (exact) from low-to-high rational coefficients."""
    return MatrixPoly.scalar([GaussQ(_frac(c)) for c in coeffs], Mode.EXACT) if coeffs else MatrixPoly.zero(1)


def rational_coeffs(g: MatrixPoly) -> list:
    """Fraction coefficients of a real exact scalar polynomial."""
    if g.n != 1 or g.mode is not Mode.EXACT:
        raise ValueError("generators must be exact scalar polynomials")
    out = []
    for z in g.scalar_coeffs():
        if z.im:
            raise ValueError("generators must have real coefficients")
        out.append(Fraction(int(z.re.numerator), int(z.re.denominator)))
    return out


class Role(str, Enum):
    LEAST = "LeastElement"
    GREATEST = "GreatestElement"
    GAP = "Gap"
    OTHER = "Other"


class Description:
    """Generator list S with role tags; a gap role carries its endpoints."""

    __slots__ = ("generators", "roles", "gaps")

    def __init__(self, generators=(), roles=None, gaps=None):
        gens = []
        for g in generators:
            if not isinstance(g, MatrixPoly):
                g = scalar_poly(g)
            rational_coeffs(g)
            gens.append(g)
        self.generators = tuple(gens)
        self.roles = tuple(Role(r) for r in roles) if roles is not None else tuple(Role.OTHER for _ in gens)
        self.gaps = tuple(gaps) if gaps is not None else tuple(None for _ in gens)
        if len(self.roles) != len(gens) or len(self.gaps) != len(gens):
            raise ValueError("one role per generator")

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def coeff_lists(self):
        return [rational_coeffs(g) for g in self.generators]

    def __eq__(self, other):
        if not isinstance(other, Description):
            return NotImplemented
        return self.coeff_lists() == other.coeff_lists() and self.roles == other.roles

    def __repr__(self):
        return "Description([" + ", ".join(str(g) for g in self.generators) + "])"

    def to_json(self) -> dict:
        gens = []
        for g, r, gap in zip(self.generators, self.roles, self.gaps):
            item = {"poly": g.to_json(), "role": r.value}
            if gap is not None:
                item["gap"] = [_fmt(gap[0]), _fmt(gap[1])]
            gens.append(item)
        return {"generators": gens}

    @classmethod
    def from_json(cls, data) -> "Description":
        if isinstance(data, list):
            data = {"generators": data}
        if not isinstance(data, dict) or not isinstance(data.get("generators"), list):
            raise ValueError("description JSON needs a 'generators' list")
        gens, roles, gaps = [], [], []
        for i, item in enumerate(data["generators"]):
            try:
                poly = item["poly"] if isinstance(item, dict) and "poly" in item else item
                if isinstance(poly, list):
                    g = scalar_poly([_frac(str(c)) for c in poly])
                else:
                    g = MatrixPoly.from_json(poly)
                rational_coeffs(g)
                role = Role(item.get("role", "Other")) if isinstance(item, dict) else Role.OTHER
                gap = item.get("gap") if isinstance(item, dict) else None
                gaps.append(tuple(_frac(v) for v in gap) if gap else None)
            except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"field 'generators[{i}]' is invalid: {exc}") from None
            gens.append(g)
            roles.append(role)
        return cls(gens, roles, gaps)


def natural_description(K: SemialgSet) -> Description:
    if K.is_empty():
        raise ValueError("the natural description needs a non-empty set")
    gens, roles, gaps = [], [], []
    a = K.least()
    if a is not None:
        gens.append(scalar_poly([-a, 1]))
        roles.append(Role.LEAST)
        gaps.append(None)
    b = K.greatest()
    if b is not None:
        gens.append(scalar_poly([b, -1]))
        roles.append(Role.GREATEST)
        gaps.append(None)
    for lo, hi in K.gaps():
        gens.append(scalar_poly([lo * hi, -(lo + hi), 1]))
        roles.append(Role.GAP)
        gaps.append((lo, hi))
    return Description(gens, roles, gaps)


def is_saturated_description(S: Description, K: SemialgSet) -> bool:
    """Endpoint-derivative test; a point piece counts as both a left and a right endpoint."""
    if not K.is_compact():
        raise ValueError("the saturation test applies to compact sets only")
    polys = S.coeff_lists()
    ders = [_sturm.derivative(p) for p in polys]

    def ok(x, sign):
        for p, dp in zip(polys, ders):
            if _sturm.evaluate(p, x) == 0:
                v = _sturm.evaluate(dp, x)
                if (v > 0 and sign > 0) or (v < 0 and sign < 0):
                    return True
        return False

    return all(ok(piece.lo, +1) and ok(piece.hi, -1) for piece in K.pieces)


class UnresolvedEndpointError(ValueError):
    """A boundary point of K_S is irrational and snapping was not requested."""


def realize(S: Description, snap: bool = False, width=DEFAULT_SNAP_WIDTH) -> SemialgSet:
    """Compute K_S = {x : g(x) >= 0 for all g in S}."""
    polys = [p for p in (_sturm.trim(c) for c in S.coeff_lists()) if p]
    nonconst = [p for p in polys if len(p) > 1]
    if any(len(p) == 1 and p[0] < 0 for p in polys):
        return SemialgSet.empty()
    if not nonconst:
        return SemialgSet.real_line()
    prod = [Fraction(1)]
    for p in nonconst:
        prod = _sturm.mul(prod, p)
    P = _sturm.squarefree(prod)
    roots = _sturm.real_roots(P)
    width = _frac(width)

    def sign_at_root(p, r):
        if r.exact:
            v = _sturm.evaluate(p, r.value)
            return (v > 0) - (v < 0), r
        h = _sturm.gcd(p, P)
        if len(h) > 1 and _sturm.has_root_in(h, r.lo, r.hi):
            return 0, r
        while _sturm.has_root_in(p, r.lo, r.hi) or _sturm.evaluate(p, r.lo) == 0:
            r = _sturm.refine(P, _sturm.Root(lo=r.lo, hi=r.hi), (r.hi - r.lo) / 2)
            if r.exact:
                v = _sturm.evaluate(p, r.value)
                return (v > 0) - (v < 0), r
        v = _sturm.evaluate(p, r.lo)
        return (v > 0) - (v < 0), r

    def in_K_at(x):
        return all(_sturm.evaluate(p, x) >= 0 for p in nonconst)

    # sample points strictly between roots
    def left_of(r):
        return r.value if r.exact else r.lo

    def right_of(r):
        return r.value if r.exact else r.hi

    samples = []
    if roots:
        samples.append(left_of(roots[0]) - 1)
        for r1, r2 in zip(roots, roots[1:]):
            samples.append((right_of(r1) + left_of(r2)) / 2)
        samples.append(right_of(roots[-1]) + 1)
    else:
        samples.append(Fraction(0))
    region_in = [in_K_at(s) for s in samples]
    root_in = []
    for i, r in enumerate(roots):
        good = True
        for p in nonconst:
            s, r = sign_at_root(p, r)
            if s < 0:
                good = False
                break
        roots[i] = r
        root_in.append(good)

    def endpoint(r):
        if r.exact:
            return r.value
        if not snap:
            raise UnresolvedEndpointError(
                f"boundary point in ({r.lo}, {r.hi}) is irrational; pass snap=True to approximate it"
            )
        r2 = _sturm.refine(P, r, width)
        return r2.approx()

    if not roots:
        return SemialgSet.real_line() if region_in[0] else SemialgSet.empty()
    bounds = [-INF] + [None] * len(roots) + [INF]
    pieces = []
    for j, inside in enumerate(region_in):
        if not inside:
            continue
        lo = -INF if j == 0 else endpoint(roots[j - 1])
        hi = INF if j == len(roots) else endpoint(roots[j])
        pieces.append(Interval(lo, hi))
    for j, r in enumerate(roots):
        if root_in[j] and not region_in[j] and not region_in[j + 1]:
            pieces.append(Point(endpoint(r)))
    del bounds
    return SemialgSet(pieces)


# ---------------------------------------------------------------------------
class ClassLabel(str, Enum):
    BOUNDED = "Bounded"
    UNBOUNDED_INTERVAL = "UnboundedInterval"
    UNBOUNDED_INTERVAL_PLUS_ONE_POINT = "UnboundedIntervalPlusOnePoint"
    UNBOUNDED_INTERVAL_PLUS_MANY_POINTS = "UnboundedIntervalPlusManyPoints"
    TWO_UNBOUNDED_INTERVALS = "TwoUnboundedIntervals"
    TWO_UNBOUNDED_INTERVALS_PLUS_ONE_POINT = "TwoUnboundedIntervalsPlusOnePoint"
    TWO_UNBOUNDED_INTERVALS_PLUS_MANY_POINTS = "TwoUnboundedIntervalsPlusManyPoints"
    MIXED_BOUNDED_UNBOUNDED_INTERVALS = "MixedBoundedUnboundedIntervals"


class Verdict(str, Enum):
    YES = "Yes"
    NO = "No"
    CONJECTURE = "Conjecture"


_VERDICT = {
    ClassLabel.BOUNDED: Verdict.YES,
    ClassLabel.UNBOUNDED_INTERVAL: Verdict.YES,
    ClassLabel.UNBOUNDED_INTERVAL_PLUS_ONE_POINT: Verdict.CONJECTURE,
    ClassLabel.UNBOUNDED_INTERVAL_PLUS_MANY_POINTS: Verdict.NO,
    ClassLabel.TWO_UNBOUNDED_INTERVALS: Verdict.YES,
    ClassLabel.TWO_UNBOUNDED_INTERVALS_PLUS_ONE_POINT: Verdict.CONJECTURE,
    ClassLabel.TWO_UNBOUNDED_INTERVALS_PLUS_MANY_POINTS: Verdict.NO,
    ClassLabel.MIXED_BOUNDED_UNBOUNDED_INTERVALS: Verdict.NO,
}


def classify(K: SemialgSet):
    """Return (label, saturation verdict for the natural description)."""
    if K.is_empty():
        raise ValueError("cannot classify the empty set")
    ivs = K.intervals
    unbounded = [iv for iv in ivs if not iv.bounded]
    bounded = [iv for iv in ivs if iv.bounded]
    npts = len(K.points)
    if not unbounded:
        label = ClassLabel.BOUNDED
    elif bounded:
        label = ClassLabel.MIXED_BOUNDED_UNBOUNDED_INTERVALS
    elif len(unbounded) == 1:
        # the whole line counts as one unbounded interval
        label = [
            ClassLabel.UNBOUNDED_INTERVAL,
            ClassLabel.UNBOUNDED_INTERVAL_PLUS_ONE_POINT,
            ClassLabel.UNBOUNDED_INTERVAL_PLUS_MANY_POINTS,
        ][min(npts, 2)]
    else:
        label = [
            ClassLabel.TWO_UNBOUNDED_INTERVALS,
            ClassLabel.TWO_UNBOUNDED_INTERVALS_PLUS_ONE_POINT,
            ClassLabel.TWO_UNBOUNDED_INTERVALS_PLUS_MANY_POINTS,
        ][min(npts, 2)]
    return label, _VERDICT[label]
