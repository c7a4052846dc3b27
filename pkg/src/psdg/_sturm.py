"""Exact real-root isolation for rational univariate polynomials.

Polynomials here are plain lists of Fractions, low degree first.
"""
from __future__ import annotations

import math
from fractions import Fraction

Poly = list  # list[Fraction], low -> high


def trim(p: Poly) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def evaluate(p: Poly, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p: Poly) -> Poly:
    return trim([c * k for k, c in enumerate(p)][1:])


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def divmod_poly(a: Poly, b: Poly):
    a, b = trim(a), trim(b)
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    if len(a) < len(b):
        return [], a
    r = list(a)
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    for k in range(len(a) - len(b), -1, -1):
        c = r[k + len(b) - 1] / lead
        q[k] = c
        if c:
            for j, bj in enumerate(b):
                r[k + j] -= c * bj
    return trim(q), trim(r[: len(b) - 1])


def monic(p: Poly) -> Poly:
    p = trim(p)
    if not p:
        return p
    lead = p[-1]
    return [c / lead for c in p]


def gcd(a: Poly, b: Poly) -> Poly:
    a, b = trim(a), trim(b)
    while b:
        _, r = divmod_poly(a, b)
        a, b = b, r
    return monic(a)


def squarefree(p: Poly) -> Poly:
    p = trim(p)
    if len(p) <= 1:
        return monic(p)
    g = gcd(p, derivative(p))
    q, _ = divmod_poly(p, g)
    return monic(q)


def sturm_sequence(p: Poly) -> list:
    seq = [trim(p), derivative(p)]
    while seq[-1]:
        _, r = divmod_poly(seq[-2], seq[-1])
        seq.append([-c for c in r])
    return seq[:-1]


def _sign_at(p: Poly, x) -> int:
    if x == math.inf:
        return (p[-1] > 0) - (p[-1] < 0)
    if x == -math.inf:
        s = (p[-1] > 0) - (p[-1] < 0)
        return s if (len(p) - 1) % 2 == 0 else -s
    v = evaluate(p, x)
    return (v > 0) - (v < 0)


def sign_changes(seq, x) -> int:
    signs = [s for s in (_sign_at(p, x) for p in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(seq, lo, hi) -> int:
    """Distinct real roots in (lo, hi]; lo must not be a root."""
    return sign_changes(seq, lo) - sign_changes(seq, hi)


def cauchy_bound(p: Poly) -> Fraction:
    p = trim(p)
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def integer_primitive(p: Poly) -> list:
    den = math.lcm(*(c.denominator for c in p)) if p else 1
    ints = [int(c * den) for c in p]
    g = math.gcd(*ints) if ints else 1
    return [v // g for v in ints] if g else ints


class Root:
    """A real root: either exact (``value``) or isolated in the open interval (lo, hi)."""

    __slots__ = ("value", "lo", "hi")

    def __init__(self, value=None, lo=None, hi=None):
        self.value = value
        self.lo = lo
        self.hi = hi

    @property
    def exact(self) -> bool:
        return self.value is not None

    def approx(self) -> Fraction:
        if self.exact:
            return self.value
        return (self.lo + self.hi) / 2

    def __repr__(self):
        if self.exact:
            return f"Root({self.value})"
        return f"Root(({self.lo}, {self.hi}))"


def refine(p: Poly, root: Root, width) -> Root:
    """Bisect an isolating interval of a squarefree ``p`` below ``width``."""
    if root.exact:
        return root
    lo, hi = root.lo, root.hi
    s_lo = _sign_at(p, lo)
    while hi - lo >= width:
        mid = (lo + hi) / 2
        s = _sign_at(p, mid)
        if s == 0:
            return Root(value=mid)
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return Root(lo=lo, hi=hi)


def real_roots(p: Poly) -> list:
    """Sorted distinct real roots of ``p`` (rational ones returned exactly)."""
    p = squarefree(p)
    if len(p) <= 1:
        return []
    seq = sturm_sequence(p)
    B = cauchy_bound(p)
    out = []
    stack = [(-B, B)]
    while stack:
        lo, hi = stack.pop()
        n = count_roots(seq, lo, hi)
        if n == 0:
            continue
        if n == 1:
            out.append(Root(lo=lo, hi=hi))
            continue
        mid = (lo + hi) / 2
        if evaluate(p, mid) == 0:
            out.append(Root(value=mid))
            # nudge the split so the new endpoints are not roots
            eps = (hi - lo) / 4
            while True:
                a, b = mid - eps, mid + eps
                if evaluate(p, a) and evaluate(p, b) and count_roots(seq, a, b) == 1:
                    break
                eps /= 2
            stack.append((lo, a))
            stack.append((b, hi))
        else:
            stack.append((lo, mid))
            stack.append((mid, hi))
    ints = integer_primitive(p)
    lead = abs(ints[-1])
    resolved = []
    for r in out:
        if r.exact:
            resolved.append(r)
            continue
        # any rational root lies on the lattice (1/lead)Z
        r2 = refine(p, r, Fraction(1, 2 * lead))
        if r2.exact:
            resolved.append(r2)
            continue
        cand = Fraction(round((r2.lo + r2.hi) / 2 * lead), lead)
        if r2.lo < cand < r2.hi and evaluate(p, cand) == 0:
            resolved.append(Root(value=cand))
        else:
            resolved.append(r2)
    resolved.sort(key=lambda r: r.approx())
    return resolved


def has_root_in(p: Poly, lo, hi) -> bool:
    """Whether ``p`` has a root in the open interval (lo, hi), lo and hi not roots of p."""
    p = squarefree(p)
    if len(p) <= 1:
        return False
    return count_roots(sturm_sequence(p), lo, hi) > 0
