"""The F_k family on a bounded plus an unbounded interval, and its refutations.

Also hosts the factorization for a union of two unbounded intervals, which
goes through reversal onto [-1, 1].
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np

from . import _sturm
from .certsearch import (
    FactorizationError,
    MembershipStatus,
    ModuleKind,
    TruncatedPreordering,
    check_membership,
    fejer_riesz,
    gram_to_poly,
)
from .gaussq import rational_str, to_rational
from .polymat import MatrixPoly, Mode
from .sdp import SdpOutcome, Status
from .semialg import Description, Interval, Point, SemialgSet, scalar_poly

__all__ = [
    "FkInstance",
    "RefutationReport",
    "fk_conditions",
    "fk_build",
    "fk_determinant_residual",
    "fk_square_k",
    "fk_psd_report",
    "fk_refute_claim1",
    "fk_refute_claim2_sdp",
    "two_unbounded_factorize",
    "default_digits",
]

DEFAULT_DIGITS = 30


def default_digits() -> int:
    raw = os.environ.get("PSDG_PRECISION")
    if raw is None:
        return DEFAULT_DIGITS
    try:
        d = int(raw)
    except ValueError:
        raise ValueError(f"PSDG_PRECISION must be an integer, got {raw!r}") from None
    if d < 16:
        raise ValueError("PSDG_PRECISION must be at least 16")
    return d


def _q(v) -> Fraction:
    r = to_rational(v)
    return Fraction(int(r.numerator), int(r.denominator))


def _abc(x1, x2, x3, k):
    A = k - x1
    B = -k - x2 - x3
    C = k * k + k * (-x1 + x2 + x3) + x2 * x3
    Dsq = A * C + x1 * x2 * x3
    return A, B, C, Dsq


def _c33(x1, x2, x3, k) -> Fraction:
    return Fraction(3, 4) * k * k + k * (-x1 + (x2 + x3) / 2) - ((x2 - x3) / 2) ** 2


def fk_conditions(x1, x2, x3, k) -> dict:
    x1, x2, x3, k = (_q(v) for v in (x1, x2, x3, k))
    if not x1 < x2 < x3:
        raise ValueError("need x1 < x2 < x3")
    _, _, _, Dsq = _abc(x1, x2, x3, k)
    v33 = _c33(x1, x2, x3, k)
    return {
        "c31": k > 0,
        "c32": Dsq > 0,
        "c33": v33 > 0,
        "values": {"k": k, "Dsq": Dsq, "vertex": v33},
    }


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


@dataclass
class FkInstance:
    x1: Fraction
    x2: Fraction
    x3: Fraction
    k: Fraction
    A: Fraction
    B: Fraction
    C: Fraction
    Dsq: Fraction
    D: object  # Fraction when exact, Decimal otherwise
    F: MatrixPoly
    digits: int | None = None

    @property
    def exact(self) -> bool:
        return isinstance(self.D, Fraction)

    def determinant_target(self) -> list:
        return _sturm.mul(_sturm.mul([-self.x1, Fraction(1)], [-self.x2, Fraction(1)]), [-self.x3, Fraction(1)])

    def to_json(self) -> dict:
        return {
            "x1": rational_str(self.x1),
            "x2": rational_str(self.x2),
            "x3": rational_str(self.x3),
            "k": rational_str(self.k),
            "A": rational_str(self.A),
            "B": rational_str(self.B),
            "C": rational_str(self.C),
            "Dsq": rational_str(self.Dsq),
            "D": rational_str(self.D) if self.exact else str(self.D),
            "exact": self.exact,
            "digits": self.digits,
            "F": self.F.to_json(),
        }


def fk_build(x1, x2, x3, k, digits: int | None = None) -> FkInstance:
    cond = fk_conditions(x1, x2, x3, k)
    if not (cond["c31"] and cond["c32"] and cond["c33"]):
        failed = [c for c in ("c31", "c32", "c33") if not cond[c]]
        raise ValueError(f"conditions fail: {', '.join(failed)}")
    x1, x2, x3, k = (_q(v) for v in (x1, x2, x3, k))
    A, B, C, Dsq = _abc(x1, x2, x3, k)
    D = _rational_sqrt(Dsq)
    if D is not None:
        F = MatrixPoly.from_entries(
            [
                [scalar_poly([A, 1]), scalar_poly([D])],
                [scalar_poly([D]), scalar_poly([C, B, 1])],
            ]
        )
        return FkInstance(x1, x2, x3, k, A, B, C, Dsq, D, F)
    digits = digits or default_digits()
    with localcontext() as ctx:
        ctx.prec = digits
        Dd = (Decimal(Dsq.numerator) / Decimal(Dsq.denominator)).sqrt()
    f = float(Dd)
    coeffs = np.zeros((3, 2, 2), dtype=complex)
    coeffs[0] = [[float(A), f], [f, float(C)]]
    coeffs[1] = [[1, 0], [0, float(B)]]
    coeffs[2] = [[0, 0], [0, 1]]
    return FkInstance(x1, x2, x3, k, A, B, C, Dsq, Dd, MatrixPoly(coeffs, Mode.FLOAT, n=2), digits)


def fk_determinant_residual(inst: FkInstance) -> float:
    """Max coefficient of det F_k - (x-x1)(x-x2)(x-x3).

    Only the constant term involves D; it is evaluated in decimal arithmetic
    at a few guard digits above the instance precision.
    """
    A, B, C = inst.A, inst.B, inst.C
    det = _sturm.mul([A, Fraction(1)], [C, B, Fraction(1)])
    target = inst.determinant_target()
    diffs = [a - b for a, b in zip(det + [0] * 4, target + [0] * 4)]
    if inst.exact:
        diffs[0] -= inst.D * inst.D
        return float(max(abs(v) for v in diffs))
    with localcontext() as ctx:
        ctx.prec = (inst.digits or DEFAULT_DIGITS) + 10
        c0 = Decimal(diffs[0].numerator) / Decimal(diffs[0].denominator) - inst.D * inst.D
        rest = max(abs(v) for v in diffs[1:])
        return max(float(abs(c0)), float(rest))


def fk_square_k(x1, x2, x3, bound: int = 40) -> list:
    """Rational k = p/q with p, q <= bound satisfying the conditions and Dsq a rational square."""
    out = []
    seen = set()
    for q in range(1, bound + 1):
        for p in range(1, bound + 1):
            k = Fraction(p, q)
            if k in seen:
                continue
            seen.add(k)
            cond = fk_conditions(x1, x2, x3, k)
            if cond["c31"] and cond["c32"] and cond["c33"] and _rational_sqrt(cond["values"]["Dsq"]) is not None:
                out.append(k)
    return sorted(out)


# ---------------------------------------------------------------------------
@dataclass
class RefutationReport:
    confirmed: bool
    facts: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, Fraction):
                return rational_str(v)
            if isinstance(v, dict):
                return {k: enc(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            return v

        return {"confirmed": self.confirmed, "facts": enc(self.facts), "notes": enc(self.notes)}


def _sign_pieces(p: list, K: SemialgSet):
    """Exact test points for the sign of p on every piece of K (one per root-free sub-piece)."""
    roots = [r.value for r in _sturm.real_roots(p) if r.exact]
    pts = []
    for piece in K.pieces:
        if isinstance(piece, Point):
            pts.append(piece.a)
            continue
        lo, hi = piece.lo, piece.hi
        cuts = sorted(r for r in roots if (lo == -math.inf or r > lo) and (hi == math.inf or r < hi))
        ends = ([lo] if lo != -math.inf else []) + cuts + ([hi] if hi != math.inf else [])
        pts.extend(ends)
        if lo == -math.inf:
            pts.append((ends[0] if ends else Fraction(0)) - 1)
        if hi == math.inf:
            pts.append((ends[-1] if ends else Fraction(0)) + 1)
        pts.extend((a + b) / 2 for a, b in zip(ends, ends[1:]))
    return sorted(set(pts))


def fk_psd_report(inst: FkInstance, K: SemialgSet) -> dict:
    """The three principal-minor facts behind F_k being PSD on K."""
    least = K.least()
    top_left = {
        "fact": "x + A >= 0 on K",
        "threshold": inst.x1 - inst.k,
        "least": least,
        "pass": least is not None and least >= inst.x1 - inst.k,
    }
    vertex_x = -inst.B / 2
    vertex_val = _sturm.evaluate([inst.C, inst.B, Fraction(1)], vertex_x)
    bottom_right = {
        "fact": "p_k > 0 on the real line",
        "vertex": vertex_x,
        "vertex_value": vertex_val,
        "pass": vertex_val > 0,
    }
    cubic = inst.determinant_target()
    pts = _sign_pieces(cubic, K)
    vals = [(x, _sturm.evaluate(cubic, x)) for x in pts]
    det = {
        "fact": "(x-x1)(x-x2)(x-x3) >= 0 on K",
        "points": [{"x": x, "value": v} for x, v in vals],
        "pass": all(v >= 0 for _, v in vals),
    }
    facts = [top_left, bottom_right, det]
    return {"pass": all(f["pass"] for f in facts), "facts": facts}


def _check_claim1_shape(inst: FkInstance, K1: SemialgSet):
    pieces = K1.pieces
    if len(pieces) < 2:
        raise ValueError("Claim 1 sets have at least a bounded and an unbounded piece")
    first, second, last = pieces[0], pieces[1], pieces[-1]
    if not (isinstance(first, Interval) and first.lo == inst.x1 and first.hi == inst.x2):
        raise ValueError("the first piece must be [x1, x2]")
    if second.lo != inst.x3:
        raise ValueError("the second piece must start at x3")
    if not (isinstance(last, Interval) and last.hi == math.inf):
        raise ValueError("the last piece must be unbounded above")
    if any(not isinstance(p, Interval) for p in pieces):
        raise ValueError("Claim 1 sets consist of intervals")


def claim1_q(inst: FkInstance, k0) -> list:
    """Determinant of F_k - diag(0, k0)(x-x2)(x-x3), as Fraction coefficients."""
    k0 = _q(k0)
    lin = [-(inst.x1 - inst.x1 * k0 + inst.k * k0), 1 - k0]
    return _sturm.mul(_sturm.mul([-inst.x2, Fraction(1)], [-inst.x3, Fraction(1)]), lin)


def fk_refute_claim1(inst: FkInstance, K1: SemialgSet, grid: int = 16) -> RefutationReport:
    _check_claim1_shape(inst, K1)
    facts = []
    # k0 = 0: q is the cubic, negative between x2 and x3
    mid = (inst.x2 + inst.x3) / 2
    q0 = claim1_q(inst, 0)
    v0 = _sturm.evaluate(q0, mid)
    facts.append({"k0": Fraction(0), "x": mid, "q": v0, "negative": v0 < 0})
    sym = (inst.x1 - inst.x2) * (inst.x1 - inst.x3)
    for j in range(1, grid + 1):
        k0 = Fraction(j, grid)
        v = _sturm.evaluate(claim1_q(inst, k0), inst.x1)
        closed = sym * (-inst.k * k0)
        facts.append({"k0": k0, "x": inst.x1, "q": v, "closed_form": closed, "negative": v < 0 and v == closed})
    symbolic = sym > 0 and inst.k > 0
    notes = {"symbolic_sign": "(x1-x2)(x1-x3) > 0 and -k*k0 < 0", "symbolic_holds": symbolic}
    return RefutationReport(all(f["negative"] for f in facts) and symbolic, facts, notes)


def fk_refute_claim2_sdp(inst: FkInstance, S2: Description, tol: float = 1e-8, max_iter: int = 200) -> SdpOutcome:
    """Membership SDP for F_k in the degree-2 truncated preordering of S2.

    The outcome's diagnostics carry ``confirmed``: True only for an
    INFEASIBLE status whose witness passes the independent check.
    """
    T = TruncatedPreordering(S2, 2, 2, ModuleKind.PREORDERING)
    rep = check_membership(inst.F, T, tol=tol, max_iter=max_iter, reduce_degree=False)
    out = rep.outcome
    if out is None:
        out = SdpOutcome(Status.FEASIBLE, None, None, {})
    diag = dict(out.diagnostics)
    diag["membership"] = rep.status.value
    diag["witness_check"] = rep.notes.get("witness_check")
    diag["confirmed"] = rep.status is MembershipStatus.NOT_MEMBER_AT_DEGREE
    out.diagnostics = diag
    return out


# ---------------------------------------------------------------------------
def _factor_sigma(Q: np.ndarray, n: int, target_len: int, tol: float) -> MatrixPoly:
    """A square G with G^* G close to the Gram polynomial of Q.

    Candidates: the Gram factor itself after dropping tiny eigenvalues (square
    once padded with zero rows when at most n eigenvalues survive) and a
    Fejer-Riesz factor. The one closest to sigma wins.
    """
    Q = 0.5 * (Q + Q.conj().T)
    lam, U = np.linalg.eigh(Q)
    top = float(lam.max(initial=0.0))
    if top <= tol:
        return MatrixPoly(np.zeros((target_len, n, n), dtype=complex), Mode.FLOAT, n=n)
    sigma = gram_to_poly(Q, n)
    t = Q.shape[0] // n
    best, best_err = None, math.inf
    for rel in (1e-12, 1e-10, 1e-8, 1e-6):
        keep = lam > rel * top
        if keep.sum() > n:
            continue
        L = np.zeros((n, Q.shape[0]), dtype=complex)
        L[: keep.sum()] = np.sqrt(lam[keep])[:, None] * U[:, keep].conj().T
        c = np.zeros((target_len, n, n), dtype=complex)
        for j in range(t):
            c[j] = L[:, j * n : (j + 1) * n]
        G = MatrixPoly(c, Mode.FLOAT, n=n)
        err = (G.adjoint() * G).distance(sigma)
        if err < best_err:
            best, best_err = G, err
        break
    for ftol in (1e-9, 1e-8, 1e-7):
        if best_err <= 1e-3 * tol * top:
            break
        try:
            G, err = fejer_riesz(sigma, tol=ftol)
        except FactorizationError:
            continue
        if err < best_err:
            best, best_err = MatrixPoly(G.padded(target_len), Mode.FLOAT, n=n), err
    if best is None:
        raise FactorizationError("no square factor found for a Gram block")
    return best


def two_unbounded_factorize(F: MatrixPoly, a, b, tol: float = 1e-9, sdp_tol: float = 1e-10, max_iter: int = 200):
    """G, H with F = G^* G + H^* H (x - a)(x - b) for F PSD off (a, b).

    Returns (G, H, residual). deg G <= deg F / 2 and deg H <= deg F / 2 - 1.
    """
    a, b = _q(a), _q(b)
    if not a < b:
        raise ValueError("need a < b")
    if F.is_zero():
        z = MatrixPoly.zero(F.n, Mode.FLOAT)
        return z, z, 0.0
    D = int(F.degree)
    if D % 2:
        raise ValueError("deg F must be even")
    n = F.n
    alpha, beta = (b - a) / 2, (a + b) / 2
    # y in (-inf,-1] u [1,inf) maps to x = alpha y + beta
    F1 = F.affine_substitute(alpha, beta).reversal(D)
    S = Description([scalar_poly([1, 0, -1])])
    T = TruncatedPreordering(S, n, D, ModuleKind.QUADRATIC_MODULE)
    for stol in (sdp_tol, 10 * sdp_tol, 100 * sdp_tol):
        rep = check_membership(F1, T, tol=stol, max_iter=max_iter, reduce_degree=False)
        if rep.status is MembershipStatus.MEMBER:
            break
    if rep.status is not MembershipStatus.MEMBER:
        raise FactorizationError(f"membership on [-1, 1] returned {rep.status.value}")
    half = D // 2
    G1 = H1 = None
    for blk in rep.certificate.blocks:
        if any(blk.e):
            H1 = _factor_sigma(blk.Q, n, half, tol)
        else:
            G1 = _factor_sigma(blk.Q, n, half + 1, tol)
    if G1 is None:
        G1 = MatrixPoly(np.zeros((half + 1, n, n), dtype=complex), Mode.FLOAT, n=n)
    if H1 is None or half == 0:
        H1 = MatrixPoly(np.zeros((max(half, 1), n, n), dtype=complex), Mode.FLOAT, n=n)
    # pull back to |y| >= 1, then to x
    G = MatrixPoly(G1.padded(half + 1)[::-1].copy(), Mode.FLOAT, n=n)
    H = MatrixPoly(H1.padded(max(half, 1))[::-1].copy(), Mode.FLOAT, n=n) if half else H1
    inv_a = 1 / float(alpha)
    G = G.affine_substitute(inv_a, -float(beta) * inv_a)
    H = H.affine_substitute(inv_a, -float(beta) * inv_a).scale(inv_a)
    g = scalar_poly([a * b, -(a + b), 1]).to_float()
    G, H = _polish_pair(G.padded(half + 1), H.padded(max(half, 1)) if half else None, F.to_float(),
                        np.array([complex(c) for c in g.scalar_coeffs()]))
    if H is None:
        H = MatrixPoly.zero(n, Mode.FLOAT)
    resid = (G.adjoint() * G + H.adjoint() * H * g).distance(F.to_float())
    return G, H, resid


def _cross(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    out = np.zeros((X.shape[0] + Y.shape[0] - 1,) + X.shape[1:], dtype=complex)
    for i in range(X.shape[0]):
        Xi = X[i].conj().T
        for j in range(Y.shape[0]):
            out[i + j] += Xi @ Y[j]
    return out


def _polish_pair(Gc: np.ndarray, Hc: np.ndarray | None, F: MatrixPoly, g: np.ndarray, iters: int = 8):
    """Gauss-Newton on the coefficients of G^* G + H^* H g = F; keeps the best iterate.

    Coefficient arrays have fixed lengths, so degree bounds survive the polish.
    ``Hc`` None means H is pinned to zero.
    """
    n = F.n
    Gc = np.asarray(Gc, dtype=complex)
    Hc = np.zeros((0, n, n), dtype=complex) if Hc is None else np.asarray(Hc, dtype=complex)
    L = max(len(F.coeffs), 2 * len(Gc) - 1, 2 * len(Hc) + len(g) - 2)
    target = np.zeros((L, n, n), dtype=complex)
    target[: len(F.coeffs)] = F.coeffs

    def pad(c):
        out = np.zeros((L, n, n), dtype=complex)
        out[: len(c)] = c
        return out

    def weighted(c):
        out = np.zeros((len(c) + len(g) - 1, n, n), dtype=complex)
        for m, gm in enumerate(g):
            out[m : m + len(c)] += gm * c
        return out

    def resid(Gx, Hx):
        r = pad(_cross(Gx, Gx)) - target
        return r + pad(weighted(_cross(Hx, Hx))) if len(Hx) else r

    def flat(c):
        return np.concatenate([c.real.ravel(), c.imag.ravel()])

    sizes = (Gc.size, Hc.size)
    total = sum(sizes)
    best = (Gc, Hc)
    best_err = float(np.max(np.abs(resid(Gc, Hc))))
    cur = best
    for _ in range(iters):
        r = resid(*cur)
        J = np.empty((2 * r.size, 2 * total))
        for k in range(2 * total):
            d = np.zeros(total, dtype=complex)
            d[k % total] = 1.0 if k < total else 1j
            dG = d[: sizes[0]].reshape(Gc.shape)
            dH = d[sizes[0] :].reshape(Hc.shape)
            lin = pad(_cross(dG, cur[0]) + _cross(cur[0], dG))
            if len(Hc):
                lin = lin + pad(weighted(_cross(dH, cur[1]) + _cross(cur[1], dH)))
            J[:, k] = flat(lin)
        step, *_ = np.linalg.lstsq(J, -flat(r), rcond=None)
        delta = step[:total] + 1j * step[total:]
        cur = (cur[0] + delta[: sizes[0]].reshape(Gc.shape), cur[1] + delta[sizes[0] :].reshape(Hc.shape))
        err = float(np.max(np.abs(resid(*cur))))
        if err < best_err:
            best, best_err = cur, err
        else:
            break
    H = MatrixPoly(best[1], Mode.FLOAT, n=n) if len(Hc) else None
    return MatrixPoly(best[0], Mode.FLOAT, n=n), H
