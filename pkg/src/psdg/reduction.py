"""Pivot unitaries, congruence splitting and the recursive h^2 F construction.

The pivot unitaries carry entries 1/sqrt(2). They are stored exactly as
``T = diag(2^(-t_r/2)) * M`` with a Gaussian-integer matrix ``M`` and one
exponent per row. The recursion conjugates by ``M`` itself, which is
invertible with ``M^-1 = M^* diag(2^-t_r)``, so every intermediate polynomial
stays over Q(i).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .certsearch import (
    CertBlock,
    Certificate,
    MembershipStatus,
    ModuleKind,
    TruncatedPreordering,
    check_membership,
    verify_report,
)
from . import _sturm
from .gaussq import GaussQ, to_gaussq
from .polymat import MatrixPoly, Mode
from .semialg import Description, Point, SemialgSet

__all__ = [
    "ScaledUnitary",
    "PivotCase",
    "PivotData",
    "SchurSplit",
    "ReductionStep",
    "CertificatePlan",
    "pivot_unitaries",
    "schur_split",
    "factor_out_root",
    "select_pivot",
    "h2f_reduce",
    "sample_psd_on_set",
    "default_scalar_oracle",
    "ReductionError",
]

_ZERO = GaussQ(0)
_ONE = GaussQ(1)


class ReductionError(RuntimeError):
    pass


def _ctranspose(M: np.ndarray) -> np.ndarray:
    return np.conjugate(M).T


def _const(M: np.ndarray) -> MatrixPoly:
    return MatrixPoly(M[None, ...].copy(), Mode.EXACT, n=M.shape[0])


# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ScaledUnitary:
    """The matrix diag(2^(-t_r/2)) * M with Gaussian-integer M."""

    t: tuple
    M: np.ndarray

    @property
    def n(self) -> int:
        return self.M.shape[0]

    def to_float(self) -> np.ndarray:
        M = np.vectorize(complex, otypes=[complex])(self.M)
        return (2.0 ** (-np.array(self.t) / 2))[:, None] * M

    def gram(self) -> np.ndarray:
        """M M^*. T is unitary exactly when this equals diag(2^t_r)."""
        return self.M @ _ctranspose(self.M)

    def is_unitary(self) -> bool:
        P = self.gram()
        for i in range(self.n):
            for j in range(self.n):
                if i == j:
                    if P[i, i] != GaussQ(2 ** self.t[i]):
                        return False
                elif P[i, j]:
                    return False
        return True

    def top_left(self, G: MatrixPoly) -> MatrixPoly:
        """Entry (1,1) of T G T^*, exact."""
        row = self.M[0:1, :]
        C = np.matmul(np.matmul(row, G.coeffs), _ctranspose(row))
        return MatrixPoly(C, Mode.EXACT, n=1).scale(GaussQ(Fraction(1, 2 ** self.t[0])))

    def integer_conj(self, G: MatrixPoly) -> MatrixPoly:
        """M G M^* (exact)."""
        if G.is_zero():
            return G
        C = np.matmul(np.matmul(self.M, G.coeffs), _ctranspose(self.M))
        return MatrixPoly(C, Mode.EXACT, n=G.n)

    def integer_inverse(self) -> np.ndarray:
        """M^-1 = M^* diag(2^-t_r)."""
        D = np.empty(self.n, dtype=object)
        for r, t in enumerate(self.t):
            D[r] = GaussQ(Fraction(1, 2**t))
        return _ctranspose(self.M) * D[None, :]

    def to_json(self) -> dict:
        return {
            "row_scale_exponents": [f"2^(-{t}/2)" for t in self.t],
            "M": [[[str(z.re), str(z.im)] for z in row] for row in self.M],
        }


def _perm_rows(n: int, k: int) -> list:
    idx = list(range(n))
    idx[0], idx[k - 1] = idx[k - 1], idx[0]
    return idx


def _matrix(rows) -> np.ndarray:
    a = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            a[i, j] = to_gaussq(v)
    return a


def pivot_unitaries(n: int, k: int, l: int):
    """(U_kl, V_kl) for 1 <= k <= l <= n (1-based)."""
    if not (isinstance(n, int) and 1 <= k <= l <= n):
        raise ValueError(f"need 1 <= k <= l <= n, got k={k}, l={l}, n={n}")
    perm = _perm_rows(n, k)
    I = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    if k == l:
        M = _matrix([I[perm[r]] for r in range(n)])
        T = ScaledUnitary(tuple([0] * n), M)
        return T, T
    ki, li = k - 1, l - 1
    S = [row[:] for row in I]
    St = [row[:] for row in I]
    # rows k and l are 1/sqrt(2) times these Gaussian-integer rows
    S[ki] = [0] * n
    S[li] = [0] * n
    S[ki][ki] = S[ki][li] = S[li][ki] = 1
    S[li][li] = -1
    St[ki] = [0] * n
    St[li] = [0] * n
    St[ki][ki] = St[li][ki] = 1
    St[ki][li] = (0, 1)
    St[li][li] = (0, -1)
    t = [1 if r in (ki, li) else 0 for r in range(n)]
    rows_U = [S[perm[r]] for r in range(n)]
    rows_V = [St[perm[r]] for r in range(n)]
    tt = tuple(t[perm[r]] for r in range(n))
    return ScaledUnitary(tt, _matrix(rows_U)), ScaledUnitary(tt, _matrix(rows_V))


# ---------------------------------------------------------------------------
@dataclass
class SchurSplit:
    d: MatrixPoly
    D: MatrixPoly
    L_plus: MatrixPoly
    L_minus: MatrixPoly

    def __iter__(self):
        return iter((self.d, self.D, self.L_plus, self.L_minus))


def _diag2(d: MatrixPoly, D: MatrixPoly) -> MatrixPoly:
    n = D.n + 1
    length = max(len(d.coeffs), len(D.coeffs), 1)
    C = np.empty((length, n, n), dtype=object)
    C[...] = _ZERO
    C[: len(d.coeffs), 0:1, 0:1] = d.coeffs
    C[: len(D.coeffs), 1:, 1:] = D.coeffs
    return MatrixPoly(C, Mode.EXACT, n=n)


def _partition(F: MatrixPoly):
    a = F.entry(0, 0)
    n = F.n
    length = max(len(F.coeffs), 1)
    Fc = F.padded(length)
    beta = Fc[:, 0:1, 1:]  # (L, 1, n-1)
    C = MatrixPoly(Fc[:, 1:, 1:].copy(), Mode.EXACT, n=n - 1)
    return a, beta, C


def _triangular(a: MatrixPoly, beta: np.ndarray, n: int, sign: int, lower: bool) -> MatrixPoly:
    """Upper [[a, s*beta],[0, a I]] or lower [[a^*, 0],[s*beta^*, a^* I]]."""
    length = max(len(a.coeffs), beta.shape[0], 1)
    C = np.empty((length, n, n), dtype=object)
    C[...] = _ZERO
    ac = a.adjoint().coeffs if lower else a.coeffs
    for m in range(len(ac)):
        for i in range(n):
            C[m, i, i] = ac[m, 0, 0]
    for m in range(beta.shape[0]):
        for j in range(n - 1):
            v = beta[m, 0, j]
            if lower:
                C[m, j + 1, 0] = v.conjugate() * sign
            else:
                C[m, 0, j + 1] = v * sign
    return MatrixPoly(C, Mode.EXACT, n=n)


def schur_split(F: MatrixPoly, verify: bool = True) -> SchurSplit:
    """d = a^3, D = a(a C - beta^* beta) and the triangular congruence factors.

    Both congruence identities are checked exactly before returning.
    """
    if F.mode is not Mode.EXACT:
        raise ValueError("schur_split works in exact arithmetic")
    if F.n < 2:
        raise ValueError("schur_split needs n >= 2")
    if not F.is_hermitian():
        raise ValueError("F must be Hermitian")
    n = F.n
    a, beta, C = _partition(F)
    # beta^* beta as an (n-1) x (n-1) polynomial
    L = beta.shape[0]
    bb = np.empty((max(2 * L - 1, 1), n - 1, n - 1), dtype=object)
    bb[...] = _ZERO
    for p in range(L):
        bp = np.conjugate(beta[p, 0, :])
        for q in range(L):
            bq = beta[q, 0, :]
            bb[p + q] = bb[p + q] + np.outer(bp, bq)
    BB = MatrixPoly(bb, Mode.EXACT, n=n - 1)
    d = a * a * a
    D = a * (a * C - BB)
    L_plus = _triangular(a, beta, n, +1, lower=False)
    L_minus = _triangular(a, beta, n, +1, lower=True)
    if verify:
        mid = _diag2(d, D)
        lhs = (a * a * a * a) * F
        rhs = L_minus * mid * L_plus
        if lhs != rhs:
            raise ReductionError("congruence identity (i) failed")
        Lm2 = _triangular(a, beta, n, -1, lower=True)
        Lp2 = _triangular(a, beta, n, -1, lower=False)
        if Lm2 * F * Lp2 != mid:
            raise ReductionError("congruence identity (ii) failed")
    return SchurSplit(d, D, L_plus, L_minus)


# ---------------------------------------------------------------------------
def _x0_exact(x0) -> GaussQ:
    if isinstance(x0, complex):
        return GaussQ(Fraction(x0.real).limit_denominator(10**12), Fraction(x0.imag).limit_denominator(10**12))
    if isinstance(x0, float):
        return GaussQ(Fraction(x0).limit_denominator(10**12))
    return to_gaussq(x0)


def root_factor(x0) -> MatrixPoly:
    z = _x0_exact(x0)
    if z.is_real():
        return MatrixPoly.scalar([-z, 1], Mode.EXACT)
    # (x - z)(x - conj z) = x^2 - 2 Re z x + |z|^2
    return MatrixPoly.scalar([GaussQ(z.norm2()), GaussQ(-2 * z.re), 1], Mode.EXACT)


def factor_out_root(F: MatrixPoly, x0):
    """(c, m, G) with F = c^m G and G(x0) != 0."""
    if F.mode is not Mode.EXACT:
        raise ValueError("factor_out_root works in exact arithmetic")
    c = root_factor(x0)
    if F.is_zero():
        raise ValueError("F is identically zero")
    m = 0
    G = F
    while True:
        q, r = G.divmod_scalar(c)
        if not r.is_zero():
            break
        G = q
        m += 1
    return c, m, G


class PivotCase(str, Enum):
    CASE1 = "CASE1"
    CASE2_P = "CASE2_P"
    CASE2_R = "CASE2_R"


@dataclass
class PivotData:
    case: PivotCase
    k0: int
    l0: int
    T: ScaledUnitary
    pivot: MatrixPoly

    def to_json(self) -> dict:
        return {
            "case": self.case.value,
            "k0": self.k0,
            "l0": self.l0,
            "T": self.T.to_json(),
            "pivot": self.pivot.to_json(),
        }


def _re_im_poly(g: MatrixPoly):
    gc = g.adjoint()  # conjugated coefficients for n = 1
    re = (g + gc).scale(GaussQ(Fraction(1, 2)))
    im = (g - gc).scale(GaussQ(0, Fraction(-1, 2)))
    return re, im


def select_pivot(G: MatrixPoly, x0) -> PivotData:
    z = _x0_exact(x0)
    if G.mode is not Mode.EXACT:
        raise ValueError("select_pivot works in exact arithmetic")
    n = G.n
    val = G.evaluate(z)
    if not any(val.flat):
        raise ValueError("G(x0) = 0: factor out the root first")
    for k in range(1, n + 1):
        if val[k - 1, k - 1]:
            U, _ = pivot_unitaries(n, k, k)
            return PivotData(PivotCase.CASE1, k, k, U, G.entry(k - 1, k - 1))
    for k in range(1, n + 1):
        for l in range(k + 1, n + 1):
            re, im = _re_im_poly(G.entry(k - 1, l - 1))
            if re.evaluate(z)[0, 0] or im.evaluate(z)[0, 0]:
                U, V = pivot_unitaries(n, k, l)
                p = U.top_left(G)
                if p.evaluate(z)[0, 0]:
                    return PivotData(PivotCase.CASE2_P, k, l, U, p)
                r = V.top_left(G)
                if not r.evaluate(z)[0, 0]:
                    raise ReductionError("both pivot candidates vanish; the dichotomy argument was violated")
                return PivotData(PivotCase.CASE2_R, k, l, V, r)
    raise ReductionError("no pivot found although G(x0) != 0")


# ---------------------------------------------------------------------------
def _chebyshev_nodes(lo: float, hi: float, count: int):
    k = np.arange(count)
    t = np.cos((2 * k + 1) * np.pi / (2 * count))
    return list(0.5 * (lo + hi) + 0.5 * (hi - lo) * t) + [lo, hi]


def sample_psd_on_set(F: MatrixPoly, K: SemialgSet, tol: float = 1e-9, per_interval: int = 64) -> dict:
    """Eigenvalue guard on Chebyshev-spaced samples of every piece of K (not a proof)."""
    Ff = F.to_float()
    scale = max(1.0, Ff.max_abs())
    pts = []
    for piece in K.pieces:
        if isinstance(piece, Point):
            pts.append(float(piece.a))
            continue
        lo, hi = piece.lo, piece.hi
        lo_f = float(lo) if lo != -math.inf else None
        hi_f = float(hi) if hi != math.inf else None
        if lo_f is not None and hi_f is not None:
            pts += _chebyshev_nodes(lo_f, hi_f, per_interval)
        else:
            base = lo_f if lo_f is not None else hi_f
            sgn = 1.0 if lo_f is not None else -1.0
            pts += [base + sgn * (2.0**j - 1) for j in range(per_interval // 2)]
    worst, at = math.inf, None
    for x in pts:
        lam = float(np.linalg.eigvalsh(Ff.evaluate(x)).min()) / scale
        if lam < worst:
            worst, at = lam, x
    return {"ok": worst >= -tol, "min_eigenvalue": worst, "at": at, "samples": len(pts)}


# ---------------------------------------------------------------------------
def default_scalar_oracle(extra_degree: int = 6, tol: float = 1e-9):
    """Scalar membership in M_S, escalating the degree upwards from deg p."""

    def oracle(p: MatrixPoly, S: Description):
        base = max(int(p.degree), 0) if not p.is_zero() else 0
        last = None
        for d in range(base, base + extra_degree + 1):
            T = TruncatedPreordering(S, 1, d, ModuleKind.QUADRATIC_MODULE)
            rep = check_membership(p, T, tol=tol)
            last = rep
            if rep.status is MembershipStatus.MEMBER:
                return rep.certificate
        raise ReductionError(f"scalar oracle could not certify membership (last status {last.status.value})")

    return oracle


def _gram_congruence(Q: np.ndarray, n_in: int, P: np.ndarray) -> np.ndarray:
    """Gram matrix of P^* sigma P, where sigma has Gram Q (size n_in) and P has coefficients P[u] (n_in x n_out)."""
    t = Q.shape[0] // n_in - 1
    U, _, n_out = P.shape
    deg = U - 1
    R = np.zeros(((t + 1) * n_in, (t + deg + 1) * n_out), dtype=complex)
    for j in range(t + 1):
        for u in range(U):
            a = j + u
            R[j * n_in : (j + 1) * n_in, a * n_out : (a + 1) * n_out] = P[u]
    Qn = R.conj().T @ Q @ R
    return 0.5 * (Qn + Qn.conj().T)


def _embed_block_diag(Qd: np.ndarray, QD: np.ndarray, nD: int) -> np.ndarray:
    """Gram of diag(sigma_d, sigma_D) over v (x) I_{1+nD}."""
    n = nD + 1
    td = Qd.shape[0] - 1
    tD = QD.shape[0] // nD - 1
    t = max(td, tD)
    Q = np.zeros(((t + 1) * n, (t + 1) * n), dtype=complex)
    for j in range(td + 1):
        for l in range(td + 1):
            Q[j * n, l * n] = Qd[j, l]
    for j in range(tD + 1):
        for l in range(tD + 1):
            Q[j * n + 1 : j * n + n, l * n + 1 : l * n + n] = QD[j * nD : (j + 1) * nD, l * nD : (l + 1) * nD]
    return Q


def _scalar_coeff_matrix(h: MatrixPoly, n: int) -> np.ndarray:
    hc = h.to_float().coeffs[:, 0, 0]
    return np.stack([c * np.eye(n) for c in hc]) if len(hc) else np.zeros((1, n, n))


@dataclass
class ReductionStep:
    c: MatrixPoly
    m: int
    pivot_data: PivotData
    d: MatrixPoly
    D: MatrixPoly
    L_plus: MatrixPoly
    L_minus: MatrixPoly

    def to_json(self) -> dict:
        return {
            "c": self.c.to_json(),
            "m": self.m,
            "pivot": self.pivot_data.to_json(),
            "d": self.d.to_json(),
            "D": self.D.to_json(),
            "L_plus": self.L_plus.to_json(),
        }


@dataclass
class CertificatePlan:
    h: MatrixPoly
    F: MatrixPoly
    S: Description
    x0: object
    steps: list
    scalar_certificates: list
    certificate: Certificate | None
    degree: int
    notes: dict = field(default_factory=dict)

    def target(self) -> MatrixPoly:
        return (self.h * self.h) * self.F

    def verify(self, tol: float = 1e-6) -> dict:
        T = TruncatedPreordering(self.S, self.F.n, self.degree, ModuleKind.QUADRATIC_MODULE)
        tgt = self.target()
        scale = max(1.0, tgt.max_abs())
        return verify_report(tgt, T, self.certificate, tol * scale)

    def to_json(self) -> dict:
        z = _x0_exact(self.x0)
        return {
            "x0": [str(z.re), str(z.im)],
            "h": self.h.to_json(),
            "degree": self.degree,
            "steps": [s.to_json() for s in self.steps],
            "scalar_certificates": [c.to_json() for c in self.scalar_certificates],
            "certificate": self.certificate.to_json() if self.certificate is not None else None,
            "notes": self.notes,
        }


def _assemble_blocks(cert_d: Certificate, cert_D: Certificate, h1: MatrixPoly, nD: int, P: np.ndarray,
                     S: Description) -> dict:
    """Per generator index e: Gram of P^* diag(h1^2 sigma^d_e, sigma^D_e) P."""
    gd = {tuple(b.e): b.Q for b in cert_d.blocks}
    gD = {tuple(b.e): b.Q for b in cert_D.blocks}
    H1 = _scalar_coeff_matrix(h1, 1)
    out = {}
    for e in set(gd) | set(gD):
        Qd = gd.get(e, np.zeros((1, 1), dtype=complex))
        Qd = _gram_congruence(Qd, 1, H1)
        QD = gD.get(e, np.zeros((nD, nD), dtype=complex))
        Q = _embed_block_diag(Qd, QD, nD)
        out[e] = _gram_congruence(Q, nD + 1, P)
    return out


def _combine_certificate(grams: dict, S: Description, n: int) -> Certificate:
    blocks = []
    d = 0
    gens = S.coeff_lists()
    for e in sorted(grams):
        Q = grams[e]
        w = [Fraction(1)]
        for bit, g in zip(e, gens):
            if bit:
                w = _sturm.mul(w, g)
        t = Q.shape[0] // n - 1
        d = max(d, 2 * t + len(w) - 1)
        blocks.append(CertBlock(tuple(e), w, t, Q))
    return Certificate(S, n, d, ModuleKind.QUADRATIC_MODULE, blocks)


def h2f_reduce(F: MatrixPoly, K: SemialgSet, S: Description, x0, scalar_oracle=None, tol: float = 1e-9,
               check_psd: bool = True) -> tuple:
    """Return (h, plan) with h(x0) != 0 and a certificate for h^2 F in M^n_S."""
    if F.mode is not Mode.EXACT:
        raise ValueError("h2f_reduce works in exact arithmetic")
    if not K.is_compact():
        raise ValueError("h2f_reduce needs a compact set")
    if not F.is_hermitian():
        raise ValueError("F must be Hermitian")
    if check_psd:
        chk = sample_psd_on_set(F, K, tol)
        if not chk["ok"]:
            raise ReductionError(f"F is not PSD on K: eigenvalue {chk['min_eigenvalue']:.3e} at x = {chk['at']}")
    oracle = scalar_oracle or default_scalar_oracle()
    z = _x0_exact(x0)
    h, cert, steps, scalars = _reduce(F, S, z, oracle)
    tgt = (h * h) * F
    plan = CertificatePlan(h, F, S, x0, steps, scalars, cert, cert.d if cert else 0)
    if cert is not None:
        cert.residual = cert.total().distance(tgt.to_float())
    plan.notes["degree_bound"] = (max(int(F.degree), 0) if not F.is_zero() else 0) * (3**F.n - 1)
    return h, plan


def _zero_certificate(S: Description, n: int) -> Certificate:
    e0 = tuple([0] * len(S))
    return Certificate(S, n, 0, ModuleKind.QUADRATIC_MODULE, [CertBlock(e0, [Fraction(1)], 0, np.zeros((n, n), complex))],
                       residual=0.0)


def _reduce(F: MatrixPoly, S: Description, z: GaussQ, oracle):
    n = F.n
    one = MatrixPoly.scalar([1], Mode.EXACT)
    if F.is_zero():
        return one, _zero_certificate(S, n), [], []
    if n == 1:
        cert = oracle(F, S)
        return one, cert, [], [cert]
    c, m, G = factor_out_root(F, z)
    piv = select_pivot(G, z)
    # conjugate by the Gaussian-integer part M of the pivot unitary
    Gm = piv.T.integer_conj(G)
    split = schur_split(Gm)
    a0 = Gm.entry(0, 0)
    cm = c**m
    d = cm * split.d
    D = cm * split.D
    h1, cert_D, steps, scalars = _reduce(D, S, z, oracle)
    cert_d = oracle(d, S)
    scalars = [cert_d] + scalars
    # exact check of the assembled identity a0^4 F = (L M^-*)^* diag(d, D) (L M^-*)
    Minv = piv.T.integer_inverse()
    P_exact = split.L_plus * _const(_ctranspose(Minv))
    lhs = (a0 * a0 * a0 * a0) * F
    rhs = P_exact.adjoint() * _diag2(d, D) * P_exact
    if lhs != rhs:
        raise ReductionError("assembled congruence identity failed")
    P = P_exact.to_float().coeffs
    grams = _assemble_blocks(cert_d, cert_D, h1, n - 1, P, S)
    cert = _combine_certificate(grams, S, n)
    h = h1 * a0 * a0
    if not h.real_part_entries_are_real():
        raise ReductionError("h is not a real polynomial")
    if not h.evaluate(z)[0, 0]:
        raise ReductionError("h vanishes at x0")
    step = ReductionStep(c, m, piv, d, D, split.L_plus, split.L_minus)
    return h, cert, [step] + steps, scalars
