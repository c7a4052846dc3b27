"""Gram-matrix certificates for truncated quadratic modules and preorderings.

A sum of hermitian squares of degree <= 2t is written
``sigma(x) = V(x)^* Q V(x)`` with ``V(x) = (1, x, ..., x^t)^T (x) I_n`` and
``Q`` Hermitian PSD; row/column index ``j*n + i`` pairs monomial ``x^j`` with
matrix row ``i``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from . import _sturm
from .polymat import MatrixPoly, Mode
from .sdp import SdpOutcome, SdpProblem, Status, solve, verify_witness
from .semialg import Description, rational_coeffs, scalar_poly

__all__ = [
    "ModuleKind",
    "TruncatedPreordering",
    "CertBlock",
    "Certificate",
    "MembershipStatus",
    "MembershipReport",
    "build_membership_sdp",
    "check_membership",
    "extract_certificate",
    "verify_certificate",
    "fejer_riesz",
    "denominator_search",
    "DenominatorResult",
    "gram_to_poly",
]


class ModuleKind(str, Enum):
    PREORDERING = "PREORDERING"
    QUADRATIC_MODULE = "QUADRATIC_MODULE"


@dataclass(frozen=True)
class TruncatedPreordering:
    S: Description
    n: int
    d: int
    mode: ModuleKind = ModuleKind.PREORDERING

    def __post_init__(self):
        if self.d < 0:
            raise ValueError("degree bound must be non-negative")
        if self.n <= 0:
            raise ValueError("matrix size must be positive")
        object.__setattr__(self, "mode", ModuleKind(self.mode))

    def exponents(self) -> list:
        """All exponent tuples of the module, before degree filtering."""
        s = len(self.S)
        if self.mode is ModuleKind.PREORDERING:
            return [tuple(e) for e in itertools.product((0, 1), repeat=s)]
        out = [tuple([0] * s)]
        for j in range(s):
            e = [0] * s
            e[j] = 1
            out.append(tuple(e))
        return out

    def weight(self, e) -> list:
        """g^e as Fraction coefficients."""
        w = [Fraction(1)]
        for bit, g in zip(e, self.S.coeff_lists()):
            if bit:
                w = _sturm.mul(w, g)
        return w

    def blocks(self) -> list:
        """(e, weight, d_e) for every product that fits under the degree bound."""
        out = []
        for e in self.exponents():
            w = self.weight(e)
            if not w:
                continue
            dw = len(w) - 1
            if dw > self.d:
                continue
            out.append((e, w, (self.d - dw) // 2))
        return out

    def max_weight_degree(self) -> int:
        return max((len(self.weight(e)) - 1 for e in self.exponents() if self.weight(e)), default=0)


# ---------------------------------------------------------------------------
def gram_to_poly(Q: np.ndarray, n: int) -> MatrixPoly:
    """V(x)^* Q V(x) as a FLOAT matrix polynomial."""
    t = Q.shape[0] // n - 1
    coeffs = np.zeros((2 * t + 1, n, n), dtype=complex)
    for j in range(t + 1):
        for l in range(t + 1):
            coeffs[j + l] += Q[j * n : (j + 1) * n, l * n : (l + 1) * n]
    return MatrixPoly(coeffs, Mode.FLOAT, n=n)


def _weight_poly(w) -> MatrixPoly:
    return MatrixPoly(np.array([complex(float(c)) for c in w]).reshape(-1, 1, 1), Mode.FLOAT, n=1)


@dataclass
class CertBlock:
    e: tuple
    weight: list  # Fractions
    d_e: int
    Q: np.ndarray
    clipped: float = 0.0

    def sigma(self, n: int) -> MatrixPoly:
        return gram_to_poly(self.Q, n)

    def factors(self, n: int, tol: float = 0.0) -> list:
        """Matrices L (rows x n(d_e+1)) with Q = L^* L, from the eigendecomposition."""
        w, U = np.linalg.eigh(self.Q)
        keep = w > tol
        return (np.sqrt(w[keep])[:, None] * U[:, keep].conj().T)


@dataclass
class Certificate:
    S: Description
    n: int
    d: int
    mode: ModuleKind
    blocks: list
    residual: float = math.nan
    scale: float = 1.0

    def total(self) -> MatrixPoly:
        acc = MatrixPoly.zero(self.n, Mode.FLOAT)
        for blk in self.blocks:
            acc = acc + blk.sigma(self.n) * _weight_poly(blk.weight)
        return acc

    def to_json(self) -> dict:
        return {
            "S": self.S.to_json(),
            "n": self.n,
            "d": self.d,
            "mode": self.mode.value,
            "residual": float(self.residual),
            "blocks": [
                {
                    "e": list(b.e),
                    "Q": [[[float(z.real), float(z.imag)] for z in row] for row in b.Q],
                    "residual": float(b.clipped),
                }
                for b in self.blocks
            ],
        }

    @classmethod
    def from_json(cls, data) -> "Certificate":
        if not isinstance(data, dict):
            raise ValueError("certificate JSON must be an object")
        for key in ("S", "n", "d", "mode", "blocks"):
            if key not in data:
                raise ValueError(f"certificate JSON missing field '{key}'")
        S = Description.from_json(data["S"])
        try:
            mode = ModuleKind(data["mode"])
        except ValueError:
            raise ValueError("field 'mode' must be PREORDERING or QUADRATIC_MODULE") from None
        n, d = data["n"], data["d"]
        if not isinstance(n, int) or not isinstance(d, int):
            raise ValueError("fields 'n' and 'd' must be integers")
        T = TruncatedPreordering(S, n, d, mode)
        blocks = []
        for i, b in enumerate(data["blocks"]):
            try:
                e = tuple(int(v) for v in b["e"])
                Q = np.array([[complex(p[0], p[1]) for p in row] for row in b["Q"]], dtype=complex)
            except (KeyError, TypeError, ValueError, IndexError):
                raise ValueError(f"field 'blocks[{i}]' is malformed") from None
            if len(e) != len(S) or Q.ndim != 2 or Q.shape[0] != Q.shape[1] or Q.shape[0] % n:
                raise ValueError(f"field 'blocks[{i}]' has inconsistent dimensions")
            w = T.weight(e)
            blocks.append(CertBlock(e, w, Q.shape[0] // n - 1, Q, float(b.get("residual", 0.0))))
        return cls(S, n, d, mode, blocks, float(data.get("residual", math.nan)))


class MembershipStatus(str, Enum):
    MEMBER = "MEMBER"
    NOT_MEMBER_AT_DEGREE = "NOT_MEMBER_AT_DEGREE"
    UNKNOWN = "UNKNOWN"


@dataclass
class MembershipReport:
    status: MembershipStatus
    certificate: Certificate | None = None
    witness: np.ndarray | None = None
    outcome: SdpOutcome | None = None
    problem: SdpProblem | None = None
    notes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"status": self.status.value, "notes": dict(self.notes)}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.witness is not None:
            out["witness"] = [float(v) for v in self.witness]
        if self.outcome is not None:
            out["sdp"] = self.outcome.to_json()
        return out


# ---------------------------------------------------------------------------
def _as_float(F: MatrixPoly) -> np.ndarray:
    return F.to_float().coeffs


def _check_input(F: MatrixPoly, T: TruncatedPreordering):
    if F.n != T.n:
        raise ValueError(f"F has size {F.n} but the module has n={T.n}")
    if F.degree > T.d:
        raise ValueError(f"deg F = {F.degree} exceeds the degree bound d = {T.d}")
    if not F.is_hermitian(1e-9 * max(1.0, F.max_abs())):
        raise ValueError("F is not Hermitian")


def build_membership_sdp(F: MatrixPoly, T: TruncatedPreordering, objective=None) -> SdpProblem:
    """Coefficient-matching SDP for F in T^n_{S,d}; one Hermitian block per product g^e."""
    _check_input(F, T)
    n, d = T.n, T.d
    Fc = np.zeros((d + 1, n, n), dtype=complex)
    if not F.is_zero():
        Fc[: len(F.coeffs)] = _as_float(F)
    blocks = T.blocks()
    if not blocks:
        raise ValueError("no product g^e fits under the degree bound")
    sizes = [n * (de + 1) for _, _, de in blocks]
    # W[m][b][(j,i),(l,k)] patterns, grouped by (m, i, k)
    constraints = []
    for m in range(d + 1):
        for i in range(n):
            for k in range(i, n):
                Wre = []
                any_nz = False
                for (e, w, de), N in zip(blocks, sizes):
                    W = np.zeros((N, N))
                    for t, gt in enumerate(w):
                        if not gt:
                            continue
                        s = m - t
                        for j in range(max(0, s - de), min(de, s) + 1):
                            l = s - j
                            W[j * n + i, l * n + k] += float(gt)
                    any_nz = any_nz or bool(W.any())
                    Wre.append(W)
                rhs = Fc[m, i, k]
                re_mats = [0.5 * (W.T + W) if W.any() else None for W in Wre]
                constraints.append((re_mats, float(rhs.real)))
                if i != k:
                    im_mats = [0.5j * (W - W.T) if W.any() else None for W in Wre]
                    constraints.append((im_mats, float(rhs.imag)))
    return SdpProblem(sizes, constraints, objective=objective, hermitian=[True] * len(blocks))


def extract_certificate(sol: SdpOutcome, T: TruncatedPreordering, F: MatrixPoly | None = None, tol: float = 1e-8,
                        scale: float = 1.0) -> Certificate:
    """Clip Gram eigenvalues at zero and package the certificate.

    Eigenvalues down to -10*tol are clipped; anything more negative rejects
    the solution.
    """
    if sol.status is not Status.FEASIBLE:
        raise ValueError("only FEASIBLE outcomes carry a certificate")
    blocks = []
    for (e, w, de), Q in zip(T.blocks(), sol.primal):
        Q = 0.5 * (Q + Q.conj().T) * scale
        lam, U = np.linalg.eigh(Q)
        lo = float(lam.min())
        if lo < -10 * tol * max(1.0, scale):
            raise ValueError(f"Gram block {e} has eigenvalue {lo:.3e} below the clipping threshold")
        lam_c = np.clip(lam, 0.0, None)
        Qc = (U * lam_c) @ U.conj().T
        blocks.append(CertBlock(e, w, de, 0.5 * (Qc + Qc.conj().T), float(max(0.0, -lo))))
    cert = Certificate(T.S, T.n, T.d, T.mode, blocks)
    if F is not None:
        cert.residual = cert.total().distance(F.to_float())
    return cert


def verify_certificate(F: MatrixPoly, T: TruncatedPreordering, C: Certificate, tol: float) -> bool:
    """Recompute sum_e sigma_e g^e from the stored Gram matrices and compare with F."""
    return _verify(F, T, C, tol)["ok"]


def verify_report(F: MatrixPoly, T: TruncatedPreordering, C: Certificate, tol: float) -> dict:
    return _verify(F, T, C, tol)


def _verify(F, T, C, tol):
    n = T.n
    allowed = set(T.exponents())
    if C.n != n:
        return {"ok": False, "reason": "size mismatch", "residual": math.inf}
    acc = np.zeros((T.d + 1, n, n), dtype=complex)
    min_eig = math.inf
    gens = T.S.coeff_lists()
    for blk in C.blocks:
        if tuple(blk.e) not in allowed:
            return {"ok": False, "reason": f"exponent {blk.e} not in the module", "residual": math.inf}
        w = [Fraction(1)]
        for bit, g in zip(blk.e, gens):
            if bit:
                w = _sturm.mul(w, g)
        Q = np.asarray(blk.Q, dtype=complex)
        N = Q.shape[0]
        if N % n:
            return {"ok": False, "reason": "Gram size not a multiple of n", "residual": math.inf}
        t = N // n - 1
        if 2 * t + len(w) - 1 > T.d:
            return {"ok": False, "reason": f"block {blk.e} exceeds degree {T.d}", "residual": math.inf}
        if np.max(np.abs(Q - Q.conj().T), initial=0.0) > tol:
            return {"ok": False, "reason": "Gram matrix not Hermitian", "residual": math.inf}
        min_eig = min(min_eig, float(np.linalg.eigvalsh(0.5 * (Q + Q.conj().T)).min()))
        # sigma coefficients entry by entry, then convolve with the weight
        for a in range(t + 1):
            for b in range(t + 1):
                blockab = Q[a * n : (a + 1) * n, b * n : (b + 1) * n]
                for s, ws in enumerate(w):
                    if ws:
                        acc[a + b + s] += float(ws) * blockab
    target = np.zeros_like(acc)
    Fc = F.to_float().coeffs
    if len(Fc) > T.d + 1:
        return {"ok": False, "reason": "deg F exceeds d", "residual": math.inf}
    target[: len(Fc)] = Fc
    resid = float(np.max(np.abs(acc - target))) if acc.size else 0.0
    ok = resid <= tol and min_eig >= -tol
    return {"ok": ok, "residual": resid, "min_eigenvalue": min_eig}


def top_degree_stable(S: Description) -> bool:
    """Whether every generator is positive near +inf, or every one near -inf.

    Then leading terms of sum_e sigma_e g^e cannot cancel, so any certificate
    of F has all summands of degree <= deg F.
    """
    gens = [g for g in S.coeff_lists() if g]
    if not gens:
        return True
    plus = all(g[-1] > 0 for g in gens)
    minus = all(g[-1] * (-1) ** (len(g) - 1) > 0 for g in gens)
    return plus or minus


def effective_degree(F: MatrixPoly, T: TruncatedPreordering) -> int:
    if F.is_zero() or not top_degree_stable(T.S):
        return T.d
    return min(T.d, int(F.degree))


def check_membership(F: MatrixPoly, T: TruncatedPreordering, tol: float = 1e-8, max_iter: int = 200,
                     objective=None, reduce_degree: bool = True) -> MembershipReport:
    """Search for F in T^n_{S,d}.

    With ``reduce_degree`` the search runs at deg F whenever the description
    is top-degree stable; this is an equivalence, and it keeps spurious
    near-certificates with vanishing high-degree terms out of the result.
    """
    _check_input(F, T)
    T_in = T
    if reduce_degree and objective is None:
        d_eff = effective_degree(F, T)
        if d_eff != T.d:
            T = TruncatedPreordering(T.S, T.n, d_eff, T.mode)
    scale = F.max_abs()
    if scale == 0:
        blocks = [CertBlock(e, w, de, np.zeros((T.n * (de + 1),) * 2, dtype=complex)) for e, w, de in T.blocks()]
        cert = Certificate(T.S, T.n, T.d, T.mode, blocks, residual=0.0)
        return MembershipReport(MembershipStatus.MEMBER, certificate=cert, notes={"scale": 0.0})
    Fn = F.to_float().scale(1.0 / scale)
    prob = build_membership_sdp(Fn, T, objective=objective)
    out = solve(prob, tol=tol, max_iter=max_iter)
    notes = {"scale": scale, "sdp_iterations": out.diagnostics.get("iterations"), "effective_degree": T.d}
    if out.status is Status.FEASIBLE:
        try:
            cert = extract_certificate(out, T, F, tol=tol, scale=scale)
        except ValueError as exc:
            notes["reason"] = str(exc)
            return MembershipReport(MembershipStatus.UNKNOWN, outcome=out, problem=prob, notes=notes)
        cert.d = T_in.d
        rep = _verify(F, T_in, cert, 10 * tol * max(1.0, scale))
        notes["verification"] = rep
        if not rep["ok"]:
            notes["reason"] = "extracted certificate failed verification"
            return MembershipReport(MembershipStatus.UNKNOWN, outcome=out, problem=prob, notes=notes)
        return MembershipReport(MembershipStatus.MEMBER, certificate=cert, outcome=out, problem=prob, notes=notes)
    if out.status is Status.INFEASIBLE:
        chk = verify_witness(prob, out.witness)
        notes["witness_check"] = chk
        if chk["ok"]:
            return MembershipReport(MembershipStatus.NOT_MEMBER_AT_DEGREE, witness=out.witness, outcome=out,
                                    problem=prob, notes=notes)
    notes.setdefault("reason", out.diagnostics.get("reason", "solver indeterminate"))
    return MembershipReport(MembershipStatus.UNKNOWN, outcome=out, problem=prob, notes=notes)


# ---------------------------------------------------------------------------
class FactorizationError(RuntimeError):
    pass


def fejer_riesz(F: MatrixPoly, tol: float = 1e-9, max_iter: int = 200):
    """Return (G, residual) with G^* G = F for F PSD on the real line.

    The Gram matrix is chosen to maximise tr G(i)^* G(i); that optimum is
    attained by the outer factor, whose Gram matrix has rank n, so the
    top-n eigenpairs give G. For exact real input, squared real-rooted
    factors common to all entries are split off first: they leave the Gram
    feasible set without interior.
    """
    if F.is_zero():
        return MatrixPoly.zero(F.n, Mode.FLOAT), 0.0
    if F.degree % 2:
        raise ValueError("a polynomial positive on the line has even degree")
    s = _real_square_content(F)
    if len(s) > 1:
        sq = scalar_poly(_sturm.mul(s, s))
        Fr, rem = F.divmod_scalar(sq)
        assert rem.is_zero()
        Gr, _ = _fejer_riesz_core(Fr, tol, max_iter)
        G = Gr * scalar_poly(s).to_float()
        return G, (G.adjoint() * G).distance(F.to_float())
    return _fejer_riesz_core(F, tol, max_iter)


def _fejer_riesz_core(F: MatrixPoly, tol: float, max_iter: int):
    n = F.n
    N = F.degree // 2
    Ff = F.to_float().padded(2 * N + 1)
    T = TruncatedPreordering(Description([]), n, 2 * N)
    v = np.array([1j**j for j in range(N + 1)])
    Vi = np.kron(v[:, None], np.eye(n))  # n(N+1) x n
    C = -(Vi @ Vi.conj().T)
    rep = check_membership(F, T, tol=tol, max_iter=max_iter, objective=[C])
    if rep.status is not MembershipStatus.MEMBER:
        # plain feasibility; the top-n eigenpairs are then only a starting point
        rep = check_membership(F, T, tol=tol, max_iter=max_iter)
    if rep.status is not MembershipStatus.MEMBER:
        raise FactorizationError(f"membership search returned {rep.status.value}: {rep.notes.get('reason')}")
    Q = rep.certificate.blocks[0].Q
    lam, U = np.linalg.eigh(Q)
    top = np.argsort(lam)[::-1][:n]
    L = np.sqrt(np.clip(lam[top], 0, None))[:, None] * U[:, top].conj().T
    coeffs = np.stack([L[:, j * n : (j + 1) * n] for j in range(N + 1)])
    G = _polish_factor(coeffs, Ff)
    resid = (G.adjoint() * G).distance(F.to_float())
    return G, resid


def _squarefree_factors(p: list) -> list:
    """Yun's algorithm: [(f_i, i)] with p = c * prod f_i^i, f_i squarefree and coprime."""
    out = []
    a = _sturm.gcd(p, _sturm.derivative(p))
    b, _ = _sturm.divmod_poly(p, a)
    c, _ = _sturm.divmod_poly(_sturm.derivative(p), a)
    d = [x - y for x, y in zip(c + [Fraction(0)] * len(b), _sturm.derivative(b) + [Fraction(0)] * len(c))]
    d = _sturm.trim(d)
    i = 1
    while len(b) > 1:
        f = _sturm.gcd(b, d)
        out.append((f, i))
        b, _ = _sturm.divmod_poly(b, f)
        c, _ = _sturm.divmod_poly(d, f)
        db = _sturm.derivative(b)
        L = max(len(c), len(db))
        d = _sturm.trim([(c[k] if k < len(c) else 0) - (db[k] if k < len(db) else 0) for k in range(L)])
        i += 1
    return [(f, i) for f, i in out if len(f) > 1]


def _real_square_content(F: MatrixPoly) -> list:
    """Real polynomial s with s^2 dividing every entry, built from real-rooted squarefree factors."""
    if F.mode is not Mode.EXACT or not F.real_part_entries_are_real():
        return [Fraction(1)]
    g = []
    for i in range(F.n):
        for j in range(F.n):
            e = [Fraction(int(z.re.numerator), int(z.re.denominator)) for z in F.padded(F.degree + 1)[:, i, j]]
            e = _sturm.trim(e)
            if e:
                g = _sturm.gcd(g, e) if g else _sturm.monic(e)
    s = [Fraction(1)]
    for f, mult in _squarefree_factors(g):
        if mult >= 2 and _sturm.real_roots(f):
            for _ in range(mult // 2):
                s = _sturm.mul(s, f)
    return s


def _gram_coeffs(G: np.ndarray) -> np.ndarray:
    L = G.shape[0]
    out = np.zeros((2 * L - 1,) + G.shape[1:], dtype=complex)
    for a in range(L):
        Ga = G[a].conj().T
        for b in range(L):
            out[a + b] += Ga @ G[b]
    return out


def _polish_factor(G: np.ndarray, F: np.ndarray, iters: int = 8) -> MatrixPoly:
    """Gauss-Newton on the coefficients of G^* G = F, keeping the best iterate."""
    n = G.shape[1]
    shape = G.shape
    size = G.size

    def resid(g):
        return _gram_coeffs(g) - F

    def flat(c):
        return np.concatenate([c.real.ravel(), c.imag.ravel()])

    best = G
    best_err = float(np.max(np.abs(resid(G))))
    cur = G
    for _ in range(iters):
        r = resid(cur)
        J = np.empty((2 * r.size, 2 * size))
        for k in range(2 * size):
            d = np.zeros(size, dtype=complex)
            if k < size:
                d[k] = 1.0
            else:
                d[k - size] = 1j
            d = d.reshape(shape)
            lin = np.zeros_like(r)
            for a in range(shape[0]):
                for b in range(shape[0]):
                    lin[a + b] += d[a].conj().T @ cur[b] + cur[a].conj().T @ d[b]
            J[:, k] = flat(lin)
        step, *_ = np.linalg.lstsq(J, -flat(r), rcond=None)
        delta = (step[:size] + 1j * step[size:]).reshape(shape)
        cur = cur + delta
        err = float(np.max(np.abs(resid(cur))))
        if err < best_err:
            best, best_err = cur, err
        else:
            break
    return MatrixPoly(best, Mode.FLOAT, n=n)


# ---------------------------------------------------------------------------
@dataclass
class DenominatorResult:
    status: str  # "FOUND" or "EXHAUSTED"
    k: int | None
    d: int | None
    certificate: Certificate | None
    multiplied: MatrixPoly | None
    tried: list

    def to_json(self) -> dict:
        out = {"status": self.status, "k": self.k, "d": self.d, "tried": self.tried}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def default_schedule(degF: int, s_max: int):
    return lambda k: degF + 2 * k + 2 * s_max


def denominator_search(F: MatrixPoly, S: Description, w=1j, k_max: int = 12, d_schedule=None,
                       mode: ModuleKind = ModuleKind.PREORDERING, tol: float = 1e-8, max_iter: int = 200,
                       d_cap: int | None = None) -> DenominatorResult:
    """Smallest k <= k_max with ((x-conj w)(x-w))^k F in T^n_{S,d(k)}.

    UNKNOWN at d(k) triggers one retry at 2*d(k); a negative answer at the
    schedule degree moves on to k+1. EXHAUSTED never asserts non-existence.
    """
    w = complex(w)
    if w.imag == 0:
        raise ValueError("the denominator point must have non-zero imaginary part")
    re2 = Fraction(2 * w.real).limit_denominator(10**12) if w.real else Fraction(0)
    absw2 = Fraction(abs(w) ** 2).limit_denominator(10**12)
    q = scalar_poly([absw2, -re2, 1])
    exact_q = F.mode is Mode.EXACT
    T0 = TruncatedPreordering(S, F.n, max(F.degree, 0) if not F.is_zero() else 0, mode)
    s_max = T0.max_weight_degree()
    degF = max(F.degree, 0) if not F.is_zero() else 0
    sched = d_schedule or default_schedule(degF, s_max)
    tried = []
    Fk = F if exact_q else F.to_float()
    qq = q if exact_q else q.to_float()
    for k in range(k_max + 1):
        if k:
            Fk = qq * Fk
        d0 = max(int(sched(k)), degF + 2 * k)
        for d in (d0, 2 * d0):
            if d_cap is not None and d > d_cap:
                break
            T = TruncatedPreordering(S, F.n, d, mode)
            rep = check_membership(Fk, T, tol=tol, max_iter=max_iter)
            tried.append({"k": k, "d": d, "effective_degree": rep.notes.get("effective_degree", d),
                          "status": rep.status.value})
            if rep.status is MembershipStatus.MEMBER:
                return DenominatorResult("FOUND", k, d, rep.certificate, Fk, tried)
            if rep.status is MembershipStatus.NOT_MEMBER_AT_DEGREE:
                break
    return DenominatorResult("EXHAUSTED", None, None, None, None, tried)
