"""Dense semidefinite feasibility solver.

Problem form::

    find X_b >= 0 (one block per b)   with   sum_b <A_cb, X_b> = r_c  for every c

optionally minimising sum_b <C_b, X_b>. Complex Hermitian blocks are mapped to
real symmetric blocks of twice the size with the [[Re, -Im], [Im, Re]]
embedding. The solver is a primal-dual interior-point method on the
homogeneous self-dual embedding with Nesterov-Todd scaling and a Mehrotra
predictor-corrector, so that a single run yields either a primal solution or a
Farkas witness y with sum_c y_c A_cb < 0 for all b and y.r > 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "SdpProblem",
    "SdpOutcome",
    "Status",
    "solve",
    "verify_primal",
    "verify_witness",
    "WITNESS_MARGIN",
]

WITNESS_MARGIN = 1e-8
_SYM_TOL = 1e-12


class Status(str, Enum):
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"
    INDETERMINATE = "INDETERMINATE"


@dataclass
class SdpProblem:
    """Block SDP feasibility instance.

    ``constraints`` is a list of ``(mats, rhs)`` pairs where ``mats`` holds one
    matrix (or ``None`` for zero) per block. ``hermitian[b]`` marks complex
    Hermitian blocks; all others are real symmetric.
    """

    blocks: list
    constraints: list
    objective: list | None = None
    hermitian: list | None = None

    def __post_init__(self):
        self.blocks = [int(k) for k in self.blocks]
        if not self.blocks or any(k <= 0 for k in self.blocks):
            raise ValueError("block sizes must be positive")
        if self.hermitian is None:
            self.hermitian = [False] * len(self.blocks)
        self.hermitian = [bool(h) for h in self.hermitian]
        if len(self.hermitian) != len(self.blocks):
            raise ValueError("one hermitian flag per block")
        if not self.constraints:
            raise ValueError("at least one constraint is required")
        clean = []
        for c, (mats, rhs) in enumerate(self.constraints):
            if len(mats) != len(self.blocks):
                raise ValueError(f"constraint {c} has {len(mats)} blocks, expected {len(self.blocks)}")
            row = []
            for b, A in enumerate(mats):
                row.append(None if A is None else self._check_block(A, b, f"constraint {c}"))
            clean.append((row, float(rhs)))
        self.constraints = clean
        if self.objective is not None:
            if len(self.objective) != len(self.blocks):
                raise ValueError("objective needs one matrix per block")
            self.objective = [None if C is None else self._check_block(C, b, "objective") for b, C in enumerate(self.objective)]

    def _check_block(self, A, b, where):
        k = self.blocks[b]
        A = np.asarray(A, dtype=complex if self.hermitian[b] else float)
        if A.shape != (k, k):
            raise ValueError(f"{where}, block {b}: shape {A.shape} does not match block size {k}")
        scale = max(1.0, float(np.max(np.abs(A))) if A.size else 1.0)
        if np.max(np.abs(A - A.conj().T)) > _SYM_TOL * scale:
            raise ValueError(f"{where}, block {b}: matrix is not symmetric/Hermitian")
        return A

    @property
    def m(self) -> int:
        return len(self.constraints)

    @property
    def rhs(self) -> np.ndarray:
        return np.array([r for _, r in self.constraints])

    def apply(self, X_blocks) -> np.ndarray:
        """Constraint values sum_b <A_cb, X_b> for the given (original-space) blocks."""
        out = np.zeros(self.m)
        for c, (mats, _) in enumerate(self.constraints):
            s = 0.0
            for A, X in zip(mats, X_blocks):
                if A is not None:
                    s += float(np.real(np.sum(A.conj() * X)))
            out[c] = s
        return out

    def adjoint_apply(self, y) -> list:
        """sum_c y_c A_cb for each block b."""
        out = [np.zeros((k, k), dtype=complex if h else float) for k, h in zip(self.blocks, self.hermitian)]
        for yc, (mats, _) in zip(y, self.constraints):
            if yc:
                for b, A in enumerate(mats):
                    if A is not None:
                        out[b] = out[b] + yc * A
        return out

    def to_json(self) -> dict:
        """Sparse dump: upper-triangle entries per constraint and block."""

        def sparse(A):
            ents = []
            for i in range(A.shape[0]):
                for j in range(i, A.shape[1]):
                    v = complex(A[i, j])
                    if v != 0:
                        ents.append([i, j, v.real, v.imag])
            return ents

        cons = []
        for mats, r in self.constraints:
            cons.append(
                {
                    "rhs": r,
                    "blocks": [{"block": b, "entries": sparse(A)} for b, A in enumerate(mats) if A is not None],
                }
            )
        out = {
            "format": "block-sdp-sparse-v1",
            "blocks": [{"size": k, "hermitian": h} for k, h in zip(self.blocks, self.hermitian)],
            "constraints": cons,
        }
        if self.objective is not None:
            out["objective"] = [{"block": b, "entries": sparse(C)} for b, C in enumerate(self.objective) if C is not None]
        return out


@dataclass
class SdpOutcome:
    status: Status
    primal: list | None = None
    witness: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"status": self.status.value, "diagnostics": dict(self.diagnostics)}
        if self.witness is not None:
            out["witness"] = [float(v) for v in self.witness]
        return out


# ---------------------------------------------------------------------------
# independent checkers (no solver state)
# ---------------------------------------------------------------------------
def verify_primal(p: SdpProblem, X_blocks, tol: float) -> dict:
    vals = p.apply(X_blocks)
    r = p.rhs
    resid = float(np.max(np.abs(vals - r))) if len(r) else 0.0
    lam = min(float(np.linalg.eigvalsh(X).min()) for X in X_blocks)
    bound = tol * (1 + float(np.max(np.abs(r))) if len(r) else 1.0)
    return {
        "ok": resid <= bound and lam >= -tol,
        "residual": resid,
        "residual_bound": bound,
        "min_eigenvalue": lam,
    }


def verify_witness(p: SdpProblem, y, margin: float = WITNESS_MARGIN) -> dict:
    """Farkas check after normalising ||y||_inf = 1.

    A witness whose combination sum y_c A_c vanishes identically (not merely
    numerically) certifies an inconsistent linear system and is accepted with
    ``exact_zero`` set.
    """
    y = np.asarray(y, dtype=float)
    scale = float(np.max(np.abs(y))) if y.size else 0.0
    if scale == 0 or not np.all(np.isfinite(y)):
        return {"ok": False, "lambda_max": math.nan, "inner": math.nan, "exact_zero": False}
    y = y / scale
    combo = p.adjoint_apply(y)
    lam = max(float(np.linalg.eigvalsh(M).max()) for M in combo)
    exact_zero = all(not np.any(M) for M in combo)
    inner = float(y @ p.rhs)
    ok = inner >= margin and (lam <= -margin or exact_zero)
    return {"ok": ok, "lambda_max": lam, "inner": inner, "exact_zero": exact_zero}


# ---------------------------------------------------------------------------
# realification
# ---------------------------------------------------------------------------
def _embed(A: np.ndarray) -> np.ndarray:
    re, im = A.real, A.imag
    return 0.5 * np.block([[re, -im], [im, re]])


def _unembed(X: np.ndarray) -> np.ndarray:
    k = X.shape[0] // 2
    X11, X12, X21, X22 = X[:k, :k], X[:k, k:], X[k:, :k], X[k:, k:]
    Q = 0.5 * ((X11 + X22) + 1j * (X21 - X12))
    return 0.5 * (Q + Q.conj().T)


class _Real:
    """Realified, row-scaled copy of a problem."""

    def __init__(self, p: SdpProblem, rows):
        self.sizes = [2 * k if h else k for k, h in zip(p.blocks, p.hermitian)]
        m = len(rows)
        self.A = [np.zeros((m, N, N)) for N in self.sizes]
        for ci, c in enumerate(rows):
            mats, _ = p.constraints[c]
            for b, A in enumerate(mats):
                if A is None:
                    continue
                self.A[b][ci] = _embed(A) if p.hermitian[b] else A
        b_vec = np.array([p.constraints[c][1] for c in rows])
        norms = np.sqrt(sum(np.einsum("mij,mij->m", A, A) for A in self.A))
        norms[norms == 0] = 1.0
        self.row_scale = norms
        for b in range(len(self.A)):
            self.A[b] /= norms[:, None, None]
        self.b = b_vec / norms
        if p.objective is None:
            self.C = [np.eye(N) for N in self.sizes]
        else:
            self.C = []
            for b, Cb in enumerate(p.objective):
                N = self.sizes[b]
                if Cb is None:
                    self.C.append(np.zeros((N, N)))
                else:
                    self.C.append(_embed(Cb) if p.hermitian[b] else np.asarray(Cb, float))
        self.m = m

    def op(self, X):
        return sum(np.einsum("mij,ij->m", A, Xb) for A, Xb in zip(self.A, X))

    def adj(self, y):
        return [np.einsum("m,mij->ij", y, A) for A in self.A]


def _inner(U, V) -> float:
    return float(sum(np.sum(u * v) for u, v in zip(U, V)))


def _sym(M):
    return 0.5 * (M + M.T)


def _max_step(L, D):
    """Largest alpha with L L^T + alpha D >= 0 (inf if unbounded)."""
    Li = np.linalg.inv(L)
    lam = np.linalg.eigvalsh(_sym(Li @ D @ Li.T)).min()
    return math.inf if lam >= 0 else -1.0 / lam


def _chol(M):
    return np.linalg.cholesky(_sym(M))


def _solve_spd(M, rhs):
    try:
        L = np.linalg.cholesky(M)
        z = np.linalg.solve(L, rhs)
        return np.linalg.solve(L.T, z)
    except np.linalg.LinAlgError:
        w, V = np.linalg.eigh(_sym(M))
        cut = max(w.max(), 1.0) * 1e-14
        inv = np.where(w > cut, 1.0 / np.where(w > cut, w, 1.0), 0.0)
        return V @ (inv[:, None] * (V.T @ rhs))


def solve(p: SdpProblem, tol: float = 1e-8, max_iter: int = 200) -> SdpOutcome:
    if tol <= 0:
        raise ValueError("tol must be positive")
    if any(k > 200 for k in p.blocks) or p.m > 5000:
        raise ValueError("problem exceeds the supported size (blocks <= 200, constraints <= 5000)")

    # zero rows: drop when rhs = 0, otherwise they certify infeasibility outright
    rows = []
    for c, (mats, r) in enumerate(p.constraints):
        if all(A is None or not np.any(A) for A in mats):
            if r != 0:
                y = np.zeros(p.m)
                y[c] = 1.0 if r > 0 else -1.0
                chk = verify_witness(p, y)
                return SdpOutcome(Status.INFEASIBLE, witness=y, diagnostics={"iterations": 0, "reason": "zero row", **chk})
            continue
        rows.append(c)
    if not rows:
        X = [np.zeros((k, k), dtype=complex if h else float) for k, h in zip(p.blocks, p.hermitian)]
        return SdpOutcome(Status.FEASIBLE, primal=X, diagnostics={"iterations": 0, **verify_primal(p, X, tol)})

    R = _Real(p, rows)
    explicit_objective = p.objective is not None
    nb = len(R.sizes)
    Ntot = sum(R.sizes)

    X = [np.eye(N) for N in R.sizes]
    S = [np.eye(N) for N in R.sizes]
    y = np.zeros(R.m)
    tau, kappa = 1.0, 1.0
    r_abs = float(np.max(np.abs(p.rhs)))
    diag = {"iterations": 0}
    best = None  # last primal-feasible iterate when an objective is present

    def to_original_X(Xr, t):
        out = []
        for b, Xb in enumerate(Xr):
            Xb = _sym(Xb / t)
            out.append(_unembed(Xb) if p.hermitian[b] else Xb)
        return out

    def to_original_y(yr):
        full = np.zeros(p.m)
        full[rows] = yr / R.row_scale
        return full

    for it in range(max_iter + 1):
        diag["iterations"] = it
        # residuals of the embedding
        rp = R.b * tau - R.op(X)
        ATy = R.adj(y)
        rd = [Cb * tau - a - s for Cb, a, s in zip(R.C, ATy, S)]
        rg = float(R.b @ y) - _inner(R.C, X) - kappa
        mu = (_inner(X, S) + tau * kappa) / (Ntot + 1)
        diag.update(mu=mu, tau=tau, kappa=kappa)

        # ---- termination tests ------------------------------------------
        Xo = to_original_X(X, tau)
        pc = verify_primal(p, Xo, tol)
        if pc["ok"]:
            done = True
            if explicit_objective:
                pobj = _inner(R.C, X) / tau
                dobj = float(R.b @ y) / tau
                dres = math.sqrt(sum(np.sum(r * r) for r in rd)) / tau
                done = abs(pobj - dobj) <= tol * (1 + abs(pobj)) and dres <= tol * 10 * (1 + math.sqrt(Ntot))
                diag.update(objective=pobj, gap=pobj - dobj, dual_residual=dres)
            if done:
                diag.update(primal_residual=pc["residual"], min_eigenvalue=pc["min_eigenvalue"])
                return SdpOutcome(Status.FEASIBLE, primal=Xo, diagnostics=diag)
            best = (Xo, pc)
        if float(R.b @ y) > 0:
            yo = to_original_y(y)
            wc = verify_witness(p, yo)
            if wc["ok"]:
                yo = yo / np.max(np.abs(yo))
                diag.update(lambda_max=wc["lambda_max"], inner=wc["inner"])
                return SdpOutcome(Status.INFEASIBLE, witness=yo, diagnostics=diag)
        if it == max_iter:
            break
        if mu < 1e-16 * (1 + r_abs):
            diag["reason"] = "complementarity below floor"
            break

        # ---- NT scaling -------------------------------------------------
        try:
            Lx = [_chol(Xb) for Xb in X]
            Ls = [_chol(Sb) for Sb in S]
        except np.linalg.LinAlgError:
            diag["reason"] = "lost positive definiteness"
            break
        G, lam = [], []
        for lx, ls in zip(Lx, Ls):
            U, sv, Vt = np.linalg.svd(ls.T @ lx)
            G.append(lx @ Vt.T / np.sqrt(sv))
            lam.append(sv)
        W = [g @ g.T for g in G]
        Ginv = [np.linalg.inv(g) for g in G]

        WAW = [np.einsum("ij,mjk,kl->mil", Wb, Ab, Wb, optimize=True) for Wb, Ab in zip(W, R.A)]
        M = sum(A.reshape(R.m, -1) @ WA.reshape(R.m, -1).T for A, WA in zip(R.A, WAW))
        M = _sym(M)
        M += np.eye(R.m) * 1e-14 * max(1.0, float(np.trace(M)) / R.m)
        WCW = [Wb @ Cb @ Wb for Wb, Cb in zip(W, R.C)]
        u = R.op(WCW)
        c_w = _inner(R.C, WCW)
        q = _solve_spd(M, u + R.b)

        def direction(eta, Rc, Rtau):
            WrdW = [Wb @ r @ Wb for Wb, r in zip(W, rd)]
            rhs = eta * rp - R.op(Rc) + eta * R.op(WrdW)
            pvec = _solve_spd(M, rhs)
            E = eta * rg - _inner(R.C, Rc) + eta * _inner(WCW, rd)
            coef = float((R.b - u) @ q) + c_w + kappa / tau
            dtau = (Rtau / tau - E - float((R.b - u) @ pvec)) / coef
            dy = pvec + q * dtau
            dS = [eta * r - a + Cb * dtau for r, a, Cb in zip(rd, R.adj(dy), R.C)]
            dX = [_sym(rc - Wb @ ds @ Wb) for rc, Wb, ds in zip(Rc, W, dS)]
            dkappa = (Rtau - kappa * dtau) / tau
            return dX, dy, [_sym(d) for d in dS], dtau, dkappa

        def step_len(dX, dS, dtau, dkappa):
            a = math.inf
            for lx, d in zip(Lx, dX):
                a = min(a, _max_step(lx, d))
            for ls, d in zip(Ls, dS):
                a = min(a, _max_step(ls, d))
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkappa < 0:
                a = min(a, -kappa / dkappa)
            return a

        # predictor
        Rc_a = [-Xb for Xb in X]
        dX, dy, dS, dtau, dkappa = direction(1.0, Rc_a, -tau * kappa)
        a_aff = min(1.0, step_len(dX, dS, dtau, dkappa))
        mu_aff = (
            _inner([Xb + a_aff * d for Xb, d in zip(X, dX)], [Sb + a_aff * d for Sb, d in zip(S, dS)])
            + (tau + a_aff * dtau) * (kappa + a_aff * dkappa)
        ) / (Ntot + 1)
        sigma = min(1.0, (mu_aff / mu) ** 3)
        eta = 1.0 - sigma

        # corrector in the scaled space, where the scaled point is diag(lam)
        Rc = []
        for b in range(nb):
            dXs = Ginv[b] @ dX[b] @ Ginv[b].T
            dSs = G[b].T @ dS[b] @ G[b]
            T = 0.5 * (dXs @ dSs + dSs @ dXs)
            lb = lam[b]
            rhs = -T
            rhs[np.diag_indices_from(rhs)] += sigma * mu - lb * lb
            Z = 2.0 * rhs / (lb[:, None] + lb[None, :])
            Rc.append(_sym(G[b] @ Z @ G[b].T))
        Rtau = sigma * mu - tau * kappa - dtau * dkappa
        dX, dy, dS, dtau, dkappa = direction(eta, Rc, Rtau)
        a_max = step_len(dX, dS, dtau, dkappa)
        alpha = min(1.0, 0.98 * a_max)
        if not math.isfinite(alpha) or alpha < 1e-12:
            diag["reason"] = "step length collapsed"
            break

        X = [_sym(Xb + alpha * d) for Xb, d in zip(X, dX)]
        S = [_sym(Sb + alpha * d) for Sb, d in zip(S, dS)]
        y = y + alpha * dy
        tau += alpha * dtau
        kappa += alpha * dkappa

        # keep the iterate on a sane scale; the embedding is homogeneous
        scale = max(tau + kappa, 1e-300)
        if scale > 1e8 or scale < 1e-8:
            X = [Xb / scale for Xb in X]
            S = [Sb / scale for Sb in S]
            y = y / scale
            tau /= scale
            kappa /= scale

    diag.setdefault("reason", "iteration limit")
    if best is not None:
        # the objective only selects among feasible points; an unattained dual
        # optimum (feasible set without interior) should not hide feasibility
        Xo, pc = best
        diag.update(primal_residual=pc["residual"], min_eigenvalue=pc["min_eigenvalue"], objective_converged=False)
        return SdpOutcome(Status.FEASIBLE, primal=Xo, diagnostics=diag)
    return SdpOutcome(Status.INDETERMINATE, diagnostics=diag)
