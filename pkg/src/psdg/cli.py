"""Command-line front end.

Exit codes: 0 success, 1 negative mathematical result, 2 usage or input
error, 3 undecided (UNKNOWN / INDETERMINATE / EXHAUSTED).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from enum import Enum
from fractions import Fraction

import numpy as np

from . import __version__
from .certsearch import (
    Certificate,
    FactorizationError,
    MembershipStatus,
    ModuleKind,
    TruncatedPreordering,
    check_membership,
    denominator_search,
    fejer_riesz,
    verify_report,
)
from .counterexamples import (
    default_digits,
    fk_build,
    fk_conditions,
    fk_determinant_residual,
    fk_psd_report,
    fk_refute_claim1,
    fk_refute_claim2_sdp,
)
from .gaussq import GaussQ, rational_str
from .polymat import MatrixPoly, Mode
from .reduction import ReductionError, h2f_reduce
from .semialg import Description, Interval, Point, SemialgSet, classify, natural_description

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# deterministic JSON


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, type(None), str)):
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, GaussQ):
        return [rational_str(obj.re), rational_str(obj.im)]
    if isinstance(obj, Fraction) or type(obj).__name__ == "mpq":
        return rational_str(obj)
    return str(obj)


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _emit(obj, indent, level) -> str:
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        sep = ":" if indent is None else ": "
        items = [json.dumps(k, ensure_ascii=False) + sep + _emit(v, indent, level + 1) for k, v in obj.items()]
        return _join("{", "}", items, indent, level)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [_emit(v, indent, level + 1) for v in obj]
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ("," if indent is None else ", ").join(items) + "]"
        return _join("[", "]", items, indent, level)
    if isinstance(obj, float):
        return _fmt_float(obj)
    return json.dumps(obj, ensure_ascii=False)


def _join(open_, close, items, indent, level) -> str:
    if indent is None:
        return open_ + ",".join(items) + close
    pad = " " * (indent * (level + 1))
    return open_ + "\n" + ",\n".join(pad + it for it in items) + "\n" + " " * (indent * level) + close


def dumps(obj, compact: bool = False) -> str:
    """JSON text with floats at 17 significant digits and stable field order."""
    return _emit(_plain(obj), None if compact else 2, 0)


# ---------------------------------------------------------------------------
# input helpers


def _read_json(path: str, what: str):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {what} file {path!r}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} file {path!r} is not valid JSON: {exc.msg} at line {exc.lineno}") from None


def _load(path, what, parser):
    data = _read_json(path, what)
    try:
        return parser(data)
    except ValueError as exc:
        raise UsageError(f"{what}: {exc}") from None


def _load_poly(args) -> MatrixPoly:
    F = _load(args.poly, "polynomial", MatrixPoly.from_json)
    mode = getattr(args, "arith", None)
    if mode == "float":
        F = F.to_float()
    elif mode == "exact" and F.mode is not Mode.EXACT:
        raise UsageError("--arith exact needs an exact polynomial input")
    return F


def _load_set(args) -> SemialgSet:
    return _load(args.set, "set", SemialgSet.from_json)


def _load_description(args, K: SemialgSet) -> Description:
    if getattr(args, "description", None):
        return _load(args.description, "description", Description.from_json)
    try:
        return natural_description(K)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _complex_point(text: str):
    """'1/2', 'i', '1/2+i', '-2i', '3-1/2i' as a Gaussian rational."""
    s = text.replace(" ", "").replace("j", "i")
    if not s:
        raise argparse.ArgumentTypeError("empty point")
    try:
        if not s.endswith("i"):
            return GaussQ(Fraction(s))
        body = s[:-1]
        cut = max(body.rfind("+"), body.rfind("-"))
        if cut > 0 and body[cut - 1] not in "eE":
            re_part, im_part = body[:cut], body[cut:]
        else:
            re_part, im_part = "0", body
        if im_part in ("", "+"):
            im_part = "1"
        elif im_part == "-":
            im_part = "-1"
        return GaussQ(Fraction(re_part), Fraction(im_part))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a Gaussian rational: {text!r}") from None


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


_MODULE = {"preordering": ModuleKind.PREORDERING, "quadratic": ModuleKind.QUADRATIC_MODULE}


# ---------------------------------------------------------------------------
# subcommands


def cmd_factor(args):
    F = _load_poly(args)
    if not F.is_hermitian(1e-9 * max(1.0, F.max_abs())):
        raise UsageError("polynomial: F is not Hermitian")
    try:
        G, resid = fejer_riesz(F, tol=args.tol)
    except FactorizationError as exc:
        return EXIT_UNKNOWN, {"status": "UNKNOWN", "reason": str(exc)}
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK, {"status": "FACTORED", "G": G.to_json(), "residual": resid}


_STATUS_EXIT = {
    MembershipStatus.MEMBER: EXIT_OK,
    MembershipStatus.NOT_MEMBER_AT_DEGREE: EXIT_NEGATIVE,
    MembershipStatus.UNKNOWN: EXIT_UNKNOWN,
}


def _membership_json(rep, d):
    out = {"status": rep.status.value, "degree": d}
    body = rep.to_json()
    body.pop("sdp", None)
    body.pop("status", None)
    out.update(body)
    return out


def cmd_member(args):
    F = _load_poly(args)
    K = _load_set(args)
    S = _load_description(args, K)
    degrees = [args.degree]
    if args.escalate:
        degrees = list(range(args.degree, args.max_degree + 1, 2)) or [args.degree]
    last = None
    for d in degrees:
        try:
            T = TruncatedPreordering(S, F.n, d, _MODULE[args.module])
            rep = check_membership(F, T, tol=args.tol, max_iter=args.max_iter)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        last = (rep, d)
        if rep.status is MembershipStatus.MEMBER:
            break
    rep, d = last
    return _STATUS_EXIT[rep.status], _membership_json(rep, d)


def cmd_certify(args):
    F = _load_poly(args)
    if F.mode is not Mode.EXACT:
        raise UsageError("certify needs an exact polynomial")
    K = _load_set(args)
    S = _load_description(args, K)
    try:
        h, plan = h2f_reduce(F, K, S, args.x0)
    except ReductionError as exc:
        return EXIT_UNKNOWN, {"status": "UNKNOWN", "reason": str(exc)}
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = plan.verify()
    out = {"status": "CERTIFIED" if rep["ok"] else "UNVERIFIED", "h": h.to_json(), "verification": rep}
    out["plan"] = plan.to_json()
    return (EXIT_OK if rep["ok"] else EXIT_UNKNOWN), out


def cmd_denom(args):
    F = _load_poly(args)
    K = _load_set(args)
    S = _load_description(args, K)
    w = complex(float(args.w.re), float(args.w.im))
    try:
        res = denominator_search(F, S, w=w, k_max=args.k_max, mode=_MODULE[args.module], tol=args.tol,
                                 max_iter=args.max_iter)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = res.to_json()
    return (EXIT_OK if res.status == "FOUND" else EXIT_UNKNOWN), out


def cmd_counterexample(args):
    digits = args.digits or default_digits()
    try:
        cond = fk_conditions(args.x1, args.x2, args.x3, args.k)
        inst = fk_build(args.x1, args.x2, args.x3, args.k, digits=digits)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    inf = math.inf
    K = SemialgSet([Interval(inst.x1, inst.x2), Interval(inst.x3, inf)])
    pts = args.points or [inst.x3, inst.x3 + 1]
    if any(p < inst.x3 for p in pts) or len(set(pts)) < 2:
        raise UsageError("--points needs at least two distinct points >= x3")
    K2 = SemialgSet([Interval(inst.x1, inst.x2)] + [Point(p) for p in pts])
    claim1 = fk_refute_claim1(inst, K)
    claim2 = fk_refute_claim2_sdp(inst, natural_description(K2), tol=args.tol)
    confirmed = claim1.confirmed and bool(claim2.diagnostics.get("confirmed"))
    out = {
        "status": "REFUTED" if confirmed else "UNCONFIRMED",
        "conditions": cond,
        "instance": inst.to_json(),
        "determinant_residual": fk_determinant_residual(inst),
        "psd_report": fk_psd_report(inst, K),
        "claim1": claim1.to_json(),
        "claim2": {
            "set": K2.to_json(),
            "sdp_status": claim2.status.value,
            "confirmed": claim2.diagnostics.get("confirmed"),
            "witness_check": claim2.diagnostics.get("witness_check"),
        },
    }
    return (EXIT_OK if confirmed else EXIT_UNKNOWN), out


def cmd_verify(args):
    F = _load_poly(args)
    C = _load(args.cert, "certificate", Certificate.from_json)
    try:
        T = TruncatedPreordering(C.S, C.n, C.d, C.mode)
        rep = verify_report(F, T, C, args.tol * max(1.0, F.max_abs()))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = {"status": "VALID" if rep["ok"] else "INVALID", "report": rep}
    return (EXIT_OK if rep["ok"] else EXIT_NEGATIVE), out


def cmd_classify(args):
    K = _load_set(args)
    try:
        label, verdict = classify(K)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK, {"status": "CLASSIFIED", "label": label.value, "saturated": verdict.value, "set": K.to_json()}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="psdg", description="Positivity certificates for Hermitian matrix polynomials.")
    p.add_argument("--version", action="version", version=f"psdg {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, poly=True, set_=True):
        if poly:
            sp.add_argument("--poly", required=True, help="matrix polynomial JSON ('-' for stdin)")
            sp.add_argument("--arith", choices=["exact", "float"], help="coerce the input arithmetic")
        if set_:
            sp.add_argument("--set", required=True, help="semialgebraic set JSON")
            sp.add_argument("--description", help="generator description JSON (default: natural description)")
        sp.add_argument("--tol", type=_positive_float, default=1e-8)
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")
        sp.add_argument("--compact", action="store_true", help="single-line JSON")

    sp = sub.add_parser("factor", help="Fejer-Riesz factorization F = G^* G")
    common(sp, set_=False)
    sp.set_defaults(func=cmd_factor, tol=1e-9)

    sp = sub.add_parser("member", help="membership in a truncated preordering / quadratic module")
    common(sp)
    sp.add_argument("--degree", "-d", type=_nonneg_int, required=True)
    sp.add_argument("--module", choices=sorted(_MODULE), default="preordering")
    sp.add_argument("--escalate", action="store_true", help="try degree, degree+2, ... up to --max-degree")
    sp.add_argument("--max-degree", type=_nonneg_int, default=24)
    sp.add_argument("--max-iter", type=_nonneg_int, default=200)
    sp.set_defaults(func=cmd_member)

    sp = sub.add_parser("certify", help="h^2 F certificate by the recursive reduction (compact sets)")
    common(sp)
    sp.add_argument("--x0", type=_complex_point, default=GaussQ(0), help="point where h must not vanish")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("denom", help="smallest k with ((x-conj w)(x-w))^k F certified")
    common(sp)
    sp.add_argument("--w", type=_complex_point, default=GaussQ(0, 1))
    sp.add_argument("--k-max", type=_nonneg_int, default=12)
    sp.add_argument("--module", choices=sorted(_MODULE), default="preordering")
    sp.add_argument("--max-iter", type=_nonneg_int, default=200)
    sp.set_defaults(func=cmd_denom)

    sp = sub.add_parser("counterexample", help="the F_k instance and its refutation report")
    sp.add_argument("--x1", type=_rational, required=True)
    sp.add_argument("--x2", type=_rational, required=True)
    sp.add_argument("--x3", type=_rational, required=True)
    sp.add_argument("--k", type=_rational, required=True)
    sp.add_argument("--points", type=_rational, nargs="+", help="isolated points for the degree-2 refutation")
    sp.add_argument("--digits", type=_nonneg_int, help="decimal digits for an irrational D (env PSDG_PRECISION)")
    sp.add_argument("--tol", type=_positive_float, default=1e-8)
    sp.add_argument("--output", "-o")
    sp.add_argument("--compact", action="store_true")
    sp.set_defaults(func=cmd_counterexample)

    sp = sub.add_parser("verify", help="recheck a stored certificate against F")
    common(sp, set_=False)
    sp.add_argument("--cert", required=True, help="certificate JSON")
    sp.set_defaults(func=cmd_verify, tol=1e-6)

    sp = sub.add_parser("classify", help="shape class and saturation verdict of a set")
    sp.add_argument("--set", required=True)
    sp.add_argument("--output", "-o")
    sp.add_argument("--compact", action="store_true")
    sp.set_defaults(func=cmd_classify)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        code, report = args.func(args)
    except UsageError as exc:
        print(f"psdg {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = dumps(report, compact=args.compact) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
