import json
import math
from fractions import Fraction

import numpy as np
import pytest

from psdg.certsearch import ModuleKind, TruncatedPreordering, check_membership
from psdg.cli import EXIT_NEGATIVE, EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE, dumps, run
from psdg.counterexamples import fk_build, fk_psd_report
from psdg.polymat import MatrixPoly
from psdg.semialg import Interval, SemialgSet, natural_description

UNIT = SemialgSet([Interval(0, 1)])


def sp(*c):
    return MatrixPoly.scalar([Fraction(v) for v in c])


DIAG = MatrixPoly.from_entries([[sp(0, 1), sp(0)], [sp(0), sp(1, -1)]])


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    return write


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_member_matches_library(files, capsys):
    F = DIAG * DIAG  # degree 2, PSD on [0, 1]
    poly, kset = files("F.json", F.to_json()), files("K.json", UNIT.to_json())
    code, rep, _ = call(capsys, "member", "--poly", poly, "--set", kset, "--degree", "4")
    assert code == EXIT_OK and rep["status"] == "MEMBER"
    T = TruncatedPreordering(natural_description(UNIT), 2, 4, ModuleKind.PREORDERING)
    lib = check_membership(F, T, tol=1e-8)
    assert rep["certificate"] == json.loads(dumps(lib.certificate.to_json()))


def test_member_negative_exit(files, capsys):
    poly, kset = files("F.json", sp(-1).to_json()), files("K.json", UNIT.to_json())
    code, rep, _ = call(capsys, "member", "--poly", poly, "--set", kset, "--degree", "2")
    assert code == EXIT_NEGATIVE and rep["status"] == "NOT_MEMBER_AT_DEGREE"


def test_counterexample_matches_library(capsys):
    code, rep, _ = call(capsys, "counterexample", "--x1", "0", "--x2", "1", "--x3", "2", "--k", "1")
    assert code == EXIT_OK and rep["status"] == "REFUTED"
    inst = fk_build(0, 1, 2, 1)
    assert rep["instance"] == json.loads(dumps(inst.to_json()))
    K = SemialgSet([Interval(0, 1), Interval(2, math.inf)])
    assert rep["psd_report"] == json.loads(dumps(fk_psd_report(inst, K)))
    assert rep["conditions"]["values"]["Dsq"] == "6"


def test_verify_tampered_certificate(files, capsys):
    F = DIAG * DIAG
    poly, kset = files("F.json", F.to_json()), files("K.json", UNIT.to_json())
    _, rep, _ = call(capsys, "member", "--poly", poly, "--set", kset, "--degree", "4")
    cert = rep["certificate"]
    code, out, _ = call(capsys, "verify", "--cert", files("c.json", cert), "--poly", poly)
    assert code == EXIT_OK and out["status"] == "VALID"
    cert["blocks"][0]["Q"][0][0][0] += 1.0
    code, out, _ = call(capsys, "verify", "--cert", files("bad.json", cert), "--poly", poly)
    assert code == EXIT_NEGATIVE and out["status"] == "INVALID"
    assert out["report"]["residual"] >= 0.5


def test_factor_and_classify(files, capsys):
    code, rep, _ = call(capsys, "factor", "--poly", files("F.json", sp(1, 0, 1).to_json()))
    assert code == EXIT_OK and rep["residual"] <= 1e-6
    K = SemialgSet([Interval(-math.inf, -1), Interval(1, math.inf)])
    code, rep, _ = call(capsys, "classify", "--set", files("K.json", K.to_json()))
    assert rep["label"] == "TwoUnboundedIntervals" and rep["saturated"] == "Yes"


def test_certify(files, capsys):
    poly, kset = files("F.json", DIAG.to_json()), files("K.json", UNIT.to_json())
    code, rep, _ = call(capsys, "certify", "--poly", poly, "--set", kset, "--x0", "1/2")
    assert code == EXIT_OK and rep["status"] == "CERTIFIED"


def test_denom_k_zero(files, capsys):
    poly = files("F.json", sp(0, 1).to_json())
    kset = files("K.json", SemialgSet([Interval(0, math.inf)]).to_json())
    code, rep, _ = call(capsys, "denom", "--poly", poly, "--set", kset, "--k-max", "2")
    assert code == EXIT_OK and rep["k"] == 0


def test_usage_errors(files, capsys):
    assert call(capsys, "member", "--poly", "x")[0] == EXIT_USAGE
    code, _, err = call(capsys, "counterexample", "--x1", "0", "--x2", "1", "--x3", "2", "--k", "0")
    assert code == EXIT_USAGE
    bad = files("bad.json", {"n": 1, "mode": "exact"})
    code, _, err = call(capsys, "factor", "--poly", bad)
    assert code == EXIT_USAGE and "coeffs" in err
    code, _, err = call(capsys, "classify", "--set", files("K.json", {"pieces": [{"lo": "0"}]}))
    assert code == EXIT_USAGE and "pieces[0]" in err
    p = files("raw.json", {})
    with open(p, "w") as fh:
        fh.write("{not json")
    assert call(capsys, "factor", "--poly", p)[0] == EXIT_USAGE


def test_unknown_exit_code(files, capsys):
    # a single point {2} and F = -1: EXHAUSTED after k_max = 0
    poly = files("F.json", sp(-1).to_json())
    kset = files("K.json", UNIT.to_json())
    code, rep, _ = call(capsys, "denom", "--poly", poly, "--set", kset, "--k-max", "0")
    assert code == EXIT_UNKNOWN and rep["status"] == "EXHAUSTED"


def test_output_is_deterministic(files, capsys, tmp_path):
    poly, kset = files("F.json", (DIAG * DIAG).to_json()), files("K.json", UNIT.to_json())
    outs = []
    for name in ("a.json", "b.json"):
        path = str(tmp_path / name)
        assert run(["member", "--poly", poly, "--set", kset, "--degree", "4", "-o", path]) == EXIT_OK
        outs.append(open(path, "rb").read())
    assert outs[0] == outs[1]
    compact = run(["member", "--poly", poly, "--set", kset, "--degree", "4", "--compact"])
    assert compact == EXIT_OK and capsys.readouterr().out.count("\n") == 1


def test_dumps_float_format():
    assert dumps({"a": 0.1, "b": [1, 2]}, compact=True) == '{"a":0.10000000000000001,"b":[1,2]}'
    assert json.loads(dumps({"x": float("nan")}))["x"] == "nan"
    assert dumps(np.float64(1.5), compact=True) == "1.5"
