import csv
import io
import json
import os
import subprocess
import sys

import pytest

from conftest import E_32, GE_32, S_32, T0_32, TE_32
from trace_sobolev.cli import CSV_HEADER, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_constants_p2(capsys):
    code, out, _ = run(capsys, "constants", "--n", "3", "--p", "2")
    assert code == 0
    table = {r["name"]: float(r["value"]) for r in rows(out)}
    assert table["T_E"] == pytest.approx(1.482915, rel=1e-4)
    assert table["E"] == pytest.approx(1.331335, rel=1e-4)
    assert table["T_E"] == pytest.approx(TE_32, rel=1e-9)
    assert table["G_E"] == pytest.approx(GE_32, rel=1e-9)
    assert table["T_0"] == pytest.approx(T0_32, rel=1e-9)
    assert table["S"] == pytest.approx(S_32, rel=1e-9)
    assert set(table) == {"S", "T_0", "Phi_T0", "T_E", "G_E", "E", "T_star", "Y_E"}
    assert all(float(r["error"]) < 1e-7 for r in rows(out))


def test_constants_p1(capsys):
    code, out, _ = run(capsys, "constants", "--n", "2", "--p", "1")
    assert code == 0
    table = {r["name"]: float(r["value"]) for r in rows(out)}
    assert table["ISO_B1"] == pytest.approx(3.5449077, abs=1e-7)
    assert table["Phi_T0"] == pytest.approx(2.5066283, abs=1e-7)


def test_constants_json(capsys):
    code, out, _ = run(capsys, "constants", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["constants"]["E"]["value"] == pytest.approx(E_32, rel=1e-9)


@pytest.mark.parametrize("argv", [
    ("constants", "--n", "3", "--p", "3.5"),
    ("constants", "--n", "1"),
    ("constants", "--p", "0.5"),
    ("constants", "--format", "svg"),
    ("constants", "--tol", "0"),
    ("verify", "bogus"),
    ("frobnicate",),
    ("curve", "--samples", "1"),
    ("curve", "--tmin", "2", "--tmax", "1"),
    ("curve", "--T", "-1"),
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_curve_csv(capsys):
    code, out, _ = run(capsys, "curve", "--samples", "25")
    assert code == 0
    assert out.splitlines()[0] == CSV_HEADER
    table = rows(out)
    assert len(table) == 25
    T = [float(r["T"]) for r in table]
    phi = [float(r["phi"]) for r in table]
    env = [float(r["envelope"]) for r in table]
    assert all(p >= e - 1e-9 for p, e in zip(phi, env))
    i0 = min(range(len(phi)), key=phi.__getitem__)
    assert all(a > b for a, b in zip(phi[:i0], phi[1:i0 + 1]))
    assert all(a < b for a, b in zip(phi[i0:], phi[i0 + 1:]))
    fams = {r["family"] for r in table}
    assert fams == {"Sobolev", "BeyondEscobar"}
    assert T[0] > 0


def test_curve_anchors(capsys):
    code, out, _ = run(capsys, "curve", "--T", str(T0_32), "--T", str(TE_32), "--T", "0")
    assert code == 0
    table = rows(out)
    assert float(table[0]["phi"]) == pytest.approx(2 ** (-1 / 3) * S_32, rel=1e-8)
    assert float(table[1]["phi"]) == pytest.approx(GE_32, rel=1e-8)
    assert table[1]["family"] == "Escobar"
    assert float(table[1]["dphi"]) == pytest.approx(E_32, rel=1e-8)
    assert float(table[2]["phi"]) == pytest.approx(S_32, rel=1e-8)
    assert table[2]["dphi"] == ""


def test_curve_svg_and_json(capsys, tmp_path):
    out_file = tmp_path / "c.svg"
    code, out, _ = run(capsys, "curve", "--samples", "10", "--format", "svg", "--out", str(out_file))
    assert code == 0 and out == ""
    svg = out_file.read_text()
    assert svg.startswith("<svg") and svg.count("<polyline") == 2 and "href" not in svg
    code, out, _ = run(capsys, "curve", "--samples", "5", "--format", "json", "--n", "2", "--p", "1")
    data = json.loads(out)
    assert len(data) == 5 and all(r["family"] == "BallP1" for r in data)


def test_curve_is_deterministic(capsys, monkeypatch):
    monkeypatch.setenv("TRACE_SOBOLEV_THREADS", "1")
    _, a, _ = run(capsys, "curve", "--samples", "12", "--n", "4", "--p", "1.5")
    monkeypatch.setenv("TRACE_SOBOLEV_THREADS", "4")
    _, b, _ = run(capsys, "curve", "--samples", "12", "--n", "4", "--p", "1.5")
    assert a == b


def test_verify_gamma(capsys):
    code, out, _ = run(capsys, "verify", "gamma", "--n", "3")
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert {r["check"] for r in recs} == {"gamma-ratio-constancy", "gamma-te-increasing", "gamma-log-slope"}
    for r in recs:
        assert set(r) == {"check", "params", "lhs", "rhs", "margin", "pass"} and r["pass"]


def test_verify_conformal(capsys):
    code, out, _ = run(capsys, "verify", "conformal", "--n", "3", "--p", "2")
    assert code == 0
    checks = [json.loads(line)["check"] for line in out.splitlines()]
    assert "conformal-R-sign" in checks and "conformal-h-sign" in checks


def test_verify_skip_is_reported_and_fails(capsys):
    code, out, _ = run(capsys, "verify", "conformal", "--n", "2", "--p", "1.2")
    assert code == 1
    rec = json.loads(out)
    assert rec["pass"] is False and "skipped" in rec["params"]


def test_verify_mother_flags_before_suite(capsys, monkeypatch):
    monkeypatch.setenv("TRACE_SOBOLEV_THREADS", "2")
    code, a, _ = run(capsys, "verify", "--n", "3", "--p", "2", "mother", "--trials", "30", "--seed", "7")
    assert code == 0
    monkeypatch.setenv("TRACE_SOBOLEV_THREADS", "1")
    _, b, _ = run(capsys, "verify", "--n", "3", "--p", "2", "mother", "--trials", "30", "--seed", "7")
    assert a == b
    _, c, _ = run(capsys, "verify", "--n", "3", "--p", "2", "mother", "--trials", "30", "--seed", "8")
    assert a != c


def test_violation_exit_code(capsys, monkeypatch):
    from trace_sobolev.errors import ChainViolation
    from trace_sobolev import cli

    def broken(*_):
        raise ChainViolation("forced")
    monkeypatch.setattr(cli, "cmd_verify", broken)
    code, _, err = run(capsys, "verify", "transport")
    assert code == 1 and "forced" in err


def test_numerical_exit_code(capsys, monkeypatch):
    from trace_sobolev.errors import RootBracketFailure
    from trace_sobolev import cli

    def broken(*_):
        raise RootBracketFailure("no bracket")
    monkeypatch.setattr(cli, "cmd_curve", broken)
    code, _, _ = run(capsys, "curve")
    assert code == 3


def test_numerical_failure_in_suite_maps_to_3(capsys, monkeypatch):
    from trace_sobolev.verification import suites
    from trace_sobolev.verification.mother import CheckResult

    def flaky(cfg):
        return [CheckResult("x", {}, 0.0, 0.0, 0.0, False, detail={"numerical": True})]
    monkeypatch.setitem(suites.RUNNERS, "gamma", flaky)
    code, _, _ = run(capsys, "verify", "gamma")
    assert code == 3


def test_console_entry_point():
    env = dict(os.environ, TRACE_SOBOLEV_THREADS="1")
    proc = subprocess.run([sys.executable, "-m", "trace_sobolev", "constants", "--n", "2", "--p", "1"],
                          capture_output=True, text=True, env=env, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("name,value,error")
    proc = subprocess.run([sys.executable, "-m", "trace_sobolev", "constants", "--n", "3", "--p", "3.5"],
                          capture_output=True, text=True, env=env, check=False)
    assert proc.returncode == 2
