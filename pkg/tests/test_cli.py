import json
import subprocess
import sys

import pytest

from traceconvex.cli import main

SEXTIC = "15*x^2 - 5*x^4 + x^6"


def certify_to(tmp_path, capsys, poly, *flags):
    out = tmp_path / "cert.json"
    assert main(["certify", "-p", poly, *flags, "--out", str(out)]) == 0
    assert "certificate" in capsys.readouterr().out
    return out


class TestCertify:
    def test_sextic(self, capsys):
        assert main(["certify", "-p", SEXTIC]) == 0
        captured = capsys.readouterr()
        assert json.loads(captured.out)["kind"] == "global"
        assert "exact certificate" in captured.err and "residual 0.000e+00" in captured.err

    def test_cubic_not_convex(self, capsys):
        assert main(["certify", "-p", "x^3", "--json"]) == 1
        doc = json.loads(capsys.readouterr().out)
        assert doc == {"status": "not_convex", "witness": "-1", "value": "-6"}

    def test_cubic_on_ray(self, capsys):
        assert main(["certify", "-p", "x^3", "--ge", "0", "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["counts"]["R"] == 1 and doc["certificate"]["terms"][0]["weight"] == "x-b"

    def test_rational_flags(self, capsys):
        assert main(["certify", "-p", "x^4 - x^3", "--interval", "1/2", "5/2"]) == 0

    @pytest.mark.parametrize("argv", [
        ["certify", "-p", "x^^2"],
        ["certify", "-p", "x^2", "--interval", "1", "0"],
        ["certify", "-p", "x^2", "--ge", "0", "--le", "1"],
        ["certify", "-p", "x^2", "--ge", "abc"],
        ["certify"],
        ["frobnicate"],
    ])
    def test_input_errors(self, argv, capsys):
        assert main(argv) == 2

    def test_forced_exact_with_irrational_roots(self, capsys):
        assert main(["certify", "-p", "x^6 + x^2 + x", "--mode", "exact"]) == 3
        assert "numerical failure" in capsys.readouterr().err


class TestVerify:
    def test_round_trip(self, tmp_path, capsys):
        out = certify_to(tmp_path, capsys, "x^2")
        assert main(["verify", "-p", "x^2", "--cert", str(out)]) == 0
        assert capsys.readouterr().out.startswith("PASS")

    def test_tampered(self, tmp_path, capsys):
        out = tmp_path / "bad.json"
        out.write_text(json.dumps({"kind": "global", "mode": "exact", "terms": [{"shape": "Q", "poly": [["1", "h"]]}]}))
        assert main(["verify", "-p", "x^2", "--cert", str(out), "--json"]) == 1
        assert json.loads(capsys.readouterr().out)["symbolic_residual"] == 1

    def test_mismatched_domain(self, tmp_path, capsys):
        out = certify_to(tmp_path, capsys, "x^3", "--ge", "0")
        assert main(["verify", "-p", "x^3", "--cert", str(out), "--ge", "1", "--json"]) == 1
        doc = json.loads(capsys.readouterr().out)
        assert not doc["structural_ok"] and doc["problems"]
        assert main(["verify", "-p", "x^3", "--cert", str(out), "--global"]) == 1

    def test_unreadable(self, tmp_path, capsys):
        assert main(["verify", "-p", "x^2", "--cert", str(tmp_path / "missing.json")]) == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        assert main(["verify", "-p", "x^2", "--cert", str(bad)]) == 2


class TestCheck:
    def test_quartic(self, capsys):
        assert main(["check", "-p", "x^4", "--trials", "500", "--size", "6", "--seed", "1"]) == 0

    def test_cubic(self, capsys):
        assert main(["check", "-p", "x^3", "--trials", "100", "--size", "1", "--seed", "1"]) == 1
        assert "witness" in capsys.readouterr().out

    def test_cubic_on_ray(self, capsys):
        assert main(["check", "-p", "x^3", "--ge", "0", "--trials", "500", "--size", "4", "--seed", "1"]) == 0

    def test_budget_must_be_positive(self, capsys):
        assert main(["check", "-p", "x^2", "--trials", "0"]) == 2


class TestHessian:
    def test_quadratic(self, capsys):
        assert main(["hessian", "-p", "x^2", "--json"]) == 0
        assert json.loads(capsys.readouterr().out) == {"hessian": [["2", "h*h"]]}

    def test_cyclic(self, capsys):
        assert main(["hessian", "-p", "x^3", "--cyclic", "--json"]) == 0
        assert json.loads(capsys.readouterr().out) == {"hessian": [["6", "x*h*h"]]}


def test_console_pipe(tmp_path):
    """certify writes to stdout and verify reads it from stdin."""
    run = [sys.executable, "-m", "traceconvex"]
    made = subprocess.run(run + ["certify", "-p", SEXTIC], capture_output=True, text=True, check=True)
    checked = subprocess.run(run + ["verify", "-p", SEXTIC, "--cert", "-"], input=made.stdout,
                             capture_output=True, text=True)
    assert checked.returncode == 0, checked.stdout + checked.stderr
