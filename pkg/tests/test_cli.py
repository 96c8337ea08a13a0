"""Command-line interface: outputs, exit codes and error messages."""
import csv
import io
import json
import subprocess
import sys

import pytest

from besselbound.cli import main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_besseli():
    code, out, _ = run("besseli", "--alpha", "0.5", "--x", "1")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(0.9376748882454876, rel=1e-12)
    code, out, _ = run("besseli", "--alpha", "0", "--x", "100", "--scaled")
    assert code == 0
    d = json.loads(out)
    assert d["scaled_value"] == pytest.approx(0.03994437929, rel=1e-9)


def test_constants_example():
    code, out, _ = run("constants", "--mu", "0", "--q", "0", "--gamma", "0.25", "--theta", "0.5")
    assert code == 0
    d = json.loads(out)
    assert d["M"] == pytest.approx(6)
    assert d["A_term"] == pytest.approx(5.43656365691809, rel=1e-12)


def test_constants_optimize_and_shifted():
    code, out, _ = run("constants", "--mu", "0", "--q", "0", "--gamma", "0.25", "--optimize")
    d = json.loads(out)
    assert code == 0 and 0.50 < d["theta_star"] < 0.52 and 5.4 < d["M_hat"] < 6
    code, out, _ = run("constants", "--nu", "0.5", "--n", "1", "--gamma", "0.25", "--theta", "0.5")
    assert code == 0 and json.loads(out)["K"] == pytest.approx(2.5)


def test_quotient_example():
    code, out, err = run("quotient", "--mu", "0", "--q", "0", "--gamma", "0.5", "--x-min", "1e-4",
                         "--x-max", "300", "--points", "50", "--log-grid")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x", "R", "R_prime", "bound"]
    assert len(rows) == 51
    assert float(rows[1][1]) == pytest.approx(2, abs=1e-3)
    assert float(rows[-1][1]) == pytest.approx(2.01, abs=1e-3)
    assert err.startswith("#")


def test_quotient_inadmissible_order_bound_is_inf():
    code, out, _ = run("quotient", "--mu", "0", "--q", "0", "--gamma", "0.5", "--kappa", "1.5",
                       "--points", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert all(r["bound"] == "inf" for r in rows)


def test_sharp():
    code, out, _ = run("sharp", "--mu", "0", "--q", "0", "--gamma", "0.25")
    assert code == 0
    d = json.loads(out)
    assert d["M_star"] == pytest.approx(2.19654, abs=1e-5)
    assert d["agree"] is True


def test_usage_errors_name_condition():
    code, _, err = run("constants", "--mu", "0", "--q", "0", "--gamma", "0.5", "--theta", "0.3")
    assert code == 2 and "requires gamma < theta < 1" in err
    code, _, err = run("besseli", "--alpha", "-2", "--x", "1")
    assert code == 2 and "requires" in err
    code, _, _ = run("frobnicate")
    assert code == 2
    code, _, err = run("verify", "--suite", "nope")
    assert code == 2 and "unknown suite" in err


def test_verify_single_suite(tmp_path):
    path = tmp_path / "r.jsonl"
    code, out, _ = run("verify", "--suite", "ratio_2_1", "--output", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines and all(json.loads(line)["passed"] for line in lines)


def test_verify_failure_exit_code():
    # a negative tolerance cannot be met by the equality case margins
    code, out, _ = run("verify", "--suite", "power_2_2", "--tol", "-1")
    assert code == 1
    assert '"passed": false' in out


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "besselbound", "constants", "--mu", "2", "--q", "0",
                        "--gamma", "0.5"], capture_output=True, text=True)
    assert p.returncode == 0
    assert json.loads(p.stdout)["K"] == 6
