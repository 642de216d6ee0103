import io
import json
import subprocess
import sys

import pytest

from twintrees import profiles
from twintrees.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    lines = [json.loads(line) for line in out.getvalue().splitlines() if line.startswith("{")]
    return code, lines, out.getvalue()


def test_exact_k3():
    code, lines, _ = run("exact", "--k", "3")
    assert code == 0
    assert lines[-1]["N"] == "45"
    assert [rec["M"] for rec in lines[:-1]] == ["6", "3"]


def test_exact_m_string():
    code, lines, _ = run("exact", "--n", "5", "--k", "1")
    assert code == 0
    assert lines[-1]["m_unreduced"] == "1620/625"
    assert lines[-1]["m"] == "324/125"
    assert lines[-1]["S"] == "1620"


def test_exact_domain_error():
    code, lines, _ = run("exact", "--n", "4", "--k", "2")
    assert code == 2
    assert "n must exceed 2k" in lines[0]["error"]


def test_exact_csv():
    code, _, text = run("exact", "--k", "3", "--format", "csv")
    assert code == 0
    assert text.splitlines()[0] == "record,key,value"
    assert "summary,N,45" in text


def test_usage_errors():
    assert run()[0] == 2
    assert run("nope")[0] == 2
    assert run("exact", "--k", "abc")[0] == 2
    assert run("exact")[0] == 2
    assert run("exact", "--k", "3", "--threads", "0")[0] == 2
    assert run("bound", "--k", "3", "--precision", "8")[0] == 2


@pytest.mark.parametrize("argv", [
    ("verify", "routes", "--kmax", "40"),
    ("verify", "oracle", "--nmax", "6"),
    ("verify", "saddle", "--k", "10", "--tol", "1e-6"),
    ("verify", "cayley", "--kmax", "12"),
    ("verify", "W", "--precision", "128"),
])
def test_verify_examples_pass(argv):
    code, lines, _ = run(*argv)
    assert code == 0
    assert lines[-1]["pass"] is True
    assert all(rec["pass"] for rec in lines)


def test_verify_failure_exit_code(monkeypatch):
    real = profiles.twin_profile_count_series

    def broken(k, cap=None):
        return real(k, cap) + (k == 4)

    monkeypatch.setattr(profiles, "twin_profile_count_series", broken)
    code, lines, _ = run("verify", "routes", "--kmax", "6")
    assert code == 1
    assert lines[-1]["pass"] is False
    assert lines[-1]["counterexample"]["k"] == 4
    assert sum(not rec["pass"] for rec in lines[:-1]) == 4


def test_thresholds_table():
    code, lines, _ = run("thresholds", "--n", "1000", "1000000", "1000000000",
                         "1000000000000", "--delta", "0.5")
    assert code == 0
    K = [int(r["K_n"]) for r in lines]
    b = [float(r["part_b_estimate_log"]) for r in lines]
    assert K == sorted(K) and len(set(K)) == 4
    assert b == sorted(b) and len(set(b)) == 4


def test_thresholds_bad_delta():
    assert run("thresholds", "--n", "1000", "--delta", "2.5")[0] == 2
    assert run("thresholds", "--n", "1000", "--delta", "0")[0] == 2


def test_thresholds_csv():
    _, _, text = run("thresholds", "--n", "1000", "--delta", "0.5", "--format", "csv")
    rows = text.splitlines()
    assert rows[0].startswith("n,delta,K_n,k_n")
    assert rows[1].startswith("1000,0.5,9269,240,")


def test_bound_and_integral():
    code, lines, _ = run("bound", "--k", "2", "--form", "exp")
    assert code == 0 and lines[0]["value"] == "6.0"
    code, lines, _ = run("integral", "--k", "6", "--exact")
    assert code == 0
    assert float(lines[0]["relative_error"]) < 1e-30


def test_sample_mean():
    code, lines, _ = run("sample", "--n", "3", "--k", "1", "--trials", "20000", "--seed", "7",
                         "--report", "summary")
    assert code == 0
    final = lines[-1]
    assert abs(final["mean"] - 2 / 3) <= 5 * final["std_error"]
    assert final["exact"] == "2/3"


def test_sample_threads_do_not_change_output():
    argv = ("sample", "--n", "25", "--k", "2", "--trials", "40", "--seed", "3")
    assert run(*argv)[2] == run(*argv, "--threads", "3")[2]


def test_sample_max_twin_report():
    code, lines, _ = run("sample", "--n", "60", "--trials", "5", "--report", "max-twin")
    assert code == 0
    assert [set(r) for r in lines[:-1]] == [{"trial", "max_twin_size"}] * 5


def test_lemma1_command():
    code, lines, _ = run("lemma1", "--radii", "8", "--phases", "8", "--precision", "128")
    assert code == 0
    assert lines[0]["passed"] is True
    code, lines, _ = run("lemma1", "--radii", "8", "--phases", "8", "--alpha", "100")
    assert code == 1


def test_env_precision_used(monkeypatch):
    monkeypatch.setenv("TWIN_PRECISION_BITS", "128")
    _, lines, _ = run("bound", "--k", "4")
    assert lines[0]["precision_bits"] == 128


def test_module_entry_point_byte_identical():
    argv = [sys.executable, "-m", "twintrees", "sample", "--n", "12", "--k", "1",
            "--trials", "30", "--seed", "5"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a
