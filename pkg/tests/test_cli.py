import io
import subprocess
import sys
from pathlib import Path

import pytest

from cdagsat.cli import main, parse_solver_output
from cdagsat.trace import loads_records

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"
SAMPLE = str(DATA / "sample5.cnf")
UNSAT = str(DATA / "unsat8.cnf")


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_solve_sample_certificate():
    code, text = run("solve", SAMPLE, "--certificate")
    assert code == 10
    assert "s SATISFIABLE" in text.splitlines()
    assert "v -1 -2 -3 -4 -5 -6 0" in text.splitlines()
    assert parse_solver_output(text) == (True, [-1, -2, -3, -4, -5, -6])


def test_solve_unsat():
    code, text = run("solve", UNSAT)
    assert code == 20
    assert parse_solver_output(text) == (False, None)


def test_solve_machine_and_trace():
    code, text = run("solve", SAMPLE, "--machine", "--trace")
    assert code == 10
    recs = loads_records(text)
    assert recs[-1]["record"] == "verdict"
    assert recs[-1]["certificate"] == [False] * 6
    assert any(r.get("event") == "stage" for r in recs)
    assert run("solve", SAMPLE, "--machine", "--trace") == (code, text)


def test_solve_errors(tmp_path):
    bad = tmp_path / "bad.cnf"
    bad.write_text("p cnf 3 1\n1 1 2 0\n")
    assert run("solve", str(bad))[0] == 1
    assert run("solve", str(tmp_path / "missing.cnf"))[0] == 1
    assert run("solve", SAMPLE, "--budget", "0")[0] == 1


def test_usage_errors_exit_one(capsys):
    assert run()[0] == 1
    assert run("solve")[0] == 1
    assert run("fuzz", "--vars", "6")[0] == 1
    assert run("fuzz", "--vars", "6", "--clauses", "9..3", "--out", "x")[0] == 1
    assert "usage:" in capsys.readouterr().err


@pytest.mark.parametrize("method", ["truth-table", "clause-set"])
def test_oracle(method):
    code, text = run("oracle", SAMPLE, "--method", method)
    assert code == 10
    assert parse_solver_output(text) == (True, [-1, -2, -3, -4, -5, -6])
    assert run("oracle", UNSAT, "--method", method)[0] == 20


def test_diff():
    code, text = run("diff", UNSAT)
    assert code == 0
    assert text.startswith("agree")
    code, text = run("diff", SAMPLE, "--machine")
    assert code == 0 and loads_records(text)[0]["anomaly"] == "none"


def test_fuzz(tmp_path):
    args = ["fuzz", "--vars", "6", "--clauses", "20", "--trials", "30", "--seed", "7", "--machine"]
    code, a = run(*args, "--out", str(tmp_path / "a"))
    assert code == 0
    code, b = run(*args, "--out", str(tmp_path / "b"), "--jobs", "2")
    assert a == b
    rec = loads_records(a)[0]
    assert rec["trials"] == 30 and "wall_time" not in rec
    code, text = run("fuzz", "--vars", "5", "--clauses", "10..30", "--trials", "10", "--planted",
                     "--out", str(tmp_path / "p"))
    assert code == 0 and "agreements 10" in text


def test_demo_golden(tmp_path):
    code, text = run("demo", "--out", str(tmp_path))
    assert code == 0
    assert text == (GOLDEN / "demo.txt").read_text()
    assert (tmp_path / "demo.txt").read_bytes() == (GOLDEN / "demo.txt").read_bytes()
    assert (tmp_path / "demo.meta").read_bytes() == (GOLDEN / "demo.meta").read_bytes()
    assert "Stage 4: merge of both copies" in text
    assert "pair ~x2 ~x3" in text


def test_bench():
    code, a = run("bench", "--max-vars", "8", "--ratio", "4.26", "--seed", "2", "--machine")
    assert code == 0
    assert a == run("bench", "--max-vars", "8", "--ratio", "4.26", "--seed", "2", "--machine")[1]
    assert len(loads_records(a)) == 6
    assert run("bench", "--max-vars", "2", "--ratio", "4", "--seed", "0")[0] == 1


def test_parse_solver_output_multiline_values():
    assert parse_solver_output("s SATISFIABLE\nv 1 -2\nv 3 0\n") == (True, [1, -2, 3])
    with pytest.raises(ValueError):
        parse_solver_output("s SATISFIABLE\nv 1 2\n")
    with pytest.raises(ValueError):
        parse_solver_output("s MAYBE\n")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cdagsat", "solve", SAMPLE, "--certificate"],
                          capture_output=True, text=True)
    assert proc.returncode == 10
    assert parse_solver_output(proc.stdout)[0] is True
