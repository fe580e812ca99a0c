import json
import subprocess
import sys
from pathlib import Path

from rcpsolve.cli import run

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


def test_exit_codes(capsys):
    assert run(["solve", str(INSTANCES / "square.smt2")]) == 1
    assert capsys.readouterr().out.strip() == "unsat"
    assert run(["solve", "--model", str(INSTANCES / "bio_example.smt2")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("sat\n(model") and "define-fun y" in out
    assert run(["solve", "--strategy", "fair", "--timeout", "5", str(INSTANCES / "lowerbound.smt2")]) == 2
    assert capsys.readouterr().out.strip() == "unknown"


def test_errors_exit_three(tmp_path, capsys):
    bad = tmp_path / "bad.smt2"
    bad.write_text("(assert (= x")
    assert run(["solve", str(bad)]) == 3
    assert run(["solve", str(tmp_path / "missing.smt2")]) == 3
    assert run(["bogus"]) == 3


def test_stats_and_proof_files(tmp_path, capsys):
    stats, proof = tmp_path / "s.json", tmp_path / "p.dot"
    assert run(["solve", "--stats", str(stats), "--proof", str(proof), str(INSTANCES / "pcp1.smt2")]) == 1
    data = json.loads(stats.read_text())
    assert data["verdict"] == "unsat" and "expansions" in data["stats"]
    assert proof.read_text().startswith("digraph")


def test_prove(tmp_path, capsys):
    out = tmp_path / "square.dot"
    assert run(["prove", "--out", str(out), str(INSTANCES / "square.smt2")]) == 1
    assert out.read_text().count("[Close]") == 2
    assert run(["prove", str(INSTANCES / "bio_example.smt2")]) == 0


def test_check_orderable(capsys):
    assert run(["check-orderable", str(INSTANCES / "sanitization.smt2")]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] == "orderable" and data["straight_line"] is False


def test_generators_and_parallel_solve(tmp_path, capsys):
    assert run(["gen-pcp", "--count", "3", "--out", str(tmp_path)]) == 0
    assert run(["gen-bio", "--unsat", "--dna-len", "40", "--pattern-len", "5", "--out", str(tmp_path)]) == 0
    files = sorted(str(p) for p in tmp_path.glob("*.smt2"))
    assert len(files) == 4
    assert run(["solve", "--jobs", "2", "--timeout", "10", *files]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 4 and all(": " in line for line in lines)
    bio = [line for line in lines if "bio_unsat" in line]
    assert bio[0].endswith("unsat")


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "rcpsolve.cli", "solve", str(INSTANCES / "pcp1.smt2")], capture_output=True, text=True)
    assert r.returncode == 1 and r.stdout.strip() == "unsat"
