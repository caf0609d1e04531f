from __future__ import annotations

import csv
import io
import subprocess
import sys

import pytest

from symbreak.cli import (EXIT_BUDGET, EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, build_model, main,
                          parse_instance, robustness, robustness_summary)

SMALL_EFPA = ["efpa:2-1-2-2", "efpa:2-2-2-3", "efpa:3-2-2-3"]


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exit_codes(capsys):
    assert _run(capsys, "solve", "--model", "magic", "--n", "3")[0] == EXIT_OK
    assert _run(capsys, "solve", "--model", "magic", "--n", "2")[0] == EXIT_INFEASIBLE
    code, out, _ = _run(capsys, "solve", "--model", "coloring", "--params", "20,8,0,6")
    assert code == EXIT_INFEASIBLE and "opt: unsat" in out
    code, out, _ = _run(capsys, "solve", "--model", "magic", "--n", "6", "--budget", "1")
    assert code == EXIT_BUDGET and "outcome: cutoff" in out
    assert _run(capsys, "solve", "--model", "magic", "--n", "3", "--cutoff", "0")[0] == EXIT_USAGE
    assert _run(capsys, "solve", "--model", "efpa", "--params", "1,2,3")[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--model", "nonsense"])
    assert exc.value.code == EXIT_USAGE


def test_solve_output_is_reproducible(capsys):
    argv = ("solve", "--model", "magic", "--n", "5", "--strategy", "model-restarts",
            "--seed", "7", "--show-restarts")
    first = _run(capsys, *argv)
    second = _run(capsys, *argv)
    assert first[0] == EXIT_OK and first[1] == second[1]
    assert "check: ok" in first[1] and "time:" not in first[1] and "time:" in first[2]


def test_efpa_with_sbds(capsys):
    code, out, _ = _run(capsys, "solve", "--model", "efpa", "--params", "4,3,3,3",
                        "--strategy", "sbds")
    assert code == EXIT_OK
    assert "instance: efpa-4-3-3-3" in out and "check: ok" in out


def test_efpa_parameter_forms():
    assert build_model("efpa", params="4,3,3,3").name == "efpa-4-3-3-3"
    assert build_model("efpa", params="v=3,q=4,lambda=3,d=3").name == "efpa-4-3-3-3"
    assert parse_instance("efpa:4-3-3-3").name == "efpa-4-3-3-3"
    assert parse_instance("magic:5:rotations").meta["group"] == "rotations"
    assert parse_instance("coloring:20,8,0").name == "coloring-20-8-0"


def test_seed_from_environment(capsys, monkeypatch):
    argv = ("solve", "--model", "magic", "--n", "4", "--value-order", "random")
    monkeypatch.setenv("SYMBREAK_SEED", "5")
    env = _run(capsys, *argv)
    flag = _run(capsys, *argv, "--seed", "5")
    assert env[1] == flag[1] and "seed 5" in env[1]
    monkeypatch.setenv("SYMBREAK_SEED", "five")
    assert _run(capsys, *argv)[0] == EXIT_USAGE


def _bench(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code = main(["bench", "--instances", *SMALL_EFPA, "--seeds", "1", "--out", str(out)])
    capsys.readouterr()
    assert code == EXIT_OK
    return out


def test_bench_writes_one_row_per_cell(tmp_path, capsys):
    out = _bench(tmp_path, capsys)
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 18
    assert {r["strategy"] for r in rows} == {"static", "model-restarts", "sbds"}
    assert all(r["opt"] == "sat" for r in rows)
    first = [r["backtracks"] for r in rows]
    _bench(tmp_path, capsys)
    lines = out.read_text().splitlines()
    assert len(lines) == 37 and lines.count(lines[0]) == 1
    again = [r["backtracks"] for r in csv.DictReader(io.StringIO("\n".join(lines)))][18:]
    assert again == first


def test_robustness_command(tmp_path, capsys):
    out = _bench(tmp_path, capsys)
    code, text, _ = _run(capsys, "robustness", str(out))
    rows = list(csv.DictReader(out.open()))
    wins, total = robustness_summary(robustness(rows))
    assert total == 3
    assert f"on {wins}/{total} instances" in text
    assert code == (EXIT_OK if 2 * wins > total else EXIT_INFEASIBLE)


def test_robustness_ratio():
    rows = [{"instance": "i", "strategy": s, "valueOrder": v, "backtracks": b}
            for s, v, b in (("static", "lex", 10), ("static", "random", 40),
                            ("model-restarts", "lex", 20), ("model-restarts", "random", 30))]
    ratios = robustness(rows)
    assert ratios[("i", "static")] == 4 and ratios[("i", "model-restarts")] == 1.5
    assert robustness_summary(ratios) == (1, 1)


def test_verify_commands(capsys):
    code, out, _ = _run(capsys, "verify", "--model", "efpa", "--params", "v=2,q=2,lambda=1,d=2")
    assert code == EXIT_OK and out.count("PASS") == 10
    code, out, _ = _run(capsys, "verify", "--model", "most-perfect", "--n", "4",
                        "--inject-swap", "0,1")
    assert code == EXIT_INFEASIBLE
    assert out.startswith("generators") and "FAIL" in out and "swap(0,1)" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "symbreak.cli", "solve", "--model", "magic",
                           "--n", "3"], capture_output=True, text=True, check=False)
    assert proc.returncode == EXIT_OK and "check: ok" in proc.stdout
