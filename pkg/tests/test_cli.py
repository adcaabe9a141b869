from pathlib import Path

import pytest

from tracelab.cli import main, parse_range
from tracelab.errors import ParseError

DATA = Path(__file__).parent / "data"


def run(capsysbinary, *argv):
    code = main(list(argv))
    out, err = capsysbinary.readouterr()
    return code, out.decode(), err.decode()


def test_parse_range():
    assert parse_range("-20..10") == (-20, 10)
    for bad in ("1..", "3..1", "1-2", "a..b"):
        with pytest.raises(ParseError):
            parse_range(bad)


def test_simulate_golden(capsysbinary):
    code, out, _ = run(capsysbinary, "simulate", "--p", "3", "--q", "2", "--value", "1", "--steps", "30",
                       "--window=-20..10", "--format", "ascii")
    assert code == 0
    assert out.encode() == (DATA / "mul32_one_30x31.txt").read_bytes()
    code, out, _ = run(capsysbinary, "simulate", "--value", "1", "--window=-20..10", "--format", "pgm")
    assert out.encode() == (DATA / "mul32_one_30x31.pgm").read_bytes()


def test_simulate_zero_white(capsysbinary):
    code, out, _ = run(capsysbinary, "simulate", "--value", "0", "--steps", "4", "--format", "pgm")
    assert code == 0
    assert set(out.split()[4:]) == {"255"}


def test_simulate_config(tmp_path, capsysbinary):
    cfg = tmp_path / "marker.cfg"
    cfg.write_text("0|3.|0\n")
    code, out, _ = run(capsysbinary, "simulate", "--config", str(cfg), "--steps", "5", "--window=-1..5")
    assert code == 0
    rows = out.splitlines()
    # the marker moves one column right per row with zeros after it
    for t, row in enumerate(rows):
        assert row[t + 1] == "3" and set(row[t + 2:]) <= {"0"}


def test_simulate_png(tmp_path, capsysbinary):
    png = tmp_path / "d.png"
    fig = tmp_path / "f.png"
    assert run(capsysbinary, "simulate", "--value", "1", "--steps", "10", "--format", "png", "--out", str(png))[0] == 0
    assert png.read_bytes()[:4] == b"\x89PNG"
    assert run(capsysbinary, "simulate", "--value", "1", "--steps", "10", "--figure", str(fig))[0] == 0
    assert fig.exists()
    assert run(capsysbinary, "simulate", "--value", "1", "--format", "png")[0] == 2


@pytest.mark.parametrize("argv", [
    ["simulate", "--value", "1.5"],
    ["simulate", "--value", "-1"],
    ["simulate", "--value", "1/5"],
    ["simulate"],
    ["simulate", "--value", "1", "--window", "x"],
    ["companion", "--value", "-1"],
    ["companion", "--value", "0"],
    ["verify", "--p", "4", "--q", "2"],
    ["language", "--p", "6", "--q", "3"],
    ["sofic", "--graph", "file"],
    ["simulate", "--value", "1", "--p", "3.0"],
])
def test_input_errors_exit_2(capsysbinary, argv):
    with pytest.raises(SystemExit) if "--p" in argv and "3.0" in argv else _noop():
        code, _, err = run(capsysbinary, *argv)
        assert code == 2 and err


class _noop:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def test_language_report(capsysbinary, tmp_path):
    fig = tmp_path / "c.png"
    code, out, _ = run(capsysbinary, "language", "--p", "3", "--q", "2", "--n-max", "5", "--figure", str(fig))
    assert code == 0
    lines = out.split("\n")
    assert lines[0].startswith("n,words,closed_form")
    assert [int(l.split(",")[1]) for l in lines[1:6]] == [6, 24, 84, 276, 876]
    assert all(",MATCH," in l and l.endswith("MATCH") for l in lines[1:6])
    assert "\r" not in out and fig.exists()


def test_language_52(capsysbinary):
    code, out, _ = run(capsysbinary, "language", "--p", "5", "--q", "2", "--n-max", "3")
    assert code == 0 and out.count("MISMATCH") == 0 and out.count("MATCH") == 6


def test_language_header_only(capsysbinary):
    code, out, _ = run(capsysbinary, "language", "--n-max", "0")
    assert code == 0 and out == "n,words,closed_form,count_match,w1,w2,w2_expected,w2_match\n"


def test_language_budget(capsysbinary, monkeypatch):
    assert run(capsysbinary, "language", "--n-max", "5", "--budget", "50")[0] == 3
    monkeypatch.setenv("TRACELAB_BUDGET", "50")
    assert run(capsysbinary, "language", "--n-max", "5")[0] == 3


def test_language_threads_identical(capsysbinary):
    a = run(capsysbinary, "language", "--n-max", "4", "--threads", "1")[1]
    b = run(capsysbinary, "language", "--n-max", "4", "--threads", "3")[1]
    assert a == b


def test_language_mismatch_exit_1(capsysbinary, monkeypatch):
    import tracelab.cli as cli
    monkeypatch.setattr(cli, "complexity_closed_form", lambda n, params: -1)
    code, out, _ = run(capsysbinary, "language", "--n-max", "2")
    assert code == 1 and "MISMATCH" in out


def test_companion(capsysbinary):
    code, out, _ = run(capsysbinary, "companion", "--p", "3", "--q", "2", "--value", "1", "--range", "0..10")
    assert code == 0
    rows = out.splitlines()[1:]
    assert len(rows) == 11 and all(r.split(",")[5] == "MATCH" for r in rows)
    code, out, _ = run(capsysbinary, "companion", "--value", "1/2", "--range", "0..2")
    assert [int(r.split(",")[4]) for r in out.splitlines()[1:]] == [0, 2, -1]


def test_sofic(capsysbinary, tmp_path):
    counts = ["6", "24", "84", "276", "876", "2724"]
    for argv in (["--graph", "trans32"], ["--graph", "zpq", "--p", "3", "--q", "2"]):
        code, out, _ = run(capsysbinary, "sofic", *argv, "--n-max", "6")
        assert code == 0
        assert [l.split(",")[1] for l in out.splitlines()[1:]] == counts
    edges = tmp_path / "loop.txt"
    edges.write_text("v v a\n")
    code, out, _ = run(capsysbinary, "sofic", "--graph", "file", "--edges", str(edges), "--n-max", "4")
    assert code == 0 and [l.split(",")[1] for l in out.splitlines()[1:]] == ["1"] * 4
    edges.write_text("v v\n")
    assert run(capsysbinary, "sofic", "--graph", "file", "--edges", str(edges))[0] == 2


def test_verify(capsysbinary):
    code, out, _ = run(capsysbinary, "verify", "--p", "3", "--q", "2", "--suite", "all")
    assert code == 0 and out.rstrip().endswith("checks") and "FAIL" not in out
    code, out, _ = run(capsysbinary, "verify", "--p", "5", "--q", "3", "--suite", "lemmas")
    assert code == 0


def test_verify_counterexample_exit_1(capsysbinary, monkeypatch):
    import numpy as np
    import tracelab.checks as checks
    monkeypatch.setattr(checks, "mul_table", lambda params: np.zeros((6, 6), dtype=np.uint8))
    code, out, err = run(capsysbinary, "verify", "--suite", "lemmas")
    assert code == 1 and "FAIL" in out and "counterexample" in err


def test_mahler_search(capsysbinary, tmp_path):
    fig = tmp_path / "s.png"
    code, out, _ = run(capsysbinary, "mahler-search", "--max-num", "8000", "--max-den-exp", "1", "--steps", "60",
                       "--top", "3", "--figure", str(fig))
    assert code == 0 and fig.exists()
    lines = out.splitlines()
    assert lines[0] == "numerator,denominator_exponent,run_length,first_violation"
    assert int(lines[1].split(",")[2]) >= 14
    a = run(capsysbinary, "mahler-search", "--max-num", "300", "--threads", "2")[1]
    b = run(capsysbinary, "mahler-search", "--max-num", "300")[1]
    assert a == b


def test_constrained_prefix(capsysbinary, tmp_path):
    out_file = tmp_path / "z.csv"
    code, _, _ = run(capsysbinary, "constrained-prefix", "--steps", "50", "--out", str(out_file))
    assert code == 0
    rows = out_file.read_text().splitlines()[1:]
    assert len(rows) == 50 and all(int(r.split(",")[2]) < 3 for r in rows)
    assert run(capsysbinary, "constrained-prefix", "--steps", "0")[0] == 2


def test_module_entry():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "tracelab", "sofic", "--graph", "trans32", "--n-max", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "n,count,formula,match\n1,6,6,MATCH\n2,24,24,MATCH\n"
