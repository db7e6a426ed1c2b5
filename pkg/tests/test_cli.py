import os
from fractions import Fraction

import pytest

from hypercut.cli import experiment_sweep, main
from hypercut.core import build
from hypercut.hgio import load, parse, serialize
from hypercut.instances import GenSpec, generate
from hypercut.errors import InvalidParams


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ------------------------------------------------------------- file format


def test_round_trip_simple():
    h = build(5, [[0, 1, 2], [2, 3], [2, 3]], max_arity=4)
    assert parse(serialize(h)) == h


def test_round_trip_corpus():
    for spec in [
        GenSpec(family="sts", n=13),
        GenSpec(family="matching", n=12, k=3),
        GenSpec(family="random", n=10, k=4, p=0.3, seed=5),
    ]:
        h = generate(spec)
        assert parse(serialize(h)) == h


def test_parse_comments_and_errors():
    text = "# a comment\nhg 1 3 4 1\n0 1 2\n"
    h = parse(text)
    assert h.m == 1
    with pytest.raises(InvalidParams):
        parse("hg 2 3 4 1\n0 1 2\n")
    with pytest.raises(InvalidParams):
        parse("hg 1 3 4 2\n0 1 2\n")


# ------------------------------------------------------------- commands


def test_gen_exact_round(tmp_path, capsys):
    path = tmp_path / "s9.hg"
    code, _, _ = run(capsys, "gen", "--family", "sts", "--n", "9", "-o", str(path))
    assert code == 0
    code, out, _ = run(capsys, "exact", str(path), "--r", "2")
    assert code == 0
    assert out.strip() == "10"


def test_cut_es_reports_guarantee(tmp_path, capsys):
    path = tmp_path / "s9.hg"
    run(capsys, "gen", "--family", "sts", "--n", "9", "-o", str(path))
    code, out, _ = run(capsys, "cut", str(path), "--algo", "es", "--r", "2", "--seed", "7")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "instance n=9 m=12 k=3"
    size = int(lines[2].split()[0].split("=")[1])
    guarantee_line = next(ln for ln in lines if ln.startswith("guarantee"))
    promised = Fraction(guarantee_line.split("promised=")[1].split()[0])
    excess = Fraction(lines[2].split("excess=")[1])
    assert excess >= promised
    assert "status=ok" in guarantee_line
    assert size >= 9


def test_cut_deterministic_output(tmp_path, capsys):
    path = tmp_path / "inst.hg"
    run(capsys, "gen", "--family", "sts", "--n", "13", "-o", str(path))
    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, "cut", str(path), "--algo", "auto", "--r", "3", "--seed", "3")
        assert code == 0
        outs.append("\n".join(ln for ln in out.splitlines() if not ln.startswith("runtime")))
    assert outs[0] == outs[1]


def test_bounds_sts9(tmp_path, capsys):
    path = tmp_path / "s9.hg"
    run(capsys, "gen", "--family", "sts", "--n", "9", "-o", str(path))
    code, out, _ = run(capsys, "bounds", str(path), "--r", "2")
    assert code == 0
    sts_line = next(ln for ln in out.splitlines() if ln.startswith("sts-2cut"))
    assert sts_line.split()[1] == "1"


def test_check_monotonicity(tmp_path, capsys):
    path = tmp_path / "one.hg"
    path.write_text("hg 1 3 3 1\n0 1 2\n")
    code, out, _ = run(
        capsys,
        "check", str(path), "--kind", "monotonicity", "--r", "2",
        "--edge", "0,1,2", "--constraint", "0,1:2",
    )
    assert code == 0
    assert "verdict=STRICT" in out


def test_check_goodness(tmp_path, capsys):
    path = tmp_path / "m.hg"
    run(capsys, "gen", "--family", "matching", "--n", "12", "--k", "3", "-o", str(path))
    code, out, _ = run(
        capsys, "check", str(path), "--kind", "goodness",
        "--parts", "0,1,2;3,4,5;6,7,8;9,10,11",
    )
    assert code == 0
    assert "spread_violations=4" in out


def test_invalid_input_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.hg"
    bad.write_text("not a header\n")
    code, _, err = run(capsys, "cut", str(bad))
    assert code == 1
    assert "error:" in err


def test_gen_infeasible_exit_code(capsys):
    code, _, err = run(capsys, "gen", "--family", "sts", "--n", "8")
    assert code == 1
    assert "error:" in err


# ------------------------------------------------------------- sweep


def test_sweep_matching_es_exact_column(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, _, _ = run(
        capsys,
        "sweep", "--families", "matching", "--sizes", "12,24,36",
        "--algos", "es", "--r", "2", "--seed", "1", "-o", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    header = lines[0].split(",")
    assert header == [
        "family", "n", "m", "k", "r", "seed", "algo", "size",
        "expected", "excess", "guarantee", "runtime_ms",
    ]
    rows = [dict(zip(header, ln.split(","))) for ln in lines[1:]]
    for row in rows:
        if row["family"] == "matching":
            # the deferred engine realizes n/12 on a perfect matching exactly
            assert Fraction(row["excess"]) == Fraction(int(row["n"]), 12)
    assert any(row["family"] == "slope-summary" for row in rows)


def test_sweep_deterministic_modulo_runtime(tmp_path, capsys):
    texts = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        code, _, _ = run(
            capsys,
            "sweep", "--families", "sts", "--sizes", "9,13",
            "--algos", "es,chromatic", "--r", "2", "--seed", "5", "-o", str(out),
        )
        assert code == 0
        rows = out.read_text().splitlines()
        texts.append([",".join(ln.split(",")[:-1]) for ln in rows])
    assert texts[0] == texts[1]


def test_sweep_empty_grid(tmp_path):
    rows = experiment_sweep(
        {"families": [], "sizes": [], "algos": ["es"], "r": 2, "seed": 0}
    )
    assert all(r["family"] == "slope-summary" for r in rows)


def test_sweep_threads_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("HYPERCUT_THREADS", "4")
    out = tmp_path / "t.csv"
    code, _, _ = run(
        capsys,
        "sweep", "--families", "matching", "--sizes", "12,24",
        "--algos", "es", "--r", "2", "--seed", "2", "-o", str(out),
    )
    assert code == 0
    assert len(out.read_text().splitlines()) == 4  # header + 2 rows + summary


def test_check_moments(tmp_path, capsys):
    path = tmp_path / "m.hg"
    path.write_text("hg 1 4 4 1\n0 1 2 3\n")
    code, out, _ = run(
        capsys, "check", str(path), "--kind", "moments",
        "--w", "0,1", "--pair", "0,1", "--samples", "20000",
    )
    assert code == 0
    assert "verdict=PASS" in out


def test_sweep_sts_pipeline_positive_slope(tmp_path, capsys):
    out = tmp_path / "sts.csv"
    code, _, _ = run(
        capsys,
        "sweep", "--families", "sts", "--sizes", "9,15,21,27,33",
        "--algos", "auto", "--r", "3", "--seed", "4", "-o", str(out),
    )
    assert code == 0
    summary = [ln for ln in out.read_text().splitlines() if ln.startswith("slope-summary")]
    slope = float(summary[0].split(",")[9])
    assert slope > 0


def test_guarantee_violation_exit_code(tmp_path, capsys, monkeypatch):
    # exit code 2 is reserved for a failed deterministic promise
    import hypercut.cli as cli
    from hypercut.cutspace import Cut
    from hypercut.pipeline import GuaranteeLedger

    def broken(h, algo, r, trials, seed):
        ledger = GuaranteeLedger()
        ledger.add("fabricated promise", Fraction(5), Fraction(0))
        return Cut(2, tuple(1 for _ in range(h.n_vertices))), ledger

    monkeypatch.setattr(cli, "_run_algorithm", broken)
    path = tmp_path / "x.hg"
    path.write_text("hg 1 3 3 1\n0 1 2\n")
    code, _, err = run(capsys, "cut", str(path))
    assert code == 2
    assert "GuaranteeViolation" in err
