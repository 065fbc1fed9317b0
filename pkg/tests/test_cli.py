from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import pytest

from graphonlab.cli import main, stage_seed

DEMO = Path(__file__).resolve().parents[1] / "demo"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def outputs(text):
    return json.loads(text)["outputs"]


@pytest.mark.parametrize("argv,value", [
    (["svejk", "17/2", "19/2", "--scaled"], "1"),   # both points in Q
    (["cf:4", "1/40", "1/33"], "1"),                # same block
    (["constant:1/2", "0.3", "0.9"], "1/2"),
    (["half", "1/2", "1/2"], "1"),
])
def test_eval(capsys, argv, value):
    code, out, _ = run(capsys, "eval", *argv)
    assert code == 0 and outputs(out)["value"] == value


def test_eval_domain_error(capsys):
    code, _, err = run(capsys, "eval", "half", "2", "0")
    assert code == 1 and "error" in err


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["--samples", "0", "eval", "half", "0", "0"])
    assert info.value.code == 1
    code, _, _ = run(capsys, "eval", "mystery:3", "0", "0")
    assert code == 1


def test_degrees_constant_and_half(capsys):
    code, out, _ = run(capsys, "degrees", "constant:1/3", "--points", "5")
    rows = json.loads(out)["rows"]
    assert code == 0 and rows[0]["min"] == rows[0]["max"] == "1/3"
    code, out, _ = run(capsys, "degrees", "half", "--points", "5")
    assert code == 0 and json.loads(out)["rows"][0]["degree_at_1/4"] == "1/4"


def test_degrees_svejk_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "degrees", "svejk", "--points", "3")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "part,min,max,mean,expected,ok"
    assert len(lines) == 11
    q = next(ln for ln in lines if ln.startswith("Q,"))
    assert q.endswith(">= 5/13,True")


def test_flags_after_command(capsys):
    a = run(capsys, "--seed", "4", "sample", "half", "6")[1]
    b = run(capsys, "sample", "half", "6", "--seed", "4")[1]
    assert a == b


def test_sample_reproducible(capsys):
    first = run(capsys, "sample", "cf:4", "8")[1]
    assert first == run(capsys, "sample", "cf:4", "8")[1]
    assert first != run(capsys, "--seed", "1", "sample", "cf:4", "8")[1]


def test_density_exact_and_decimal(capsys):
    code, out, _ = run(capsys, "density", "cf:4", "K3")
    assert code == 0 and outputs(out) == {"value": "17/128", "stderr": "0", "exact": True}
    out = run(capsys, "--decimal", "density", "constant:1/2", "K3")[1]
    assert outputs(out)["value"] == "0.125"


def test_density_reproducible_on_monte_carlo_path(capsys):
    a = run(capsys, "--samples", "20000", "density", "half", "K3 + 1/2 * K2")[1]
    b = run(capsys, "--samples", "20000", "density", "half", "K3 + 1/2 * K2")[1]
    assert a == b and outputs(a)["exact"] is False


def test_partition_constant(capsys, tmp_path):
    trace = tmp_path / "trace.csv"
    code, out, _ = run(capsys, "partition", "constant:1/2", "0.1", "--out", tmp_path / "p.json",
                       "--trace", trace)
    assert code == 0 and outputs(out)["parts"] == 1
    assert trace.read_text().splitlines() == ["step,parts,energy", "0,1,0.25"]
    assert json.loads((tmp_path / "p.json").read_text())["parts"]


def test_partition_cf_then_deviation(capsys, tmp_path):
    code, out, _ = run(capsys, "partition", "cf:4", "0.3", "--out", tmp_path / "p.json")
    o = outputs(out)
    assert code == 0 and o["parts"] == 1
    assert Fraction(o["final_deviation"]) <= Fraction(3, 10)
    code, out, _ = run(capsys, "deviation", "cf:4", tmp_path / "p.json")
    assert code == 0 and outputs(out)["deviation"] == "1/32"


def test_refute_single_part(capsys, tmp_path):
    code, out, _ = run(capsys, "refute", "16", "trivial", "--out", tmp_path / "r.json")
    o = outputs(out)
    assert code == 0 and o["verified"] and o["failed_checks"] == []
    assert "/" in o["discrepancy"]
    assert json.loads((tmp_path / "r.json").read_text())["m"] == 16


def test_refute_coordinate_partition(capsys):
    code, out, _ = run(capsys, "refute", "16", "coords:2")
    assert code == 0 and Fraction(outputs(out)["discrepancy"]) >= Fraction(1, 2**15)


def test_refute_precondition_exit_3(capsys):
    code, _, err = run(capsys, "refute", "16", "coords:4")
    assert code == 3 and "precondition" in err


def test_constraint_rooted_example_bundle(capsys):
    code, out, _ = run(capsys, "constraint", DEMO / "rooted_example.constraints", f"@{DEMO / 'two_part.json'}",
                       "--parts", DEMO / "two_part_parts.json")
    rows = json.loads(out)["rows"]
    assert code == 0
    assert [r["status"] for r in rows] == ["satisfied", "satisfied", "null-satisfied"]
    assert float(rows[0]["lhs"]) == pytest.approx(1 / 16)


def test_constraint_ordinary(capsys, tmp_path):
    ok = tmp_path / "ok.txt"
    ok.write_text("K2 = 0.5\n")
    bad = tmp_path / "bad.txt"
    bad.write_text("K2 = 0.5\nK2 = 0.6\n")
    assert run(capsys, "constraint", ok, "constant:1/2")[0] == 0
    code, out, _ = run(capsys, "constraint", bad, "constant:1/2")
    assert code == 2 and json.loads(out)["rows"][1]["status"] == "violated"


def test_constraint_parse_error_names_line(capsys, tmp_path):
    f = tmp_path / "broken.txt"
    f.write_text("K2 = 1/2\n\nK3 + = 1\n")
    code, _, err = run(capsys, "constraint", f, "constant:1/2")
    assert code == 1 and "line 3" in err


@pytest.mark.parametrize("n", [0, 1, 2])
def test_extract_cf(capsys, n):
    code, out, _ = run(capsys, "extract-cf", n, "--pairs", "300")
    assert code == 0 and outputs(out)["max_abs_diff"] == "0"


def test_extract_cf_level_too_large(capsys):
    assert run(capsys, "extract-cf", "5")[0] == 3


def test_stage_seeds_are_distinct():
    assert stage_seed(0, "a") != stage_seed(0, "b")
    assert stage_seed(7, "a") == stage_seed(7, "a")
