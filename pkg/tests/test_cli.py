import json

import pytest

from chainrep.cli import main

SUCC = """signature P1
component pairs dim=2
universe x < y & ~ex z. (x < z & z < y)
relation E/2 on (pairs, pairs) := x = x & y = u & v = v
"""


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def run_json(capsys, *argv):
    status, out, err = run(capsys, *argv, "--format", "json")
    return status, json.loads(out), err


def test_mindim_example(capsys):
    status, report, _ = run_json(capsys, "mindim", "--sig", "P1",
                                 "--formula", "P1(x)")
    assert status == 0
    assert report["result"]["dimension"] == 1
    assert report["tool"]["name"] == "chainrep"
    assert report["tool"]["version"]
    assert report["config"]["seed"] == 0


def test_decide_negative_reports_minimal_dimension(capsys):
    status, report, _ = run_json(capsys, "decide", "--dim", "1",
                                 "--sig", "P1", "--formula", "x<y")
    assert status == 1
    assert report["result"]["answer"] is False
    assert report["result"]["minimal_dimension"] == 2


def test_decide_positive(capsys):
    status, report, _ = run_json(capsys, "decide", "--dim", "2",
                                 "--sig", "P1", "--formula", "x<y")
    assert status == 0 and report["result"]["answer"] is True


def test_growth_report(capsys):
    status, report, _ = run_json(capsys, "growth", "--sig", "P1",
                                 "--formula", "P1(x)", "--n", "2",
                                 "--max-len", "5")
    assert status == 0
    assert report["result"]["degree"] == 1
    assert report["result"]["sandwich"]["ok"] is True
    assert report["result"]["lower_witness"]["oracle_count"] >= 2


def test_monoid_report(capsys):
    status, report, _ = run_json(capsys, "monoid", "--sig", "P1",
                                 "--formula", "x<y")
    assert status == 0
    r = report["result"]
    assert r["size"] == len(r["elements"])
    assert r["table"][r["identity"]] == list(range(r["size"]))


def test_normalform_report(capsys):
    status, report, _ = run_json(capsys, "normalform", "--sig", "P1",
                                 "--formula", "P1(x)")
    assert status == 0
    assert report["result"]["disjuncts"]
    for d in report["result"]["disjuncts"]:
        assert len(d["types"]) == 2  # one variable: prefix + one segment


def test_witness_report(capsys):
    status, report, _ = run_json(capsys, "witness", "--sig", "P1",
                                 "--formula", "P1(x)", "--n", "2")
    assert status == 0
    r = report["result"]
    assert set(r) == {"pumping", "no_decrement", "growth_lower"}
    assert r["no_decrement"]["oracle_count"] >= 4


def test_oracle_check_embeds_notes(capsys):
    status, report, _ = run_json(
        capsys, "oracle-check", "--sig", "P1", "--max-len", "3",
        "--formula", "(P1(x) & P1(y)) & (x < y & ~ex z. (x < z & z < y))")
    assert status == 0
    assert report["result"]["contract"]["ok"] is True
    assert report["result"]["canonical"]["ok"] is True
    assert len(report["notes"]) == 2  # elimination ran: indexing notes embed


def test_interp_reduce(tmp_path, capsys):
    path = tmp_path / "succ.interp"
    path.write_text(SUCC)
    status, report, _ = run_json(capsys, "interp-reduce", "--formula-file",
                                 str(path), "--dim", "1", "--max-len", "3")
    assert status == 0
    assert report["result"]["components"] == [
        {"name": "pairs.1", "source": "pairs", "index": 1,
         "dimension": 1, "bound": 1}]
    assert report["result"]["equivalence"]["ok"] is True


def test_interp_reduce_insufficient_dim(tmp_path, capsys):
    path = tmp_path / "wide.interp"
    path.write_text("signature P1\ncomponent pairs dim=2\nuniverse x < y\n")
    status, out, err = run(capsys, "interp-reduce", "--formula-file",
                           str(path), "--dim", "1")
    assert status == 2
    assert "pairs" in err


def test_exit_codes(capsys):
    status, _, err = run(capsys, "mindim", "--sig", "P1", "--formula", "x <")
    assert status == 2 and "position" in err
    status, _, err = run(capsys, "mindim", "--sig", "P1", "--formula", "x<y",
                         "--budget-states", "4")
    assert status == 3 and "budget" in err
    status, _, err = run(capsys, "mindim", "--formula", "x<y")
    assert status == 2
    status, _, err = run(capsys, "mindim", "--sig", "P1", "--formula", "x<y",
                         "--budget-monoid", "0")
    assert status == 2


def test_human_format_mirrors_json(capsys):
    status, out, _ = run(capsys, "mindim", "--sig", "P1", "--formula", "P1(x)")
    assert status == 0
    assert "dimension: 1" in out
    assert "version: " in out


def test_selftest_deterministic(capsys):
    status1, out1, _ = run(capsys, "selftest", "--format", "json")
    status2, out2, _ = run(capsys, "selftest", "--format", "json")
    assert status1 == status2 == 0
    assert out1 == out2
    report = json.loads(out1)
    assert report["result"]["ok"] is True
    names = [c["name"] for c in report["result"]["checks"]]
    assert "compiler-vs-oracle" in names and "dimension-battery" in names
