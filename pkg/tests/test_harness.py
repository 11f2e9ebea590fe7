import json
import math

import numpy as np
import pytest

from percolate import cli, harness
from percolate.harness import (
    Check, StudySpec, VerifyReport, crossing_records, fmt, run_arms, run_crossing, run_dtail, run_pt2pt,
    run_radial, run_sample, run_shortcut, to_csv, verify_suite,
)
from percolate.oracles import n1_exact


def test_fmt():
    assert fmt(3) == "3" and fmt(np.int64(-2)) == "-2" and fmt(True) == "1"
    assert fmt(1 / 3) == "0.3333333333" and fmt(2.0) == "2" and fmt(123456789.123) == "123456789.1"
    assert fmt(float("nan")) == "nan" and fmt("ooc") == "ooc"


def test_csv_layout():
    text = to_csv(["a", "b"], [[1, 0.5], [2, 1e-12]])
    assert text == "a,b\n1,0.5\n2,1e-12\n"


def test_spec_validation():
    with pytest.raises(ValueError):
        StudySpec("radial", n=8, trials=0)
    with pytest.raises(ValueError):
        StudySpec("radial", n=5000)
    assert StudySpec("crossing", n=8, trials=None).to_dict()["trials"] is None


def test_radial_p_one():
    res = run_radial(6, 500, 1, p=1.0, pi_trials=100)
    assert res.summary["S"]["value"] == 6 and res.summary["acceptance"] == 1.0


def test_radial_n1_matches_enumeration():
    res = run_radial(1, 50000, 2, pi_trials=1000)
    s = res.summary["S"]
    assert abs(s["value"] - n1_exact()["E_SB_given_A"]) <= 3 * s["stderr"] + 1e-12


def test_crossing_n1_matches_enumeration():
    res = run_crossing(1, 50000, 3)
    s = res.summary["S"]
    assert abs(s["value"] - n1_exact()["E_S_given_H"]) <= 3 * s["stderr"]
    assert abs(res.summary["acceptance"] - n1_exact()["P_H"]) <= 3 * math.sqrt(0.25 / 50000)


def test_crossing_errors():
    with pytest.raises(RuntimeError):
        run_crossing(4, 100, 1, p=0.0)
    with pytest.raises(ValueError):
        run_crossing(8, 100, 1, eps=1.5)
    with pytest.raises(RuntimeError):
        run_radial(4, 100, 1, p=0.0)


def test_accepted_mode_stops_exactly():
    recs = crossing_records(16, 4, accepted=37)
    assert len(recs) == 37
    full = crossing_records(16, 4, trials=recs[-1].trial + 1)
    assert full == recs


def test_records_satisfy_length_order():
    for r in crossing_records(24, 5, trials=300, eps=1.0):
        assert r.S <= r.sigma <= r.L


def test_shortcut_table():
    res = run_shortcut(16, 1.0, 200, 3)
    assert res.columns == ["trial", "Sn", "Ln", "sigma_len", "num_detours", "detoured_edges"]
    assert all(r[1] <= r[3] <= r[2] for r in res.rows)


def test_dtail_partition():
    res = run_dtail(3, 20000, 7, pi_trials=2000)
    total = sum(row[2] for row in res.rows)
    cens = res.summary["censored"]
    assert total / 20000 + cens == pytest.approx(1.0)
    assert [row[0] for row in res.rows] == [1, 2, 3]
    with pytest.raises(ValueError):
        run_dtail(9, 10, 1)


def test_pt2pt_tail():
    res = run_pt2pt(1, 2, 20000, 8, pi_trials=5000)
    tail = [r[4] for r in res.rows if r[0] == "tail"]
    kal = [r[4] for r in res.rows if r[0] == "K_at_least"]
    assert all(a >= b for a, b in zip(tail, tail[1:]))
    assert all(a >= b for a, b in zip(kal, kal[1:])) and kal[0] == 1.0
    assert res.summary["accepted"] >= 10**4
    assert res.summary["tail"]["16.0"] < res.summary["tail"]["1.0"]
    with pytest.raises(ValueError):
        run_pt2pt(0, 2, 10, 1)


def test_arms_and_sample_tables():
    res = run_arms("ooc", 0, 6, 3000, 1)
    assert res.rows[0][:4] == ["ooc", 0, 6, 3000]
    half = run_arms("ooc", 0, 6, 3000, 1, half=True)
    assert half.rows[0][5] <= res.rows[0][5]
    s = run_sample(2, 5)
    assert len(s.rows) == 40 and s.columns[-1] == "open"


@pytest.mark.parametrize("threads", [2, 3])
def test_thread_count_does_not_change_results(threads):
    a = run_crossing(12, 9000, 1, eps=1.0)
    b = run_crossing(12, 9000, 1, eps=1.0, threads=threads)
    assert a.to_csv() == b.to_csv()
    c = run_dtail(3, 9000, 2, pi_trials=5000)
    d = run_dtail(3, 9000, 2, pi_trials=5000, threads=threads)
    assert c.to_csv() == d.to_csv()


def test_verify_fast():
    rep = verify_suite("fast")
    assert rep.passed and all(c.total > 0 for c in rep.checks)
    with pytest.raises(ValueError):
        verify_suite("slow")


def test_cli_json(capsys):
    assert cli.main(["radial", "--n", "4", "--trials", "500", "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) == {"spec", "result", "version", "elapsed_s"}
    assert out["spec"]["study"] == "radial" and out["result"]["table"][0]["n"] == 4


def test_cli_out_file(tmp_path):
    path = tmp_path / "t.csv"
    assert cli.main(["arms", "--spec", "oc", "--outer", "3", "--trials", "100", "--out", str(path)]) == 0
    assert path.read_text().splitlines()[0] == "spec,inner,outer,trials,hits,phat,stderr,seed"


def test_cli_verify_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(harness, "verify_suite", lambda level, seed: VerifyReport(level, (Check("x", 0, 1),)))
    assert cli.main(["verify"]) == 2


def test_cli_emit_geometry(capsys):
    assert cli.main(["verify", "--n", "3", "--seed", "2", "--emit-geometry"]) == 0
    last = capsys.readouterr().out.strip().splitlines()[-1]
    assert json.loads(last)["n"] == 3
