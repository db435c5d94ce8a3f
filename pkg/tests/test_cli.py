import csv
import hashlib
import json

import numpy as np
import pytest

from monorat.cli import main, sample_rows, table_rows
from monorat.io import dumps_function
from monorat.ratcore import LinearPlusBumps, RationalFn


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def identity_file(tmp_path):
    p = tmp_path / "id.json"
    p.write_text(dumps_function(LinearPlusBumps(1.0)))
    return p


def test_construct_n1(capsys, tmp_path):
    out_path = tmp_path / "f1.json"
    code, out, _ = run(capsys, "construct", "--n", "1", "--out", str(out_path))
    assert code == 0 and "ratio=1.0 " in out
    doc = json.loads(out_path.read_text())
    assert doc == {"form": "linear-plus-bumps", "slope": 1.0, "bumps": [], "declared_degree": 1}
    assert (tmp_path / "f1.report.json").exists() and (tmp_path / "f1.stages.csv").exists()


def test_construct_n3_fraction(capsys):
    code, out, _ = run(capsys, "construct", "--n", "3", "--rho", "0.01")
    frac = float(out.split("ratio_fraction=")[1].split()[0])
    assert code == 0 and frac >= 0.9


def test_construct_usage_errors(capsys):
    code, _, err = run(capsys, "construct", "--n", "0")
    assert code == 1 and "usage" in err
    assert run(capsys, "construct")[0] == 1
    assert run(capsys, "construct", "--n", "2", "--rho", "0.7")[0] == 1
    assert run(capsys, "bogus")[0] == 1


def test_construct_deterministic(capsys, tmp_path):
    digests = []
    for k in range(2):
        p = tmp_path / f"run{k}" / "f.json"
        p.parent.mkdir()
        run(capsys, "construct", "--n", "4", "--out", str(p))
        digests.append([hashlib.sha256((p.parent / name).read_bytes()).hexdigest()
                        for name in ("f.json", "f.report.json", "f.stages.csv")])
    assert digests[0] == digests[1]


def test_verify_identity(capsys, identity_file):
    code, out, _ = run(capsys, "verify", "--input", str(identity_file))
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "PASS"
    assert doc["theorem1"]["verdict"] == "PASS" and doc["corollary1"]["verdict"] == "PASS"


def test_verify_counterexample_not_monotone(capsys, tmp_path):
    d = 0.01
    p = tmp_path / "bad.json"
    p.write_text(dumps_function(RationalFn((0.0, d), (d * d, 0.0, 1.0))))
    code, out, _ = run(capsys, "verify", "--input", str(p))
    assert code == 5 and json.loads(out)["verdict"] == "NOT_MONOTONE"


def test_verify_constructed_n4(capsys, tmp_path):
    p = tmp_path / "f4.json"
    run(capsys, "construct", "--n", "4", "--out", str(p))
    code, out, _ = run(capsys, "verify", "--input", str(p), "--n", "4")
    t1 = json.loads(out)["theorem1"]
    assert code == 0 and t1["margin"] >= 4.5


def test_verify_malformed_json(capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"form": "rational",\n "numer": [0, 1,\n')
    code, _, err = run(capsys, "verify", "--input", str(p))
    assert code == 2 and "broken.json:" in err and "malformed JSON" in err


def test_verify_missing_file(capsys, tmp_path):
    assert run(capsys, "verify", "--input", str(tmp_path / "nope.json"))[0] == 2


def test_nodes_n1(capsys):
    code, out, err = run(capsys, "nodes", "--n", "1", "--delta", "0.1")
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and list(rows[0]) == ["i", "u_i", "v_i", "z_i", "residual_i"]
    assert float(rows[0]["u_i"]) == pytest.approx(0.26666666666666666, abs=1e-12)
    assert float(rows[0]["v_i"]) == 1.0
    assert "residual_inf=" in err


def test_nodes_n2_residual(capsys, tmp_path):
    p = tmp_path / "nodes.csv"
    code, out, _ = run(capsys, "nodes", "--n", "2", "--delta", "0.024691358", "--out", str(p))
    rows = list(csv.DictReader(p.read_text().splitlines()))
    assert code == 0 and len(rows) == 2
    assert max(abs(float(r["residual_i"])) for r in rows) <= 1e-10
    assert float(out.split("residual_inf=")[1]) <= 1e-10


def test_nodes_slope_too_small(capsys):
    assert run(capsys, "nodes", "--n", "1", "--delta", "0.5")[0] == 4


def test_table(capsys, tmp_path):
    p = tmp_path / "t.csv"
    code, out, _ = run(capsys, "table", "--max-n", "4", "--csv", str(p))
    assert code == 0 and p.read_text() == out
    rows = list(csv.DictReader(out.splitlines()))
    assert float(rows[0]["achieved"]) == 1.0 and float(rows[0]["upper"]) == 4.5
    achieved = [float(r["achieved"]) for r in rows]
    assert all(8.5 < b / a < 9 for a, b in zip(achieved, achieved[1:]))
    for r in rows:
        assert float(r["lower"]) * 0.8 <= float(r["achieved"]) <= float(r["upper"])


def test_table_rows_bounds():
    for n, achieved, lower, upper, frac in table_rows(3, 0.01):
        assert lower * (1 - 0.2) <= achieved <= upper


def test_sample_identity(capsys, identity_file):
    code, out, _ = run(capsys, "sample", "--input", str(identity_file), "--points", "5")
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and len(rows) == 5
    assert all(float(r["dR"]) == 1.0 for r in rows)


def test_sample_constructed_n2(capsys, tmp_path):
    p = tmp_path / "f2.json"
    run(capsys, "construct", "--n", "2", "--out", str(p))
    code, _, _ = run(capsys, "sample", "--input", str(p), "--points", "1001",
                     "--out", str(tmp_path / "s.csv"))
    rows = np.array([[float(v) for v in r.values()]
                     for r in csv.DictReader((tmp_path / "s.csv").read_text().splitlines())])
    assert code == 0
    mid = rows[np.argmin(np.abs(rows[:, 0]))]
    assert mid[0] == 0.0 and mid[2] == pytest.approx(8.84, abs=1e-12)
    assert np.all(rows[:, 3] >= rows[:, 2])


def test_sample_rows_envelope():
    rows = np.array(sample_rows(LinearPlusBumps(2.0, ((3.0, 0.2),)), 11))
    assert np.all(rows[:, 3] >= rows[:, 2])


def test_sample_bad_points(capsys, identity_file):
    assert run(capsys, "sample", "--input", str(identity_file), "--points", "1")[0] == 1


def test_log_env(capsys, monkeypatch, identity_file):
    monkeypatch.setenv("MONORAT_LOG", "debug")
    assert run(capsys, "verify", "--input", str(identity_file))[0] == 0
