import csv
import json

import pytest

from navierpoly.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dims_table(capsys):
    code, out, _ = run(["dims", "--n", "3", "--kmax", "4", "--oracle"], capsys)
    assert code == 0
    doc = json.loads(out)
    row = doc["rows"][2]
    assert (row["k"], row["dim_H"], row["dim_solutions"], row["K1"], row["K2"], row["K3"]) == (2, 5, 15, 7, 5, 3)
    assert all(r["oracle_dim"] == r["dim_solutions"] for r in doc["rows"])


def test_basis_k2minus(capsys):
    code, out, _ = run(["basis", "--n", "4", "--k", "1", "--family", "k2minus"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["manifest"]["count"] == 3 and doc["manifest"]["verified"] is True
    assert all(v["verified"] for v in doc["vectors"])


def test_basis_output_is_byte_stable(capsys):
    argv = ["basis", "--n", "3", "--k", "2", "--family", "all", "--iota1", "2", "--iota2", "1"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert first == second
    assert "." not in "".join(t["coef"] for v in json.loads(first)["vectors"]
                              for c in v["value"]["components"] for t in c["terms"])


@pytest.mark.parametrize("family", ["scalar-harmonic", "k1", "k2", "k3", "uniform", "lame", "k2plus"])
def test_basis_round_trip_through_verify(family, tmp_path, capsys):
    n = 4 if family == "k2plus" else 3
    path = tmp_path / "basis.json"
    code, _, _ = run(["basis", "--n", str(n), "--k", "2", "--family", family, "--b", "3/7",
                      "--out", str(path)], capsys)
    assert code == 0
    code, out, _ = run(["verify", "--in", str(path)], capsys)
    assert code == 0 and json.loads(out)["ok"] is True


def _corrupt(path, index, term):
    doc = json.loads(path.read_text())
    doc["vectors"][index]["value"]["components"][0]["terms"].append(term)
    path.write_text(json.dumps(doc))


def test_verify_flags_corrupted_vector(tmp_path, capsys):
    path = tmp_path / "k3.json"
    run(["basis", "--n", "3", "--k", "2", "--family", "k3", "--iota1", "1", "--iota2", "0",
         "--out", str(path)], capsys)
    _corrupt(path, 1, {"exp": [1, 1, 0], "coef": "5"})
    code, out, _ = run(["verify", "--in", str(path), "--iota1", "1", "--iota2", "0"], capsys)
    doc = json.loads(out)
    assert code == 1 and doc["ok"] is False
    bad = [r for r in doc["results"] if not r["ok"]]
    assert [r["index"] for r in bad] == [1]
    assert bad[0]["residual"]["components"][1]["terms"]


def test_verify_flags_linear_corruption_through_family_checks(tmp_path, capsys):
    # degree-1 fields solve the PDE; the K2 membership test still catches them
    path = tmp_path / "k2.json"
    run(["basis", "--n", "4", "--k", "1", "--family", "k2minus", "--out", str(path)], capsys)
    _corrupt(path, 0, {"exp": [1, 0, 0, 0], "coef": "1"})
    code, out, _ = run(["verify", "--in", str(path)], capsys)
    assert code == 1
    assert "family_checks" in json.loads(out)["results"][0]


def test_invalid_lame_constants_is_usage_error(capsys):
    code, _, err = run(["basis", "--n", "3", "--k", "1", "--family", "k1", "--iota1", "0", "--iota2", "1"], capsys)
    assert code == 2 and "iota1 > 0" in err
    code, _, err = run(["dims", "--n", "3", "--kmax", "1", "--iota1", "1", "--iota2", "-2"], capsys)
    assert code == 2 and "2*iota1 + iota2 > 0" in err


def test_usage_errors(capsys):
    assert run(["nonsense"], capsys)[0] == 2
    assert run(["basis", "--n", "3", "--k", "1", "--family", "k2plus"], capsys)[0] == 2
    assert run(["basis", "--n", "3", "--k", "1", "--family", "k1", "--b", "0.5"], capsys)[0] == 2
    assert run(["verify", "--in", "/nonexistent.json"], capsys)[0] == 2


def test_closed_form_k2_source_reports_discrepancies(capsys):
    code, out, _ = run(["basis", "--n", "4", "--k", "3", "--family", "k2", "--k2-source", "closed-form"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["manifest"]["k2_source"] == "oracle"
    assert doc["manifest"]["k2_discrepancies"]
    assert doc["manifest"]["count"] == 30


def test_emit_latex(capsys):
    _, out, _ = run(["basis", "--n", "3", "--k", "1", "--family", "k3", "--emit-latex"], capsys)
    assert json.loads(out)["vectors"][0]["latex"].startswith(r"\begin{pmatrix}")


def test_oracle_and_decompose(tmp_path, capsys):
    path = tmp_path / "oracle.json"
    code, _, _ = run(["oracle", "--n", "3", "--k", "2", "--b", "2", "--out", str(path)], capsys)
    assert code == 0
    assert json.loads(path.read_text())["manifest"]["count"] == 15
    code, out, _ = run(["decompose", "--in", str(path), "--index", "3", "--b", "2"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["ok"]
    assert doc["coordinates"]


def test_decompose_rejects_non_solution(tmp_path, capsys):
    path = tmp_path / "v.json"
    path.write_text(json.dumps({"components": [
        {"varcount": 3, "terms": [{"exp": [2, 0, 0], "coef": "1"}]},
        {"varcount": 3, "terms": []}, {"varcount": 3, "terms": []}]}))
    code, out, _ = run(["decompose", "--in", str(path)], capsys)
    assert code == 1 and json.loads(out)["ok"] is False


def test_solve_navier_and_lame(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "halfwidths": [1, 1], "iota1": "1", "iota2": "1",
                               "g0_modes": [{"kvec": [1, 1], "cos_amp": [1, 1, 1], "sin_amp": [0, 0, 0]}],
                               "g1_modes": []}))
    pts = tmp_path / "pts.json"
    pts.write_text(json.dumps([[0.0, 0.1, 0.2], [0.3, -0.2, 0.5]]))
    csv_path = tmp_path / "res.csv"
    code, out, _ = run(["solve-navier", "--config", str(cfg), "--points", str(pts), "--residual-csv",
                        str(csv_path)], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["converged"]
    assert doc["max_residual"] < 1e-6
    rows = list(csv.reader(csv_path.open()))
    assert rows[0][-1] == "residual" and len(rows) == 3

    lcfg = tmp_path / "lame.json"
    lcfg.write_text(json.dumps({"n": 2, "halfwidths": [1, 1], "b": "2",
                                "h0_modes": [{"kvec": [1, 1], "cos_amp": [1, -1], "sin_amp": [0, 0]}]}))
    lpts = tmp_path / "lpts.json"
    lpts.write_text(json.dumps({"points": [[0.5, 0.2, 0.3]]}))
    code, out, _ = run(["solve-lame", "--config", str(lcfg), "--points", str(lpts)], capsys)
    doc = json.loads(out)
    assert code == 0
    # omega = 2 pi at b = 2, so cos(omega/2) = -1 and cos(theta) = -1
    assert doc["points"][0]["value"] == pytest.approx([1.0, -1.0], abs=1e-10)


def test_solve_rejects_bad_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"halfwidths": [1, 1], "iota1": "-1", "iota2": "1"}))
    pts = tmp_path / "pts.json"
    pts.write_text("[]")
    assert run(["solve-navier", "--config", str(cfg), "--points", str(pts)], capsys)[0] == 2
