import csv
import json
import os

import numpy as np
import pytest

from fockbench.cli import main


def run(args):
    return main(args)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def files(out, prefix, suffix):
    return sorted(p for p in os.listdir(out) if p.startswith(prefix) and p.endswith(suffix))


def test_verify_ccr_passes(tmp_path):
    out = str(tmp_path / "out")
    assert run(["verify", "ccr", "--out", out]) == 0
    reports = files(out, "verify_ccr", ".json")
    assert len(reports) == 6
    doc = json.load(open(os.path.join(out, reports[0])))
    assert doc["passed"] is True
    assert "config_hash" in doc


def test_verify_unknown_suite_usage_error(tmp_path):
    with pytest.raises(SystemExit) as err:
        run(["verify", "nosuch", "--out", str(tmp_path)])
    assert err.value.code == 2


def test_verify_drop_correction_fails(tmp_path, capsys):
    out = str(tmp_path / "out")
    assert run(["verify", "fundamental-2", "--drop-correction", "--out", out]) == 1
    captured = capsys.readouterr()
    assert "two-term-variant" in captured.err


def test_negative_seed_rejected(tmp_path):
    assert run(["verify", "ccr", "--seed", "-3", "--out", str(tmp_path)]) == 2


def test_bad_config_file(tmp_path):
    bad = tmp_path / "cfg.json"
    bad.write_text("{ not json")
    with pytest.raises(json.JSONDecodeError):
        json.load(open(bad))
    rc = run(["verify", "ccr", "--config", str(bad), "--out", str(tmp_path)])
    assert rc == 2


def test_cf_gauss_table(tmp_path):
    out = str(tmp_path / "out")
    assert run(["cf", "gauss", "--out", out]) == 0
    csv_files = files(out, "cf_gauss", ".csv")
    assert len(csv_files) == 1
    rows = read_csv(os.path.join(out, csv_files[0]))
    assert rows[0] == ["x", "re", "im", "provenance"]
    analytic = [r for r in rows[1:] if r[3] == "analytic"]
    # default scenario u has |u|^2 = 0.46
    for r in analytic:
        x = float(r[0])
        assert abs(float(r[1]) - np.exp(-0.5 * 0.46 * x * x)) < 1e-12
        assert abs(float(r[2])) < 1e-12
    zero_rows = [r for r in rows[1:] if float(r[0]) == 0.0]
    assert len(zero_rows) == 3  # every provenance has the x = 0 row at (1, 0)
    for r in zero_rows:
        assert abs(float(r[1]) - 1.0) < 1e-9 and abs(float(r[2])) < 1e-9
    assert files(out, "cf_gauss", ".png") and files(out, "cf_gauss", ".json")


def test_cf_type1_has_three_provenances(tmp_path):
    out = str(tmp_path / "out")
    assert run(["cf", "type1", "--out", out]) == 0
    doc = json.load(open(os.path.join(out, files(out, "cf_type1", ".json")[0])))
    assert {t["provenance"] for t in doc["tables"]} == {"analytic", "operator", "empirical"}


def test_cf_deterministic_across_runs(tmp_path):
    out1 = str(tmp_path / "a")
    out2 = str(tmp_path / "b")
    assert run(["cf", "type2", "--out", out1]) == 0
    assert run(["cf", "type2", "--out", out2]) == 0
    for suffix in (".csv", ".json"):
        f1 = files(out1, "cf_type2", suffix)[0]
        assert open(os.path.join(out1, f1), "rb").read() == \
            open(os.path.join(out2, f1), "rb").read()


def test_convergence_weyl_qsde(tmp_path):
    out = str(tmp_path / "out")
    assert run(["convergence", "weyl-qsde", "--out", out]) == 0
    doc = json.load(open(os.path.join(out, files(out, "convergence_weyl", ".json")[0])))
    assert abs(doc["slope_estimate"] - 1.0) <= 0.2
    counts = [row["n_slots"] for row in doc["rows"]]
    assert all(b == 2 * a for a, b in zip(counts, counts[1:]))
    assert all(row["err_exact_scheme"] < 1e-10 for row in doc["rows"])


def test_convergence_fundamental_2(tmp_path):
    out = str(tmp_path / "out")
    assert run(["convergence", "fundamental-2", "--out", out]) == 0
    name = files(out, "convergence_fundamental_2", ".csv")[0]
    rows = read_csv(os.path.join(out, name))
    assert rows[0] == ["n_slots", "dt_max", "err_three_term", "err_two_term"]
    three = [float(r[2]) for r in rows[1:]]
    two = [float(r[3]) for r in rows[1:]]
    assert three[-1] < three[0] / 8
    assert two[-1] > two[0] / 2  # stalls


def test_sample_type1_report_and_determinism(tmp_path):
    out1 = str(tmp_path / "a")
    out2 = str(tmp_path / "b")
    assert run(["sample", "type1", "--n", "20000", "--out", out1]) == 0
    assert run(["sample", "type1", "--n", "20000", "--out", out2]) == 0
    name = files(out1, "sample_type1", ".txt")[0]
    data1 = open(os.path.join(out1, name), "rb").read()
    data2 = open(os.path.join(out2, name), "rb").read()
    assert data1 == data2
    doc = json.load(open(os.path.join(out1, files(out1, "sample_type1", ".json")[0])))
    assert doc["passed"] is True
    assert doc["sup_distance"] <= doc["clt_bound"]
    samples = [float(line) for line in data1.decode().splitlines()]
    assert len(samples) == 20000


def test_sample_combined(tmp_path):
    out = str(tmp_path / "out")
    assert run(["sample", "combined", "--n", "20000", "--out", out]) == 0
    doc = json.load(open(os.path.join(out, files(out, "sample_combined", ".json")[0])))
    assert doc["passed"] is True


def test_sample_rejects_zero_draws(tmp_path):
    assert run(["sample", "type1", "--n", "0", "--out", str(tmp_path)]) == 2


def test_seed_override_changes_hash(tmp_path):
    out = str(tmp_path / "out")
    assert run(["sample", "type2", "--n", "5000", "--out", out]) == 0
    assert run(["sample", "type2", "--n", "5000", "--seed", "7", "--out", out]) == 0
    assert len(files(out, "sample_type2", ".json")) == 2


def test_malformed_scenario_is_config_error(tmp_path):
    cfg = tmp_path / "cfg.json"
    # 1x1 H with a complex diagonal entry is not Hermitian
    doc = {"d": 1, "scenarios": {"type1": {"psi": [[0.1, 0.0]], "H": [[[0.3, 0.1]]]}}}
    cfg.write_text(json.dumps(doc))
    assert run(["cf", "type1", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_config_file_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"x_grid": {"min": -1.0, "max": 1.0, "points": 5}}))
    out = str(tmp_path / "out")
    assert run(["cf", "gauss", "--config", str(cfg), "--out", out]) == 0
    rows = read_csv(os.path.join(out, files(out, "cf_gauss", ".csv")[0]))
    xs = sorted({float(r[0]) for r in rows[1:]})
    assert xs == [-1.0, -0.5, 0.0, 0.5, 1.0]
