import csv
import io
import json
import math
import subprocess
import sys

import pytest

from conclusive_teleport.cli import ENUMERATE_COLUMNS, MC_COLUMNS, SWEEP_COLUMNS, main


def invoke(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_run_ghz_always_succeeds(capsys):
    for seed in range(10):
        code, out, _ = invoke(capsys, "run", "--scheme", "2", "--alpha-sq", "0.5", "--a", "0.6", "--b", "0.8", "--seed", str(seed))
        assert code == 0
        rec = json.loads(out)
        assert rec["success"] is True
        assert rec["fidelity"] >= 1 - 1e-12
        assert rec["classical_bits"] == 4
        assert len(rec["bob_state"]) == 4


def test_run_product_channel_always_fails(capsys):
    for seed in range(10):
        code, out, _ = invoke(capsys, "run", "--scheme", "1", "--alpha-sq", "1.0", "--seed", str(seed))
        rec = json.loads(out)
        assert code == 0 and rec["success"] is False and rec["fidelity"] is None
        assert rec["classical_bits"] == 3


def test_run_rejects_beta_greater_than_alpha(capsys):
    code, out, err = invoke(capsys, "run", "--scheme", "1", "--alpha-sq", "0.3")
    assert code == 2 and out == ""
    assert "beta > alpha" in err


def test_run_rejects_unnormalized_input(capsys):
    code, _, err = invoke(capsys, "run", "--scheme", "1", "--alpha-sq", "0.8", "--a", "1", "--b", "1")
    assert code == 2 and "|a|^2 + |b|^2" in err


def test_run_csv(capsys):
    code, out, _ = invoke(capsys, "run", "--scheme", "1", "--alpha-sq", "0.8", "--seed", "3", "--format", "csv")
    assert code == 0
    (rec,) = rows(out)
    assert rec["classical_bits"] == "3"
    assert rec["success"] in ("true", "false")


def test_enumerate_scheme1_csv(capsys):
    code, out, _ = invoke(capsys, "enumerate", "--scheme", "1", "--alpha-sq", "0.8", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0].split(",") == ENUMERATE_COLUMNS
    data = rows(out)
    assert len(data) == 8
    assert abs(math.fsum(float(r["probability"]) for r in data) - 1) < 1e-9
    assert all(r["classical_bits"] == "3" and r["ancilla_outcome"] == "" for r in data)


def test_enumerate_scheme2_failure_rows(capsys):
    code, out, _ = invoke(
        capsys, "enumerate", "--scheme", "2", "--alpha-sq", "0.7",
        "--a-re", "0.6", "--b-re", "0", "--b-im", "0.8", "--format", "csv",
    )
    assert code == 0
    data = rows(out)
    assert len(data) == 12
    failures = [r for r in data if r["success"] == "false"]
    assert len(failures) == 4
    assert all(r["ancilla_outcome"] == "1" and r["classical_bits"] == "3" and r["fidelity"] == "" for r in failures)
    assert all(r["classical_bits"] == "4" for r in data if r["success"] == "true")
    success = math.fsum(float(r["probability"]) for r in data if r["success"] == "true")
    assert abs(success - 0.6) < 1e-12


def test_enumerate_json_matches_csv(capsys):
    args = ["enumerate", "--scheme", "2", "--alpha-sq", "0.65", "--a-re", "0.28", "--a-im", "0.96", "--b-re", "0"]
    _, out_json, _ = invoke(capsys, *args, "--format", "json")
    _, out_csv, _ = invoke(capsys, *args, "--format", "csv")
    doc = json.loads(out_json)
    assert doc["max_abs_deviation"] < 1e-12
    for leaf, row in zip(doc["leaves"], rows(out_csv)):
        assert set(leaf) == set(ENUMERATE_COLUMNS)
        assert float(row["probability"]) == leaf["probability"]
        if leaf["fidelity"] is not None:
            assert float(row["fidelity"]) == leaf["fidelity"]


def test_sweep_default_grid(capsys):
    code, out, _ = invoke(capsys, "sweep", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0].split(",") == SWEEP_COLUMNS
    data = rows(out)
    assert len(data) == 11
    row = next(r for r in data if abs(float(r["alpha_sq"]) - 0.8) < 1e-12)
    assert float(row["scheme1_prob"]) == pytest.approx(0.32, abs=1e-12)
    assert float(row["scheme2_prob"]) == pytest.approx(0.40, abs=1e-12)
    assert float(row["ratio"]) == pytest.approx(0.80, abs=1e-12)


def test_sweep_json_matches_csv(capsys):
    _, out_json, _ = invoke(capsys, "sweep", "--format", "json")
    _, out_csv, _ = invoke(capsys, "sweep", "--format", "csv")
    for obj, row in zip(json.loads(out_json)["rows"], rows(out_csv)):
        assert {k: float(v) for k, v in row.items()} == obj


@pytest.mark.parametrize("bad", [["--grid-step", "0"], ["--grid-start", "0.4"], ["--grid-start", "0.9", "--grid-end", "0.6"]])
def test_sweep_bad_grid(capsys, bad):
    code, _, _ = invoke(capsys, "sweep", *bad)
    assert code == 2


def test_mc_deterministic_and_consistent(capsys):
    args = ["mc", "--scheme", "1", "--alpha-sq", "0.8", "--trials", "100000", "--seed", "11", "--format", "csv"]
    code, out1, _ = invoke(capsys, *args)
    _, out2, _ = invoke(capsys, *args)
    assert code == 0 and out1 == out2
    assert out1.splitlines()[0].split(",") == MC_COLUMNS
    (rec,) = rows(out1)
    assert abs(float(rec["z_score"])) < 5
    assert float(rec["closed_form"]) == pytest.approx(0.32, abs=1e-12)


def test_mc_json_fields(capsys):
    _, out, _ = invoke(capsys, "mc", "--scheme", "2", "--alpha-sq", "0.5", "--trials", "200", "--seed", "1")
    rec = json.loads(out)
    assert set(rec) == set(MC_COLUMNS)
    assert rec["successes"] == 200 and rec["z_score"] == 0.0


def test_mc_zero_trials(capsys):
    code, _, _ = invoke(capsys, "mc", "--scheme", "1", "--alpha-sq", "0.8", "--trials", "0")
    assert code == 2


def test_output_file(tmp_path, capsys):
    path = tmp_path / "leaves.json"
    code, out, _ = invoke(capsys, "enumerate", "--scheme", "1", "--alpha-sq", "0.9", "--output", str(path))
    assert code == 0 and out == ""
    text = path.read_text(encoding="utf-8")
    assert text.endswith("\n")
    assert len(json.loads(text)["leaves"]) == 8


def test_bad_output_path(capsys, tmp_path):
    code, _, _ = invoke(capsys, "sweep", "--output", str(tmp_path / "missing" / "x.csv"))
    assert code == 2


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["run", "--scheme", "3", "--alpha-sq", "0.8"], ["run", "--alpha-sq", "x", "--scheme", "1"]])
def test_usage_errors(capsys, argv):
    assert main(argv) == 2


def test_internal_error_exit_code(capsys, monkeypatch):
    from conclusive_teleport import cli
    from conclusive_teleport.state import EntangledCutError

    def broken(*_a, **_k):
        raise EntangledCutError("rank check failed")

    monkeypatch.setattr(cli, "report", broken)
    code, _, err = invoke(capsys, "enumerate", "--scheme", "1", "--alpha-sq", "0.8")
    assert code == 1 and "internal error" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "conclusive_teleport", "run", "--scheme", "1", "--alpha-sq", "0.3"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    proc = subprocess.run(
        [sys.executable, "-m", "conclusive_teleport", "sweep", "--format", "csv"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and len(proc.stdout.splitlines()) == 12
