"""Command-line contracts: schemas, determinism, validation, exit codes."""

import json
import os

import numpy as np
import pytest

from arr2 import io
from arr2.cli import main


def run(args):
    return main([str(a) for a in args])


def read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "ds.csv"
    code = run(["simulate", "--dgp", "minnesota", "--t", "120", "--seed", "1", "--out", path])
    assert code == 0
    return path


def test_simulate_writes_rows_and_truth_sidecar(tmp_path, dataset):
    comments, columns, rows = io.read_csv(dataset)
    assert columns == ["t", "y"]
    assert len(rows) == 120
    assert any(c.startswith("config_hash=") for c in comments)
    truth = json.loads(read_bytes(tmp_path / "ds.truth.json"))
    assert len(truth["phi"]) == 8
    assert truth["phi"][0] == pytest.approx(0.6)


def test_simulate_is_byte_deterministic(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run(["simulate", "--dgp", "oscillation", "--t", "60", "--seed", "9", "--out", a]) == 0
    assert run(["simulate", "--dgp", "oscillation", "--t", "60", "--seed", "9", "--out", b]) == 0
    assert read_bytes(a) == read_bytes(b)


def test_simulate_arx_schema(tmp_path):
    path = tmp_path / "arx.csv"
    assert run(["simulate", "--dgp", "arx", "--m", "20", "--rho", "0.5", "--t", "50",
                "--seed", "3", "--out", path]) == 0
    _, columns, rows = io.read_csv(path)
    assert columns[:2] == ["t", "y"]
    assert len(columns) == 22  # t, y, x1..x20
    assert len(rows) == 50


def test_simulate_ltx_truth_includes_states(tmp_path):
    path = tmp_path / "ltx.csv"
    assert run(["simulate", "--dgp", "ltx", "--state-scale", "0.1", "--t", "40",
                "--m-base", "3", "--lags", "2", "--seed", "4", "--out", path]) == 0
    truth = json.loads(read_bytes(tmp_path / "ltx.truth.json"))
    assert truth["sigma_delta"] == pytest.approx(0.1)
    assert len(truth["delta"]) == 41
    _, columns, _ = io.read_csv(path)
    assert len(columns) == 2 + 6  # three base covariates at two lags


def test_simulate_rerun_from_sidecar_reproduces(tmp_path):
    first = tmp_path / "x.csv"
    assert run(["simulate", "--dgp", "delayed", "--t", "30", "--seed", "11", "--out", first]) == 0
    again = tmp_path / "y.csv"
    assert run(["simulate", "--config", tmp_path / "x.resolved.cfg", "--out", again]) == 0
    assert read_bytes(first) == read_bytes(again)


def test_fit_draws_schema_and_determinism(tmp_path, dataset):
    out1 = tmp_path / "fit1"
    out2 = tmp_path / "fit2"
    args = ["fit", "--data", dataset, "--family", "ar", "--p", "2", "--prior", "arr2-flat",
            "--chains", "2", "--warmup", "150", "--samples", "100", "--seed", "7",
            "--allow-nonconverged"]
    assert run(args + ["--out", out1]) == 0
    assert run(args + ["--out", out2]) == 0
    _, columns, rows = io.read_csv(out1 / "draws.csv")
    assert columns == ["chain", "iteration", "divergent", "energy",
                       "phi.1", "phi.2", "psi.1", "psi.2", "r2", "sigma"]
    assert len(rows) == 200
    assert read_bytes(out1 / "draws.csv") == read_bytes(out2 / "draws.csv")
    diag = json.loads(read_bytes(out1 / "diagnostics.json"))
    assert "max_rhat" in diag and "bayes_r2" in diag


def test_fit_gap_in_time_index_exits_2(tmp_path):
    path = tmp_path / "gap.csv"
    with open(path, "w") as fh:
        fh.write("t,y\n1,0.1\n2,0.2\n4,0.3\n")
    code = run(["fit", "--data", path, "--family", "ar", "--p", "1"])
    assert code == 2


def test_fit_bad_header_exits_2(tmp_path):
    path = tmp_path / "bad.csv"
    with open(path, "w") as fh:
        fh.write("time,y\n1,0.1\n")
    assert run(["fit", "--data", path, "--family", "ar", "--p", "1"]) == 2


def test_fit_unknown_prior_exits_2(tmp_path, dataset):
    assert run(["fit", "--data", dataset, "--prior", "bogus"]) == 2


def test_fit_draws_roundtrip_losslessly(tmp_path, dataset):
    out = tmp_path / "fit"
    assert run(["fit", "--data", dataset, "--family", "ar", "--p", "1",
                "--prior", "gaussian", "--chains", "2", "--warmup", "100",
                "--samples", "50", "--seed", "3", "--allow-nonconverged",
                "--out", out]) == 0
    draws = io.read_draws(out / "draws.csv")
    tmp2 = out / "again.csv"
    io.write_draws(tmp2, draws)
    a = read_bytes(out / "draws.csv").split(b"\n")
    b = read_bytes(tmp2).split(b"\n")
    assert a[2:] == b  # same header and rows (original has two comment lines)


def test_diagnose_reports_rhat(tmp_path, dataset, capsys):
    out = tmp_path / "fit"
    assert run(["fit", "--data", dataset, "--family", "ar", "--p", "1",
                "--prior", "gaussian", "--chains", "2", "--warmup", "100",
                "--samples", "80", "--seed", "3", "--allow-nonconverged",
                "--out", out]) == 0
    capsys.readouterr()
    assert run(["diagnose", "--draws", out / "draws.csv"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert "phi.1" in report["rhat"]
    assert report["max_rhat"] > 0.9


def test_experiment_counting_contract_and_determinism(tmp_path):
    out1 = tmp_path / "exp1"
    out2 = tmp_path / "exp2"
    args = [
        "experiment", "--family", "ar", "--dgps", "minnesota", "--p-grid", "9,30",
        "--reps", "5", "--priors", "arr2-minnesota,gaussian", "--lfo", "none",
        "--chains", "1", "--warmup", "60", "--samples", "40", "--seed", "21", "--jobs", "2",
    ]
    assert run(args + ["--out", out1]) == 0
    _, columns, rows = io.read_csv(out1 / "results.csv")
    assert len(rows) == 20  # 2 lag orders x 2 priors x 5 replications
    for needed in ("dgp", "p", "prior", "rep", "rmse_phi", "mlpd"):
        assert needed in columns
    assert run(args + ["--out", out2]) == 0
    assert read_bytes(out1 / "results.csv") == read_bytes(out2 / "results.csv")
    assert (out1 / "summary.csv").exists()


def test_experiment_rejects_unknown_prior(tmp_path):
    assert run(["experiment", "--family", "ar", "--priors", "nope", "--out", tmp_path / "x"]) == 2


def test_prior_check_outputs(tmp_path):
    out = tmp_path / "pc"
    assert run(["prior-check", "--family", "ar", "--p", "12", "--prior", "arr2-flat",
                "--draws", "4000", "--seed", "5", "--out", out]) == 0
    _, columns, rows = io.read_csv(out / "prior_r2_draws.csv")
    assert columns == ["draw", "r2", "stationary", "max_inverse_root_modulus"]
    assert len(rows) == 4000
    _, ccol, crows = io.read_csv(out / "prior_contributions.csv")
    assert len(crows) == 12
    means = np.array([float(r[1]) for r in crows])
    ses = np.array([float(r[2]) for r in crows])
    grand = means.mean()
    assert np.all(np.abs(means - grand) <= 2 * 2 * ses + 1e-12)


def test_prior_check_gaussian_concentrates_near_one(tmp_path):
    out = tmp_path / "pcg"
    assert run(["prior-check", "--family", "ar", "--p", "12", "--prior", "gaussian",
                "--draws", "2000", "--seed", "6", "--out", out]) == 0
    _, _, rows = io.read_csv(out / "prior_r2_draws.csv")
    r2 = np.array([float(r[1]) for r in rows])
    assert np.mean(r2 > 0.9) > 0.9


def test_fit_nonconverged_gate_exits_1(tmp_path, dataset):
    out = tmp_path / "short"
    code = run(["fit", "--data", dataset, "--family", "ar", "--p", "3",
                "--prior", "arr2-flat", "--chains", "2", "--warmup", "25",
                "--samples", "25", "--seed", "1", "--out", out])
    assert code == 1  # max split R-hat above the gate without the override
    assert (out / "draws.csv").exists()  # outputs are still written


def test_fit_gap_message_cites_row(tmp_path, capsys):
    path = tmp_path / "gap.csv"
    with open(path, "w") as fh:
        fh.write("t,y\n1,0.1\n2,0.2\n4,0.3\n")
    assert run(["fit", "--data", path, "--family", "ar", "--p", "1"]) == 2
    err = capsys.readouterr().err
    assert "row 4" in err


def test_diagnose_out_file(tmp_path, dataset):
    out = tmp_path / "fit"
    assert run(["fit", "--data", dataset, "--family", "ar", "--p", "1",
                "--prior", "gaussian", "--chains", "2", "--warmup", "100",
                "--samples", "60", "--seed", "3", "--allow-nonconverged",
                "--out", out]) == 0
    report = tmp_path / "diag.json"
    assert run(["diagnose", "--draws", out / "draws.csv", "--out", report]) == 0
    assert json.loads(read_bytes(report))["divergences"] >= 0


def test_experiment_arx_grid(tmp_path):
    out = tmp_path / "arx"
    assert run([
        "experiment", "--family", "arx", "--m-grid", "5", "--rho-grid", "0.0",
        "--reps", "1", "--priors", "arr2-flat", "--lfo", "none", "--t", "60",
        "--config", _write_cfg(tmp_path, {"experiment": {"p_fit": "2"}}),
        "--chains", "1", "--warmup", "50", "--samples", "40", "--seed", "2",
        "--out", out,
    ]) == 0
    _, columns, rows = io.read_csv(out / "results.csv")
    assert len(rows) == 1
    row = dict(zip(columns, rows[0]))
    assert row["rmse_beta"] != ""
    assert row["rmse_phi"] != ""


def _write_cfg(tmp_path, sections):
    path = tmp_path / "partial.cfg"
    with open(path, "w") as fh:
        for name, kv in sections.items():
            fh.write(f"[{name}]\n")
            for k, v in kv.items():
                fh.write(f"{k} = {v}\n")
    return path


def test_experiment_jobs_default_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("ARR2_JOBS", "2")
    out = tmp_path / "envjobs"
    assert run([
        "experiment", "--family", "ar", "--dgps", "minnesota", "--p-grid", "2",
        "--reps", "2", "--priors", "gaussian", "--lfo", "none", "--t", "40",
        "--chains", "1", "--warmup", "40", "--samples", "30", "--seed", "13",
        "--out", out,
    ]) == 0
    _, _, rows = io.read_csv(out / "results.csv")
    assert len(rows) == 2
