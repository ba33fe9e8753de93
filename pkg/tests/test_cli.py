import json

import pandas as pd
import pytest
from click.testing import CliRunner

from app import cli
from config.config_loader import CONFIG_DIR
from src.services.storage_service import CONJECTURE_COLUMNS, StorageService
from tests.conftest import EXAMPLE1, SYMMETRIC3

EXAMPLES = CONFIG_DIR / "examples"


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, ["--quiet", *[str(a) for a in args]])


def read_json(path):
    with open(path) as f:
        return json.load(f)


# ---- analysis commands ----


def test_analyze_example(runner, matrix_files, tmp_path):
    out = tmp_path / "report.json"
    result = invoke(runner, "analyze", matrix_files["g1"], "--lh", "1.0", "--out", out)
    assert result.exit_code == 0, result.output
    report = read_json(out)
    assert report["command"] == "analyze"
    assert report["layers"][0]["nlevec"] == pytest.approx([0.3, 0.2, 0.5], abs=1e-9)
    assert report["layers"][0]["adsb"] == pytest.approx(0.0566, abs=5e-4)
    assert report["critical_c"] > 0.0


def test_analyze_repo_example_file(runner, tmp_path):
    out = tmp_path / "report.json"
    result = invoke(runner, "analyze", EXAMPLES / "example1.txt", "--out", out)
    assert result.exit_code == 0, result.output
    assert read_json(out)["layers"][0]["lambda2"] == pytest.approx(-1.1768, abs=5e-4)


def test_analyze_with_theta(runner, matrix_files, tmp_path):
    out = tmp_path / "report.json"
    result = invoke(
        runner, "analyze", matrix_files["g1"], "--theta", "0.0025,0.52,0.4775", "--out", out
    )
    assert result.exit_code == 0, result.output
    layer = read_json(out)["layers"][0]
    assert layer["admissible"] is False
    assert layer["lambda_theta"] == pytest.approx(0.004, abs=5e-4)


@pytest.mark.parametrize(
    "name, code",
    [("disconnected", 3), ("bad_row_sum", 2)],
)
def test_analyze_exit_codes(runner, matrix_files, name, code):
    result = invoke(runner, "analyze", matrix_files[name])
    assert result.exit_code == code
    assert "error:" in result.output


def test_analyze_missing_file(runner, tmp_path):
    result = invoke(runner, "analyze", tmp_path / "missing.txt")
    assert result.exit_code == 2


def test_analyze_bad_theta_text(runner, matrix_files):
    result = invoke(runner, "analyze", matrix_files["g1"], "--theta", "a,b,c")
    assert result.exit_code == 2


def test_combine_example2(runner, matrix_files, tmp_path):
    out = tmp_path / "combine.json"
    result = invoke(runner, "combine", matrix_files["g1"], matrix_files["g2"], "--out", out)
    assert result.exit_code == 0, result.output
    report = read_json(out)
    assert report["interval"] == {"kind": "mu", "lower": None, "upper": None}
    assert report["theta"] is None
    assert report["sum_nlevec"] == pytest.approx([9 / 28, 0.25, 3 / 7], abs=1e-12)
    assert "mu interval is empty" in result.output


def test_combine_needs_two_matrices(runner, matrix_files):
    assert invoke(runner, "combine", matrix_files["g1"]).exit_code == 2


def test_control_with_gains(runner, matrix_files, tmp_path):
    out = tmp_path / "control.json"
    result = invoke(
        runner, "control", matrix_files["g1"], "--gains", "1,0,0", "--lh", "1", "--out", out
    )
    assert result.exit_code == 0, result.output
    report = read_json(out)
    assert report["layers"][0]["gains"] == [1.0, 0.0, 0.0]
    assert report["layers"][0]["lambda_max"] < 0.0
    assert report["critical_c"] > 0.0


def test_control_scalar_gain_reused_for_layers(runner, matrix_files, tmp_path):
    out = tmp_path / "control.json"
    result = invoke(
        runner, "control", matrix_files["g1"], matrix_files["g2"], "--gains", "2", "--out", out
    )
    assert result.exit_code == 0, result.output
    report = read_json(out)
    assert [layer["gains"] for layer in report["layers"]] == [[2.0, 0.0, 0.0]] * 2
    assert report["interval"]["kind"] == "nu"


def test_control_requires_gains(runner, matrix_files):
    assert invoke(runner, "control", matrix_files["g1"]).exit_code == 2


def test_control_all_zero_gains(runner, matrix_files):
    assert invoke(runner, "control", matrix_files["g1"], "--gains", "0,0,0").exit_code == 2


def test_check_reports_every_layer(runner, matrix_files, tmp_path):
    out = tmp_path / "check.json"
    result = invoke(runner, "check", matrix_files["g1"], matrix_files["disconnected"], "--out", out)
    assert result.exit_code == 3
    layers = read_json(out)["layers"]
    assert layers[0]["valid"] is True
    assert layers[1]["valid"] is False
    assert layers[1]["error"].startswith("NotStronglyConnected")


def test_check_valid_layers(runner, matrix_files, tmp_path):
    out = tmp_path / "check.json"
    result = invoke(runner, "check", matrix_files["g1"], matrix_files["g2"], "--out", out)
    assert result.exit_code == 0, result.output
    report = read_json(out)
    assert report["reducible_to_single_weight"] is None
    assert report["sum_nlevec"] == pytest.approx([9 / 28, 0.25, 3 / 7], abs=1e-12)


# ---- simulation commands ----


def test_simulate_repo_linear_example(runner, tmp_path):
    prefix = tmp_path / "linear"
    result = invoke(runner, "simulate", EXAMPLES / "linear_decay.json", "--out", prefix)
    assert result.exit_code == 0, result.output

    frame = pd.read_csv(f"{prefix}.csv")
    # floor(t_end / (dt * record_every)) + 1
    assert len(frame) == 101
    assert frame["t"].iloc[-1] == pytest.approx(5.0)
    assert (frame["c"] == 1.0).all()

    report = StorageService().read_report(f"{prefix}.report.json")
    assert report.command == "simulate"
    assert report.simulation.rows == 101
    assert report.simulation.seed == 7
    assert "101 rows" in result.output


def test_simulate_is_reproducible(runner, linear_config_file, tmp_path):
    config = linear_config_file()
    first, second = tmp_path / "a", tmp_path / "b"
    assert invoke(runner, "simulate", config, "--out", first).exit_code == 0
    assert invoke(runner, "simulate", config, "--out", second).exit_code == 0
    with open(f"{first}.csv", "rb") as a, open(f"{second}.csv", "rb") as b:
        assert a.read() == b.read()


def test_simulate_seed_override_changes_trajectory(runner, linear_config_file, tmp_path):
    config = linear_config_file()
    first, second = tmp_path / "a", tmp_path / "b"
    assert invoke(runner, "simulate", config, "--out", first).exit_code == 0
    assert invoke(runner, "simulate", config, "--out", second, "--seed", "99").exit_code == 0
    assert not pd.read_csv(f"{first}.csv").equals(pd.read_csv(f"{second}.csv"))
    assert read_json(f"{second}.report.json")["simulation"]["seed"] == 99


def test_simulate_unresolvable_theta(runner, linear_config_file, tmp_path):
    config = linear_config_file(
        layers=[
            {"matrix": EXAMPLE1, "gamma": [1.0, 1.0]},
            {"matrix": SYMMETRIC3, "gamma": [1.0, 1.0]},
        ]
    )
    result = invoke(runner, "simulate", config, "--out", tmp_path / "x")
    assert result.exit_code == 2
    assert "ThetaUnresolvable" in result.output


def test_simulate_divergence_exit_code(runner, linear_config_file, tmp_path):
    config = linear_config_file(
        model={"kind": "linear_test", "params": {"A": [[100.0, 0.0], [0.0, 100.0]]}},
        coupling={"mode": "fixed", "c": 0.01},
        integrator={"dt": 0.01, "t_end": 5.0, "record_every": 1},
    )
    result = invoke(runner, "simulate", config, "--out", tmp_path / "x")
    assert result.exit_code == 4


def test_simulate_invalid_config(runner, linear_config_file, tmp_path):
    result = invoke(runner, "simulate", linear_config_file(schema_version=2), "--out", tmp_path / "x")
    assert result.exit_code == 2


def two_layer_file(linear_config_file):
    return linear_config_file(
        layers=[
            {"matrix": EXAMPLE1, "gamma": [1.0, 1.0]},
            {"matrix": SYMMETRIC3, "gamma": [1.0, 1.0]},
        ],
        integrator={"dt": 0.01, "t_end": 0.5, "record_every": 5},
    )


def test_conjecture_zero_trials(runner, linear_config_file, tmp_path, monkeypatch):
    monkeypatch.setenv("SYNCNET_WORKERS", "1")
    out = tmp_path / "summary.csv"
    result = invoke(runner, "conjecture", two_layer_file(linear_config_file), "--trials", "0", "--out", out)
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(out)
    assert list(frame.columns) == CONJECTURE_COLUMNS
    assert len(frame) == 0


def test_conjecture_rows(runner, linear_config_file, tmp_path, monkeypatch):
    monkeypatch.setenv("SYNCNET_WORKERS", "1")
    out = tmp_path / "summary.csv"
    result = invoke(
        runner,
        "conjecture",
        two_layer_file(linear_config_file),
        "--trials",
        "2",
        "--seed",
        "10",
        "--out",
        out,
    )
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(out)
    assert frame["seed"].tolist() == [10, 10, 10, 11, 11, 11]
    assert frame["scenario"].tolist() == ["layer1", "layer2", "both"] * 2
    assert frame["error"].isna().all()
    assert frame["theta"].nunique() == 1
    assert (frame["theta_scope"] == "shared").all()


def test_conjecture_rejects_negative_trials(runner, linear_config_file):
    result = invoke(runner, "conjecture", two_layer_file(linear_config_file), "--trials", "-1")
    assert result.exit_code == 2


def test_conjecture_needs_two_layers(runner, linear_config_file):
    result = invoke(runner, "conjecture", linear_config_file(), "--trials", "1")
    assert result.exit_code == 2


@pytest.mark.slow
def test_simulate_example2_lorenz(runner, tmp_path):
    prefix = tmp_path / "example2"
    result = invoke(runner, "simulate", EXAMPLES / "example2_fixed.json", "--out", prefix)
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(f"{prefix}.csv")
    assert len(frame) == 1001
    assert frame["V"].iloc[-1] < 1e-6
