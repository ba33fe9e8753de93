import json

import pytest

from config.config_loader import BUILTIN_DEFAULTS, DEFAULTS_PATH, ConfigLoader
from src.errors import ConfigError
from tests.conftest import EXAMPLE1, linear_config, write_matrix


def test_load_matrix_comments_and_commas(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("# example coupling\n-3, 1, 2\n\n2 -4 2  # middle row\n1,1,-2\n")
    assert ConfigLoader.load_matrix(str(path)) == EXAMPLE1


@pytest.mark.parametrize(
    "content",
    ["", "# only a comment\n", "-1 1\n1 x\n", "-1 1\n1\n"],
)
def test_load_matrix_rejects_bad_files(tmp_path, content):
    path = tmp_path / "bad.txt"
    path.write_text(content)
    with pytest.raises(ConfigError):
        ConfigLoader.load_matrix(str(path))


def test_load_matrix_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        ConfigLoader.load_matrix(str(tmp_path / "nope.txt"))


def test_load_defaults_from_repo():
    defaults = ConfigLoader.load_defaults(str(DEFAULTS_PATH))
    assert defaults["integrator"] == {"dt": 1e-3, "t_end": 10.0, "record_every": 10}
    assert defaults["models"]["lorenz"]["rho"] == 28.0
    assert defaults["analysis"]["simplex_grid"] == 20


def test_load_defaults_falls_back(tmp_path):
    assert ConfigLoader.load_defaults(str(tmp_path / "missing.yaml")) == BUILTIN_DEFAULTS
    empty = tmp_path / "empty.yaml"
    empty.write_text("other: 1\n")
    assert ConfigLoader.load_defaults(str(empty)) == BUILTIN_DEFAULTS


def test_load_defaults_merges_partial_file(tmp_path):
    path = tmp_path / "partial.yaml"
    path.write_text("defaults:\n  integrator:\n    dt: 0.01\n")
    defaults = ConfigLoader.load_defaults(str(path))
    assert defaults["integrator"]["dt"] == 0.01
    assert defaults["integrator"]["t_end"] == 10.0
    assert defaults["conjecture"]["trials"] == 5


def test_load_run_config_resolves_matrix_paths(tmp_path):
    write_matrix(tmp_path / "g1.txt", EXAMPLE1)
    raw = {
        "schema_version": 1,
        "layers": [{"matrix": "g1.txt", "gamma": [1.0, 2.0, 1.0]}],
        "coupling": {"mode": "fixed", "c": 1.0},
        "model": {"kind": "lorenz"},
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(raw))

    config = ConfigLoader.load_run_config(str(path), BUILTIN_DEFAULTS)
    assert config.layers[0].matrix == EXAMPLE1
    assert config.model.params == {"sigma": 10.0, "rho": 28.0, "beta_l": 8.0 / 3.0}
    assert config.integrator.dt == 1e-3
    assert config.integrator.record_every == 10
    assert config.theta == "auto"


def test_load_run_config_keeps_explicit_values(linear_config_file):
    path = linear_config_file(integrator={"dt": 0.005})
    config = ConfigLoader.load_run_config(path, BUILTIN_DEFAULTS)
    assert config.integrator.dt == 0.005
    assert config.integrator.t_end == 10.0
    assert config.model.params == {"A": [[-0.5, 0.0], [0.0, -0.5]]}


@pytest.mark.parametrize(
    "overrides",
    [
        {"schema_version": 2},
        {"coupling": {"mode": "fixed"}},
        {"coupling": {"mode": "adaptive", "c0": 1.0}},
        {"layers": [{"matrix": EXAMPLE1, "gamma": [1.0, -1.0]}]},
        {"pinning": {"gains": [1.0, 1.0]}},
        {"integrator": {"dt": 0.0}},
    ],
)
def test_load_run_config_rejects_invalid(linear_config_file, overrides):
    with pytest.raises(ConfigError):
        ConfigLoader.load_run_config(linear_config_file(**overrides), BUILTIN_DEFAULTS)


def test_load_run_config_bad_json(tmp_path):
    path = tmp_path / "run.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        ConfigLoader.load_run_config(str(path), BUILTIN_DEFAULTS)
    with pytest.raises(ConfigError):
        ConfigLoader.load_run_config(str(tmp_path / "missing.json"), BUILTIN_DEFAULTS)


def test_with_layers_restricts_pinning():
    from src.schemas.run_config import RunConfig

    config = RunConfig.model_validate(
        linear_config(
            layers=[
                {"matrix": EXAMPLE1, "gamma": [1.0, 1.0]},
                {"matrix": EXAMPLE1, "gamma": [2.0, 2.0]},
            ],
            pinning={"gains": [1.0, [0.0, 2.0, 0.0]]},
        )
    )
    second = config.with_layers([1])
    assert second.layers[0].gamma == [2.0, 2.0]
    assert second.pinning.gains == [[0.0, 2.0, 0.0]]
    assert len(config.layers) == 2


def test_worker_count(monkeypatch):
    monkeypatch.setenv("SYNCNET_WORKERS", "3")
    assert ConfigLoader.worker_count() == 3
    monkeypatch.setenv("SYNCNET_WORKERS", "0")
    assert ConfigLoader.worker_count() == 1
    monkeypatch.setenv("SYNCNET_WORKERS", "many")
    assert ConfigLoader.worker_count() >= 1
