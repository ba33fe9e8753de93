import json

import numpy as np
import pytest

from src.network.graph import validate_coupling

EXAMPLE1 = [[-3.0, 1.0, 2.0], [2.0, -4.0, 2.0], [1.0, 1.0, -2.0]]
SYMMETRIC3 = [[-2.0, 1.0, 1.0], [1.0, -2.0, 1.0], [1.0, 1.0, -2.0]]
DISCONNECTED = [[-1.0, 1.0], [0.0, 0.0]]

# NLEVec of EXAMPLE1 + SYMMETRIC3, exactly (9/28, 1/4, 3/7)
SUM_NLEVEC = [9.0 / 28.0, 0.25, 3.0 / 7.0]


def write_matrix(path, rows):
    path.write_text("\n".join(" ".join(str(x) for x in row) for row in rows) + "\n")
    return str(path)


@pytest.fixture
def g1():
    return validate_coupling(EXAMPLE1)


@pytest.fixture
def g2():
    return validate_coupling(SYMMETRIC3)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def matrix_files(tmp_path):
    return {
        "g1": write_matrix(tmp_path / "g1.txt", EXAMPLE1),
        "g2": write_matrix(tmp_path / "g2.txt", SYMMETRIC3),
        "disconnected": write_matrix(tmp_path / "disconnected.txt", DISCONNECTED),
        "bad_row_sum": write_matrix(tmp_path / "bad.txt", [[-1.0, 2.0], [1.0, -2.0]]),
    }


def linear_config(**overrides):
    """Short, cheap run: 2-D linear nodes on the 3-node example"""
    config = {
        "schema_version": 1,
        "layers": [{"matrix": EXAMPLE1, "gamma": [1.0, 1.0]}],
        "coupling": {"mode": "fixed", "c": 1.0},
        "model": {"kind": "linear_test", "params": {"A": [[-0.5, 0.0], [0.0, -0.5]]}},
        "theta": "auto",
        "integrator": {"dt": 0.01, "t_end": 1.0, "record_every": 5},
        "seed": 3,
    }
    config.update(overrides)
    return config


@pytest.fixture
def linear_config_file(tmp_path):
    def make(**overrides):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(linear_config(**overrides)))
        return str(path)

    return make
