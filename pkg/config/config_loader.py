import json
import logging
import os
import re
from pathlib import Path
from typing import Any, Dict, List

import yaml
from pydantic import ValidationError

from src.errors import ConfigError
from src.schemas.run_config import RunConfig

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).resolve().parent
DEFAULTS_PATH = CONFIG_DIR / "defaults.yaml"

BUILTIN_DEFAULTS: Dict[str, Any] = {
    "integrator": {"dt": 1e-3, "t_end": 10.0, "record_every": 10},
    "models": {"lorenz": {"sigma": 10.0, "rho": 28.0, "beta_l": 8.0 / 3.0}},
    "initial_states": {"low": -5.0, "high": 5.0},
    "simulation": {"convergence_tolerance": 1e-6},
    "analysis": {"simplex_grid": 20},
    "conjecture": {"threshold": 1e-6, "trials": 5},
    "workers": {"env_var": "SYNCNET_WORKERS"},
}

_SEPARATOR = re.compile(r"[,\s]+")


class ConfigLoader:
    @staticmethod
    def load_defaults(config_path: str = str(DEFAULTS_PATH)) -> Dict:
        """Load tool defaults from YAML, falling back to the built-in values"""
        try:
            with open(config_path, "r") as f:
                config = yaml.safe_load(f)
            if not config or "defaults" not in config:
                raise ValueError("missing defaults section")
        except Exception as e:
            logger.warning(f"Failed to load defaults from {config_path}: {str(e)}")
            return BUILTIN_DEFAULTS

        defaults = {key: dict(value) for key, value in BUILTIN_DEFAULTS.items()}
        for section, values in config["defaults"].items():
            defaults.setdefault(section, {}).update(values or {})
        return defaults

    @staticmethod
    def load_matrix(path: str) -> List[List[float]]:
        """Parse a matrix text file: one row per line, whitespace or comma
        separated, '#' starts a comment.
        """
        if not os.path.exists(path):
            raise ConfigError(f"Matrix file not found: {path}")

        rows = []
        with open(path, "r") as f:
            for line_number, line in enumerate(f, 1):
                content = line.split("#", 1)[0].strip()
                if not content:
                    continue
                try:
                    rows.append([float(tok) for tok in _SEPARATOR.split(content) if tok])
                except ValueError as e:
                    raise ConfigError(f"{path}:{line_number}: {str(e)}")

        if not rows:
            raise ConfigError(f"Matrix file is empty: {path}")
        if any(len(row) != len(rows[0]) for row in rows):
            raise ConfigError(f"Matrix rows in {path} have different lengths")
        return rows

    @staticmethod
    def load_run_config(config_path: str, defaults: Dict = None) -> RunConfig:
        """Load a JSON run config, fill integrator defaults and inline matrix files"""
        if not os.path.exists(config_path):
            raise ConfigError(f"Configuration file not found: {config_path}")

        try:
            with open(config_path, "r") as f:
                raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Invalid JSON in {config_path}: {str(e)}")

        if not isinstance(raw, dict):
            raise ConfigError(f"Run config {config_path} must be a JSON object")

        defaults = defaults or ConfigLoader.load_defaults()
        raw.setdefault("integrator", {})
        if isinstance(raw["integrator"], dict):
            for key, value in defaults["integrator"].items():
                raw["integrator"].setdefault(key, value)

        model = raw.get("model")
        if isinstance(model, dict) and model.get("kind") in defaults.get("models", {}):
            model["params"] = {**defaults["models"][model["kind"]], **model.get("params", {})}

        base_dir = os.path.dirname(os.path.abspath(config_path))
        for layer in raw.get("layers", []) or []:
            if isinstance(layer, dict) and isinstance(layer.get("matrix"), str):
                matrix_path = layer["matrix"]
                if not os.path.isabs(matrix_path):
                    matrix_path = os.path.join(base_dir, matrix_path)
                layer["matrix"] = ConfigLoader.load_matrix(matrix_path)

        try:
            return RunConfig.model_validate(raw)
        except ValidationError as e:
            raise ConfigError(f"Invalid run config {config_path}: {str(e)}")

    @staticmethod
    def worker_count(defaults: Dict = None) -> int:
        """Parallel trial cap from the environment, else available CPUs"""
        env_var = (defaults or BUILTIN_DEFAULTS)["workers"].get("env_var", "SYNCNET_WORKERS")
        value = os.environ.get(env_var)
        if value:
            try:
                return max(1, int(value))
            except ValueError:
                logger.warning(f"Ignoring non-integer {env_var}={value!r}")
        return os.cpu_count() or 1
