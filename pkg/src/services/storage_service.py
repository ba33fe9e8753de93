import logging
import os
from typing import List, Sequence

import pandas as pd

from config.config_loader import ConfigLoader
from src.dynamics.simulator import Trajectory
from src.errors import ConfigError
from src.schemas.reports import AnalysisReport, ConjectureRow

logger = logging.getLogger(__name__)

CONJECTURE_COLUMNS = list(ConjectureRow.model_fields.keys())


class StorageService:
    """Flat-file persistence: matrix text files, trajectory CSV, JSON reports"""

    def __init__(self, base_dir: str = "."):
        self.base_dir = base_dir

    def _resolve(self, path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)

    def _ensure_parent(self, path: str) -> None:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)

    def read_matrix(self, path: str) -> List[List[float]]:
        return ConfigLoader.load_matrix(self._resolve(path))

    @staticmethod
    def trajectory_frame(trajectory: Trajectory) -> pd.DataFrame:
        """t, z{i}_{k} (1-based), V, c, then target_{k} when pinned"""
        n_records, n, dim = trajectory.states.shape
        columns = {"t": trajectory.times}
        flat = trajectory.states.reshape(n_records, n * dim)
        for i in range(n):
            for k in range(dim):
                columns[f"z{i + 1}_{k + 1}"] = flat[:, i * dim + k]
        # the error column keeps its name; W when pinned (see the report's error_label)
        columns["V"] = trajectory.V
        columns["c"] = trajectory.c_of_t
        if trajectory.target is not None:
            for k in range(dim):
                columns[f"target_{k + 1}"] = trajectory.target[:, k]
        return pd.DataFrame(columns)

    def write_trajectory(self, trajectory: Trajectory, path: str) -> str:
        path = self._resolve(path)
        try:
            self._ensure_parent(path)
            self.trajectory_frame(trajectory).to_csv(path, index=False)
        except OSError as e:
            raise ConfigError(f"Failed to write trajectory to {path}: {str(e)}")
        logger.info(f"Wrote {trajectory.n_records} trajectory rows to {path}")
        return path

    def write_report(self, report: AnalysisReport, path: str) -> str:
        path = self._resolve(path)
        try:
            self._ensure_parent(path)
            with open(path, "w") as f:
                f.write(report.model_dump_json(indent=2))
        except OSError as e:
            raise ConfigError(f"Failed to write report to {path}: {str(e)}")
        logger.info(f"Wrote report to {path}")
        return path

    def read_report(self, path: str) -> AnalysisReport:
        path = self._resolve(path)
        try:
            with open(path, "r") as f:
                return AnalysisReport.model_validate_json(f.read())
        except OSError as e:
            raise ConfigError(f"Failed to read report {path}: {str(e)}")

    @staticmethod
    def conjecture_frame(rows: Sequence[ConjectureRow]) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump() for row in rows], columns=CONJECTURE_COLUMNS)

    def write_conjecture(self, rows: Sequence[ConjectureRow], path: str) -> str:
        path = self._resolve(path)
        try:
            self._ensure_parent(path)
            self.conjecture_frame(rows).to_csv(path, index=False)
        except OSError as e:
            raise ConfigError(f"Failed to write summary to {path}: {str(e)}")
        logger.info(f"Wrote {len(rows)} summary rows to {path}")
        return path
