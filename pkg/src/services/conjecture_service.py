"""Empirical sweep: does a multi-weighted network synchronize faster than
each of its layers alone? Results are tabulated, never asserted.
"""

from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Tuple

from src.errors import InvalidInput, SyncNetError
from src.schemas.reports import ConjectureRow
from src.schemas.run_config import RunConfig
from src.services.analysis_service import simplex_grid
from src.services.base import BaseService
from src.services.simulation_service import resolve_theta

DEFAULT_THRESHOLD = 1e-6


def scenario_plan(n_layers: int) -> List[Tuple[str, List[int]]]:
    """Each layer alone, then all layers together"""
    plan = [(f"layer{m + 1}", [m]) for m in range(n_layers)]
    plan.append(("both" if n_layers == 2 else "all", list(range(n_layers))))
    return plan


def format_theta(values) -> str:
    return ";".join(f"{float(v):.6g}" for v in values)


def _run_trial_top(args) -> ConjectureRow:
    """Top-level picklable worker for ProcessPoolExecutor.

    Expects args = (config_json, seed, scenario, indices, defaults, threshold, theta_scope)
    """
    config_json, seed, scenario, indices, defaults, threshold, theta_scope = args
    # local import keeps worker start-up independent of the CLI modules
    from src.network_twin.twin_factory import TwinFactory

    try:
        config = RunConfig.model_validate_json(config_json).with_layers(indices)
        twin = TwinFactory().create_twin_from_config(
            config,
            services=["SimulationService"],
            service_config=defaults,
            layer_ids=indices,
        )
        trajectory, _ = twin.execute_service(
            "SimulationService",
            config=config,
            seed=seed,
            fallback_to_sum=len(indices) > 1,
            with_report=False,
        )
    except SyncNetError as e:
        return ConjectureRow(
            seed=seed,
            scenario=scenario,
            theta_scope=theta_scope,
            error=f"{type(e).__name__}: {str(e)}",
        )

    return ConjectureRow(
        seed=seed,
        scenario=scenario,
        final_error=float(trajectory.V[-1]),
        time_to_threshold=trajectory.time_to_threshold(threshold),
        final_c=float(trajectory.c_of_t[-1]),
        theta=format_theta(trajectory.theta),
        theta_scope=theta_scope,
    )


class ConjectureService(BaseService):
    """Runs every scenario for consecutive seeds, optionally in worker processes"""

    def shared_theta(self, config: RunConfig) -> Optional[List[float]]:
        """One theta for every scenario, resolved on the full network.

        Returns None when the full network cannot be resolved; each scenario
        then resolves its own theta.
        """
        from src.network_twin.twin_factory import TwinFactory

        if config.theta != "auto":
            return list(config.theta)
        try:
            twin = TwinFactory().create_twin_from_config(
                config, services=["SimulationService"], service_config=self.config
            )
            spec, _ = twin.active_services["SimulationService"].build_spec(
                twin.get_data(), config
            )
            theta = resolve_theta(spec, "auto", simplex_grid(self.config), fallback_to_sum=True)
        except SyncNetError as e:
            self.logger.warning(
                f"Failed to resolve a shared theta, scenarios resolve their own: {str(e)}"
            )
            return None
        self.logger.info(
            f"Shared theta ({theta.provenance.value}) for all scenarios: {format_theta(theta.v)}"
        )
        return theta.tolist()

    def execute(
        self,
        data: Dict,
        config: RunConfig = None,
        trials: int = 5,
        seed: Optional[int] = None,
        threshold: Optional[float] = None,
        workers: int = 1,
    ) -> List[ConjectureRow]:
        if config is None:
            raise ValueError("ConjectureService requires a run config")
        if len(config.layers) < 2:
            raise InvalidInput("The layer comparison needs a config with at least two layers")
        if trials < 0:
            raise InvalidInput(f"trials must be nonnegative, got {trials}")

        base_seed = config.seed if seed is None else seed
        if threshold is None:
            threshold = float(
                self.config.get("conjecture", {}).get("threshold", DEFAULT_THRESHOLD)
            )
        if trials == 0:
            return []

        theta = self.shared_theta(config)
        theta_scope = "scenario" if theta is None else "shared"
        if theta is not None:
            config = config.model_copy(update={"theta": theta})
        config_json = config.model_dump_json()
        tasks = [
            (config_json, base_seed + k, scenario, indices, self.config, threshold, theta_scope)
            for k in range(trials)
            for scenario, indices in scenario_plan(len(config.layers))
        ]

        self.logger.info(f"Running {len(tasks)} trials on {workers} worker(s)")
        # map keeps task order: rows come out sorted by (seed, scenario)
        if workers <= 1:
            rows = [_run_trial_top(task) for task in tasks]
        else:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                rows = list(executor.map(_run_trial_top, tasks))

        for row in rows:
            if row.error is not None:
                self.logger.warning(f"Trial seed={row.seed} {row.scenario} failed: {row.error}")
        return rows
