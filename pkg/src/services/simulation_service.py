from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import ShapeMismatch, SyncNetError, ThetaUnresolvable
from src.dynamics.models import create_model
from src.dynamics.network import (
    AdaptiveCoupling,
    FixedCoupling,
    Layer,
    NetworkSpec,
    PinningSpec,
)
from src.dynamics.simulator import Trajectory, random_initial_states, simulate
from src.network.graph import first_node_gains, validate_coupling
from src.network.spectral import (
    Provenance,
    WeightVector,
    adcb,
    adsb,
    nlevec,
    select_theta,
)
from src.schemas.reports import AnalysisReport, SimulationSummary
from src.schemas.run_config import RunConfig
from src.services.analysis_service import (
    AnalysisService,
    ControlService,
    simplex_grid,
    theta_report,
)
from src.services.base import BaseService

DEFAULT_TOLERANCE = 1e-6

TOOL_DEFAULTS_NOTE = (
    "Initial states are drawn uniformly from [{low}, {high}] per coordinate; "
    "this box{adaptive} is a tool choice, not part of the network model."
)


def expand_gains(gains: Sequence, n: int) -> List[np.ndarray]:
    """Scalar d pins the first node with gain d, a list gives every node's gain"""
    expanded = []
    for index, d in enumerate(gains):
        if isinstance(d, (int, float)):
            expanded.append(first_node_gains(n, float(d)))
            continue
        d = np.asarray(d, dtype=np.float64)
        if d.shape != (n,):
            raise ShapeMismatch(f"Layer {index} has {d.size} gains for {n} nodes")
        expanded.append(d)
    return expanded


def resolve_theta(
    spec: NetworkSpec,
    requested,
    grid: int,
    fallback_to_sum: bool = False,
) -> WeightVector:
    """Explicit list, or 'auto': ADSB-based selection (ADCB when pinning)"""
    if requested != "auto":
        theta = WeightVector.from_values(requested, Provenance.USER)
        if theta.n != spec.n_nodes:
            raise ShapeMismatch(
                f"theta has {theta.n} entries, network has {spec.n_nodes} nodes"
            )
        return theta

    couplings = [layer.g for layer in spec.layers]
    xis = [nlevec(g) for g in couplings]
    if spec.pinning is not None:
        bounds = [adcb(gt, xi) for gt, xi in zip(spec.pinned, xis)]
    else:
        bounds = [adsb(g) for g in couplings]
    theta = select_theta(xis, bounds, grid=grid)
    if theta is not None:
        return theta
    if fallback_to_sum:
        return nlevec(validate_coupling(sum(g.m for g in couplings)))
    raise ThetaUnresolvable(
        "theta is 'auto' but no admissible combination of NLEVecs exists; "
        "give an explicit theta"
    )


class SimulationService(BaseService):
    """Builds a NetworkSpec from a run config, integrates it and reports"""

    def build_spec(self, data: Dict, config: RunConfig) -> Tuple[NetworkSpec, np.ndarray]:
        entries = data["layers"]
        for entry in entries:
            if not entry.valid:
                raise entry.error
        n = entries[0].nodes
        model = create_model(config.model.kind, config.model.params)

        if config.coupling.mode == "adaptive":
            coupling = AdaptiveCoupling(beta=config.coupling.beta, c0=config.coupling.c0)
        else:
            coupling = FixedCoupling(c=config.coupling.c)

        box = self.config.get("initial_states", {})
        low, high = float(box.get("low", -5.0)), float(box.get("high", 5.0))
        draw_target = config.pinning is not None and config.pinning.target_init == "random"
        states, target = random_initial_states(
            n, model.dim, config.seed, low, high, with_target=draw_target
        )
        if config.init != "random":
            states = np.asarray(config.init, dtype=np.float64)

        pinning = None
        if config.pinning is not None:
            target_init = target if draw_target else config.pinning.target_init
            pinning = PinningSpec(
                gains=expand_gains(config.pinning.gains, n), target_init=target_init
            )

        spec = NetworkSpec(
            layers=[Layer(g=entry.coupling, gamma=entry.gamma) for entry in entries],
            coupling=coupling,
            model=model,
            pinning=pinning,
        )
        return spec, states

    def analyze(self, data: Dict, spec: NetworkSpec, theta: WeightVector, config: RunConfig):
        """Spectral report for the simulated network, with the resolved theta"""
        service = ControlService() if spec.pinning is not None else AnalysisService()
        service.configure(self.config)
        kwargs = {"theta": theta.tolist(), "lambda_h": config.L_h, "command": "simulate"}
        if spec.pinning is not None:
            kwargs["gains"] = [gt.gains for gt in spec.pinned]
        try:
            report = service.execute(data, **kwargs)
        except SyncNetError as e:
            self.logger.warning(f"Spectral analysis skipped: {str(e)}")
            report = AnalysisReport(command="simulate", lambda_h=config.L_h)
            report.notes.append(f"Spectral analysis skipped: {str(e)}")
        report.theta = theta_report(theta)
        return report

    def execute(
        self,
        data: Dict,
        config: RunConfig = None,
        seed: Optional[int] = None,
        fallback_to_sum: bool = False,
        with_report: bool = True,
    ) -> Tuple[Trajectory, Optional[AnalysisReport]]:
        if config is None:
            raise ValueError("SimulationService requires a run config")
        if seed is not None:
            config = config.model_copy(update={"seed": seed})

        spec, states = self.build_spec(data, config)
        theta = resolve_theta(
            spec, config.theta, simplex_grid(self.config), fallback_to_sum=fallback_to_sum
        )
        self.logger.info(
            f"Resolved theta ({theta.provenance.value}): {np.round(theta.v, 4).tolist()}"
        )

        report = self.analyze(data, spec, theta, config) if with_report else None
        integrator = config.integrator
        trajectory = simulate(
            spec,
            theta,
            states,
            dt=integrator.dt,
            t_end=integrator.t_end,
            record_every=integrator.record_every,
        )

        if report is not None:
            tolerance = float(
                self.config.get("simulation", {}).get("convergence_tolerance", DEFAULT_TOLERANCE)
            )
            final_error = float(trajectory.V[-1])
            report.simulation = SimulationSummary(
                seed=config.seed,
                rows=trajectory.n_records,
                dt=integrator.dt,
                t_end=integrator.t_end,
                record_every=integrator.record_every,
                error_label=trajectory.error_label,
                final_error=final_error,
                final_c=float(trajectory.c_of_t[-1]),
                converged=final_error <= tolerance,
            )
            if final_error > tolerance:
                self.logger.warning(
                    f"{trajectory.error_label}(t_end) = {final_error:.3e} is above "
                    f"tolerance {tolerance:g}"
                )
            if config.init == "random":
                box = self.config.get("initial_states", {})
                report.notes.append(
                    TOOL_DEFAULTS_NOTE.format(
                        low=box.get("low", -5.0),
                        high=box.get("high", 5.0),
                        adaptive=" together with beta and c(0)" if spec.adaptive else "",
                    )
                )
        return trajectory, report
