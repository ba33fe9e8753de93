"""Spectral analysis services: plain coupling, pinning control, structural check"""

import itertools
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.errors import InvalidInput, ShapeMismatch
from src.network.graph import (
    build_pinned,
    kron_coupling,
    single_weight_equivalent,
    validate_coupling,
)
from src.network.spectral import (
    PINNED_BOUND_NOTE,
    WeightVector,
    adcb,
    adsb,
    build_g_theta,
    chebyshev_gap,
    control_critical_c,
    control_lambda_max,
    feasible_mu_interval,
    lambda2_transverse,
    nlevec,
    select_theta,
    sync_critical_c,
    theta_admissibility,
)
from src.schemas.reports import (
    AnalysisReport,
    Hypothesis,
    IntervalReport,
    LayerReport,
    ThetaReport,
)
from src.services.base import BaseService

DEFAULT_GRID = 20


def simplex_grid(config: Dict) -> int:
    return int(config.get("analysis", {}).get("simplex_grid", DEFAULT_GRID))


def theta_report(theta: WeightVector) -> ThetaReport:
    return ThetaReport(values=theta.tolist(), provenance=theta.provenance.value)


def interval_report(kind: str, interval) -> IntervalReport:
    if interval is None:
        return IntervalReport(kind=kind)
    return IntervalReport(kind=kind, lower=interval.lower, upper=interval.upper)


def user_theta(values: Optional[Sequence[float]], n: int) -> Optional[WeightVector]:
    if values is None:
        return None
    theta = WeightVector.from_values(values)
    if theta.n != n:
        raise ShapeMismatch(f"--theta has {theta.n} entries, network has {n} nodes")
    return theta


def pairwise_gaps(xis: Sequence[WeightVector]) -> List[float]:
    return [chebyshev_gap(a, b) for a, b in itertools.combinations(xis, 2)]


def inner_diagonal(gamma) -> List[float]:
    # analysis from bare matrix files assumes Gamma = I
    return [1.0] if gamma is None else [float(g) for g in gamma]


def record_admissibility(
    report: AnalysisReport,
    layers: Sequence[LayerReport],
    theta: WeightVector,
    xis: Sequence[WeightVector],
    bounds: Sequence[float],
    label: str,
) -> None:
    """Mark each layer admissible for theta and add one hypothesis per layer"""
    for layer, check in zip(layers, theta_admissibility(theta, xis, bounds)):
        layer.admissible = check.holds
        report.hypotheses.append(
            Hypothesis.evaluate(
                f"layer{layer.index}: gap(theta, xi) <= {label}", check.gap, "<=", check.bound
            )
        )


class AnalysisService(BaseService):
    """NLEVec, lambda_2, ADSB, mu interval and critical coupling for plain coupling"""

    def execute(
        self,
        data: Dict,
        theta: Optional[Sequence[float]] = None,
        lambda_h: Optional[float] = None,
        command: str = "analyze",
    ) -> AnalysisReport:
        entries = data["layers"]
        for entry in entries:
            if not entry.valid:
                raise entry.error
        couplings = [entry.coupling for entry in entries]
        n = couplings[0].n
        if any(g.n != n for g in couplings):
            raise ShapeMismatch("All layers must have the same number of nodes")

        report = AnalysisReport(command=command, lambda_h=lambda_h)
        xis = [nlevec(g) for g in couplings]
        bounds = [adsb(g) for g in couplings]
        for entry, g, xi, bound in zip(entries, couplings, xis, bounds):
            report.layers.append(
                LayerReport(
                    index=entry.index,
                    nodes=g.n,
                    nlevec=xi.tolist(),
                    lambda2=lambda2_transverse(build_g_theta(g, xi)),
                    adsb=bound,
                )
            )
        report.chebyshev_gaps = pairwise_gaps(xis)

        if len(couplings) == 2:
            self._report_pair(report, bounds)
        if len(couplings) >= 2:
            self._report_reducibility(report, entries)

        chosen = user_theta(theta, n) or select_theta(
            xis, bounds, grid=simplex_grid(self.config)
        )
        if chosen is None:
            report.notes.append("No admissible combination of NLEVecs; theta left unset")
            self.logger.warning("Theta could not be resolved from the ADSB bounds")
            return report

        report.theta = theta_report(chosen)
        for layer, g in zip(report.layers, couplings):
            layer.lambda_theta = lambda2_transverse(build_g_theta(g, chosen))
        record_admissibility(report, report.layers, chosen, xis, bounds, "ADSB")

        if lambda_h is not None:
            pairs = [(g, inner_diagonal(e.gamma)) for g, e in zip(couplings, entries)]
            analysis = sync_critical_c(lambda_h, pairs, chosen)
            report.spectral_norm = analysis.spectral_norm
            report.critical_c = analysis.critical_c
            report.hypotheses.append(
                Hypothesis.evaluate(
                    "sum_m lambda2(G^m_theta) min gamma^m < 0", analysis.weighted_lambda, "<", 0.0
                )
            )
        self.logger.info(f"Analyzed {len(couplings)} layer(s), theta={report.theta.values}")
        return report

    def _report_pair(self, report: AnalysisReport, bounds: List[float]) -> None:
        gap = report.chebyshev_gaps[0]
        total = bounds[0] + bounds[1]
        hypothesis = Hypothesis.evaluate("gap(xi1, xi2) <= ADSB1 + ADSB2", gap, "<=", total)
        report.hypotheses.append(hypothesis)
        report.interval = interval_report("mu", feasible_mu_interval(bounds[0], bounds[1], gap))
        if not hypothesis.holds:
            report.notes.append(
                f"mu interval is empty: gap {gap:.4f} > ADSB1 + ADSB2 = {total:.4f}"
            )

    def _report_reducibility(self, report: AnalysisReport, entries) -> None:
        couplings = [entry.coupling for entry in entries]
        total = validate_coupling(sum(g.m for g in couplings))
        report.sum_nlevec = nlevec(total).tolist()
        if all(entry.gamma is not None for entry in entries):
            pairs = [(entry.coupling, entry.gamma) for entry in entries]
            report.reducible_to_single_weight = single_weight_equivalent(pairs) is not None
            report.coupling_operator = kron_coupling(pairs).tolist()


class ControlService(BaseService):
    """ADCB, nu interval and critical coupling for pinned layers"""

    def execute(
        self,
        data: Dict,
        gains: Sequence[Sequence[float]] = (),
        theta: Optional[Sequence[float]] = None,
        lambda_h: Optional[float] = None,
        command: str = "control",
    ) -> AnalysisReport:
        entries = data["layers"]
        for entry in entries:
            if not entry.valid:
                raise entry.error
        if len(gains) != len(entries):
            raise InvalidInput(f"Got gains for {len(gains)} layers, expected {len(entries)}")

        pinned = [build_pinned(entry.coupling, d) for entry, d in zip(entries, gains)]
        n = pinned[0].n
        report = AnalysisReport(command=command, lambda_h=lambda_h)
        xis = [nlevec(gt.base) for gt in pinned]
        bounds = [adcb(gt, xi) for gt, xi in zip(pinned, xis)]
        for entry, gt, xi, bound in zip(entries, pinned, xis, bounds):
            report.layers.append(
                LayerReport(
                    index=entry.index,
                    nodes=gt.n,
                    nlevec=xi.tolist(),
                    gains=[float(d) for d in gt.gains],
                    lambda_max=control_lambda_max(gt, xi),
                    adcb=bound,
                )
            )
        report.chebyshev_gaps = pairwise_gaps(xis)

        if len(pinned) == 2:
            gap = report.chebyshev_gaps[0]
            report.interval = interval_report("nu", feasible_mu_interval(bounds[0], bounds[1], gap))
            report.hypotheses.append(
                Hypothesis.evaluate("gap(xi1, xi2) <= ADCB1 + ADCB2", gap, "<=", bounds[0] + bounds[1])
            )
            report.notes.append(PINNED_BOUND_NOTE)

        chosen = user_theta(theta, n) or select_theta(
            xis, bounds, grid=simplex_grid(self.config)
        )
        if chosen is None:
            report.notes.append("No admissible combination of NLEVecs; theta left unset")
            return report

        report.theta = theta_report(chosen)
        report.max_theta = float(np.max(chosen.v))
        for layer, gt in zip(report.layers, pinned):
            layer.lambda_theta = control_lambda_max(gt, chosen)
        record_admissibility(report, report.layers, chosen, xis, bounds, "ADCB")

        if lambda_h is not None:
            pairs = [(gt, inner_diagonal(e.gamma)) for gt, e in zip(pinned, entries)]
            analysis = control_critical_c(lambda_h, pairs, chosen)
            report.critical_c = analysis.critical_c
            report.hypotheses.append(
                Hypothesis.evaluate(
                    "sum_m lambda_max(theta G~^m) min gamma^m < 0",
                    analysis.weighted_lambda,
                    "<",
                    0.0,
                )
            )
        self.logger.info(f"Control analysis of {len(pinned)} pinned layer(s) done")
        return report


class CheckService(BaseService):
    """Per-layer structural check that records failures instead of aborting"""

    def execute(
        self, data: Dict, theta: Optional[Sequence[float]] = None, command: str = "check"
    ) -> AnalysisReport:
        entries = data["layers"]
        report = AnalysisReport(command=command)
        valid = []
        for entry in entries:
            layer = LayerReport(index=entry.index, nodes=entry.nodes, valid=entry.valid)
            if entry.valid and entry.nodes >= 2:
                xi = nlevec(entry.coupling)
                layer.nlevec = xi.tolist()
                layer.lambda2 = lambda2_transverse(build_g_theta(entry.coupling, xi))
                layer.adsb = adsb(entry.coupling)
                valid.append((entry, layer, xi))
            elif entry.valid:
                layer.nlevec = [1.0]
            else:
                layer.error = f"{type(entry.error).__name__}: {str(entry.error)}"
            report.layers.append(layer)

        if not valid:
            return report
        n = valid[0][0].nodes
        if any(entry.nodes != n for entry, _, _ in valid):
            report.notes.append("Layers differ in size; combined analysis skipped")
            return report

        xis = [xi for _, _, xi in valid]
        bounds = [layer.adsb for _, layer, _ in valid]
        report.chebyshev_gaps = pairwise_gaps(xis)
        if len(valid) == len(entries) and len(valid) >= 2:
            AnalysisService._report_reducibility(self, report, entries)

        chosen = user_theta(theta, n) or select_theta(
            xis, bounds, grid=simplex_grid(self.config)
        )
        if chosen is None:
            report.notes.append("No admissible combination of NLEVecs on the search grid")
            return report

        report.theta = theta_report(chosen)
        for entry, layer, _ in valid:
            layer.lambda_theta = lambda2_transverse(build_g_theta(entry.coupling, chosen))
        checked = [layer for _, layer, _ in valid]
        record_admissibility(report, checked, chosen, xis, bounds, "ADSB")
        return report
