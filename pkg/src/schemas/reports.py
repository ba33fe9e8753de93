"""Serialized analysis and experiment reports"""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field


class LayerReport(BaseModel):
    index: int
    nodes: int
    valid: bool = True
    error: Optional[str] = None
    nlevec: Optional[List[float]] = None
    lambda2: Optional[float] = None
    adsb: Optional[float] = None
    lambda_theta: Optional[float] = None
    admissible: Optional[bool] = None
    gains: Optional[List[float]] = None
    lambda_max: Optional[float] = None
    adcb: Optional[float] = None


class IntervalReport(BaseModel):
    kind: Literal["mu", "nu"]
    lower: Optional[float] = None
    upper: Optional[float] = None

    @property
    def empty(self) -> bool:
        return self.lower is None


class ThetaReport(BaseModel):
    values: List[float]
    provenance: str


class Hypothesis(BaseModel):
    name: str
    lhs: float
    relation: Literal["<=", "<"]
    rhs: float
    holds: bool

    @classmethod
    def evaluate(cls, name: str, lhs: float, relation: str, rhs: float) -> "Hypothesis":
        holds = lhs <= rhs if relation == "<=" else lhs < rhs
        return cls(name=name, lhs=lhs, relation=relation, rhs=rhs, holds=holds)


class SimulationSummary(BaseModel):
    seed: int
    rows: int
    dt: float
    t_end: float
    record_every: int
    error_label: Literal["V", "W"]
    final_error: float
    final_c: float
    converged: bool


class AnalysisReport(BaseModel):
    command: str
    layers: List[LayerReport] = Field(default_factory=list)
    chebyshev_gaps: List[float] = Field(default_factory=list)
    interval: Optional[IntervalReport] = None
    theta: Optional[ThetaReport] = None
    spectral_norm: Optional[float] = None
    max_theta: Optional[float] = None
    lambda_h: Optional[float] = None
    critical_c: Optional[float] = None
    hypotheses: List[Hypothesis] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    reducible_to_single_weight: Optional[bool] = None
    sum_nlevec: Optional[List[float]] = None
    coupling_operator: Optional[List[List[float]]] = None  # sum_m G^m (x) Gamma^m
    simulation: Optional[SimulationSummary] = None


class ConjectureRow(BaseModel):
    seed: int
    scenario: str
    final_error: Optional[float] = None
    time_to_threshold: Optional[float] = None
    final_c: Optional[float] = None
    theta: Optional[str] = None  # ";"-joined weights the error was measured in
    theta_scope: Optional[str] = None  # "shared" or "scenario"
    error: Optional[str] = None
