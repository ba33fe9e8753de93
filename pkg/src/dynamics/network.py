"""Multi-weighted coupled network: right-hand side and error functionals.

    dz_i/dt = h(z_i) + c sum_m sum_j G^m_ij Gamma^m z_j
              - c sum_m d^m_i Gamma^m (z_i - z)      (pinning only)

with the reference z(t) solving dz/dt = h(z).
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.errors import InvalidInput, NonFiniteState, NotStronglyConnected, ShapeMismatch
from src.dynamics.models import NodeModel
from src.network.graph import CouplingMatrix, PinnedMatrix, build_pinned, is_strongly_connected
from src.network.spectral import WeightVector

DIVERGENCE_GUARD = 1e9


@dataclass(frozen=True)
class FixedCoupling:
    c: float

    def __post_init__(self):
        if not self.c > 0.0:
            raise InvalidInput(f"Coupling strength must be positive, got {self.c}")


@dataclass(frozen=True)
class AdaptiveCoupling:
    beta: float
    c0: float = 0.0

    def __post_init__(self):
        if not self.beta > 0.0:
            raise InvalidInput(f"Adaptive beta must be positive, got {self.beta}")
        if self.c0 < 0.0:
            raise InvalidInput(f"Initial coupling c0 must be nonnegative, got {self.c0}")


Coupling = Union[FixedCoupling, AdaptiveCoupling]


@dataclass(frozen=True)
class Layer:
    g: CouplingMatrix
    gamma: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class PinningSpec:
    gains: List[np.ndarray] = field(repr=False)
    target_init: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "gains", [np.asarray(d, dtype=np.float64).reshape(-1) for d in self.gains]
        )
        object.__setattr__(
            self, "target_init", np.asarray(self.target_init, dtype=np.float64).reshape(-1)
        )


@dataclass
class NetworkSpec:
    layers: List[Layer]
    coupling: Coupling
    model: NodeModel
    pinning: Optional[PinningSpec] = None
    pinned: List[PinnedMatrix] = field(default_factory=list, init=False, repr=False)

    def __post_init__(self):
        if not self.layers:
            raise InvalidInput("Network needs at least one coupling layer")
        n = self.layers[0].g.n
        for index, layer in enumerate(self.layers):
            if layer.g.n != n:
                raise ShapeMismatch(f"Layer {index} has {layer.g.n} nodes, expected {n}")
            if not is_strongly_connected(layer.g):
                raise NotStronglyConnected(f"Layer {index} is not strongly connected")
            gamma = np.asarray(layer.gamma, dtype=np.float64)
            if gamma.shape != (self.model.dim,):
                raise ShapeMismatch(
                    f"Layer {index} inner matrix has {gamma.shape} entries, "
                    f"model dimension is {self.model.dim}"
                )
            if np.any(gamma <= 0.0):
                raise InvalidInput(f"Layer {index} inner matrix entries must be positive")

        if self.pinning is not None:
            if len(self.pinning.gains) != len(self.layers):
                raise ShapeMismatch(
                    f"Got pinning gains for {len(self.pinning.gains)} layers, "
                    f"network has {len(self.layers)}"
                )
            if np.asarray(self.pinning.target_init).shape != (self.model.dim,):
                raise ShapeMismatch("Target initial state must match model dimension")
            self.pinned = [
                build_pinned(layer.g, gains)
                for layer, gains in zip(self.layers, self.pinning.gains)
            ]

    @property
    def n_nodes(self) -> int:
        return self.layers[0].g.n

    @property
    def dim(self) -> int:
        return self.model.dim

    @property
    def adaptive(self) -> bool:
        return isinstance(self.coupling, AdaptiveCoupling)

    def layer_pairs(self) -> List[Tuple[CouplingMatrix, np.ndarray]]:
        return [(layer.g, layer.gamma) for layer in self.layers]

    def pinned_pairs(self) -> List[Tuple[PinnedMatrix, np.ndarray]]:
        return [(gt, layer.gamma) for gt, layer in zip(self.pinned, self.layers)]


def check_state(states: np.ndarray) -> None:
    if not np.all(np.isfinite(states)) or np.abs(states).max() > DIVERGENCE_GUARD:
        raise NonFiniteState(
            f"State left the finite region (max |z| = {np.abs(states).max()})"
        )


def dummy_target(theta: WeightVector, states: np.ndarray) -> np.ndarray:
    """Weighted average sum_i theta_i z_i"""
    states = np.asarray(states, dtype=np.float64)
    if states.shape[0] != theta.n:
        raise ShapeMismatch(f"Got {states.shape[0]} node states for {theta.n} weights")
    return theta.v @ states


def lyapunov_V(theta: WeightVector, states: np.ndarray) -> float:
    """1/2 sum_i theta_i |z_i - zbar|^2"""
    states = np.asarray(states, dtype=np.float64)
    errors = states - dummy_target(theta, states)
    return 0.5 * float(theta.v @ np.sum(errors * errors, axis=1))


def lyapunov_W(theta: WeightVector, states: np.ndarray, target: np.ndarray) -> float:
    """1/2 sum_i theta_i |z_i - z|^2 against the pinning target"""
    states = np.asarray(states, dtype=np.float64)
    if states.shape[0] != theta.n:
        raise ShapeMismatch(f"Got {states.shape[0]} node states for {theta.n} weights")
    errors = states - np.asarray(target, dtype=np.float64)
    return 0.5 * float(theta.v @ np.sum(errors * errors, axis=1))


def adaptive_gain_rhs(
    beta: float,
    theta: WeightVector,
    states: np.ndarray,
    target: Optional[np.ndarray] = None,
) -> float:
    """dc/dt = beta/2 sum_i theta_i |z_i - ref|^2, ref = zbar or the pinning target"""
    if not beta > 0.0:
        raise InvalidInput(f"Adaptive beta must be positive, got {beta}")
    if target is None:
        return beta * lyapunov_V(theta, states)
    return beta * lyapunov_W(theta, states, target)


def network_rhs(
    spec: NetworkSpec,
    t: float,
    states: np.ndarray,
    c: float,
    target: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Time derivative of all node states (t is unused: the network is autonomous)"""
    check_state(states)
    derivative = spec.model.evaluate(states)

    coupling = np.zeros_like(states)
    for layer in spec.layers:
        coupling += layer.g.m @ (states * layer.gamma)

    if spec.pinning is not None:
        if target is None:
            raise InvalidInput("Pinned network needs the current target state")
        offset = states - target
        for gains, layer in zip(spec.pinning.gains, spec.layers):
            coupling -= gains[:, None] * (offset * layer.gamma)

    return derivative + c * coupling
