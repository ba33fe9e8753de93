"""Fixed-step simulation of multi-weighted networks.

The integrated state is one flat vector: all node states row-major, then
the pinning target (when pinning), then the coupling strength (when
adaptive). Network and target therefore share the same discretization.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from src.errors import Diverged, InvalidInput, NonFiniteState, ShapeMismatch
from src.dynamics.integrator import rk4_step
from src.dynamics.network import (
    NetworkSpec,
    adaptive_gain_rhs,
    lyapunov_V,
    lyapunov_W,
    network_rhs,
)
from src.network.spectral import WeightVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)  # (records, N, dim)
    V: np.ndarray = field(repr=False)  # V for plain coupling, W when pinned
    c_of_t: np.ndarray = field(repr=False)
    target: Optional[np.ndarray] = field(default=None, repr=False)
    theta: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def error_label(self) -> str:
        return "W" if self.target is not None else "V"

    @property
    def n_records(self) -> int:
        return int(self.times.shape[0])

    def time_to_threshold(self, threshold: float) -> Optional[float]:
        """First recorded time from which the error stays at or below threshold"""
        above = np.flatnonzero(self.V > threshold)
        if above.size == 0:
            return float(self.times[0])
        last = int(above[-1])
        if last + 1 >= self.n_records:
            return None
        return float(self.times[last + 1])


def step_count(dt: float, t_end: float) -> int:
    if not dt > 0.0 or not t_end > 0.0:
        raise InvalidInput(f"dt and t_end must be positive, got dt={dt}, t_end={t_end}")
    return int(math.floor(t_end / dt + 1e-9))


def record_count(dt: float, t_end: float, record_every: int) -> int:
    return step_count(dt, t_end) // record_every + 1


def random_initial_states(
    n: int, dim: int, seed: int, low: float = -5.0, high: float = 5.0, with_target: bool = False
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Uniform draws from a PCG64 stream: node states first, then the target"""
    rng = np.random.Generator(np.random.PCG64(seed))
    states = rng.uniform(low, high, size=(n, dim))
    target = rng.uniform(low, high, size=dim) if with_target else None
    return states, target


def _unpack(spec: NetworkSpec, y: np.ndarray):
    n, dim = spec.n_nodes, spec.dim
    size = n * dim
    states = y[:size].reshape(n, dim)
    offset = size
    target = None
    if spec.pinning is not None:
        target = y[offset : offset + dim]
        offset += dim
    c = y[offset] if spec.adaptive else spec.coupling.c
    return states, target, c


def _pack(spec: NetworkSpec, states, target, c) -> np.ndarray:
    parts = [np.asarray(states, dtype=np.float64).reshape(-1)]
    if spec.pinning is not None:
        parts.append(np.asarray(target, dtype=np.float64))
    if spec.adaptive:
        parts.append(np.array([c], dtype=np.float64))
    return np.concatenate(parts)


def augmented_rhs(spec: NetworkSpec, theta: WeightVector):
    """Closure f(t, y) over the flat augmented state"""

    def f(t: float, y: np.ndarray) -> np.ndarray:
        states, target, c = _unpack(spec, y)
        derivative = network_rhs(spec, t, states, c, target)
        target_derivative = spec.model.evaluate(target) if target is not None else None
        gain_derivative = (
            adaptive_gain_rhs(spec.coupling.beta, theta, states, target)
            if spec.adaptive
            else None
        )
        return _pack(spec, derivative, target_derivative, gain_derivative)

    return f


def simulate(
    spec: NetworkSpec,
    theta: WeightVector,
    init: np.ndarray,
    dt: float = 1e-3,
    t_end: float = 10.0,
    record_every: int = 10,
) -> Trajectory:
    """Integrate the network with RK4 and record every record_every steps"""
    n_steps = step_count(dt, t_end)
    if record_every < 1:
        raise InvalidInput(f"record_every must be at least 1, got {record_every}")
    init = np.asarray(init, dtype=np.float64)
    if init.shape != (spec.n_nodes, spec.dim):
        raise ShapeMismatch(
            f"Initial states have shape {init.shape}, expected {(spec.n_nodes, spec.dim)}"
        )
    if theta.n != spec.n_nodes:
        raise ShapeMismatch(f"Weight vector has length {theta.n}, expected {spec.n_nodes}")
    if not np.all(np.isfinite(init)):
        raise InvalidInput("Initial states must be finite")

    target0 = spec.pinning.target_init if spec.pinning is not None else None
    c0 = spec.coupling.c0 if spec.adaptive else spec.coupling.c
    y = _pack(spec, init, target0, c0)
    f = augmented_rhs(spec, theta)

    n_records = n_steps // record_every + 1
    times = np.empty(n_records)
    states_out = np.empty((n_records, spec.n_nodes, spec.dim))
    errors = np.empty(n_records)
    strengths = np.empty(n_records)
    targets = np.empty((n_records, spec.dim)) if target0 is not None else None

    def record(slot: int, step: int) -> None:
        states, target, c = _unpack(spec, y)
        times[slot] = step * dt
        states_out[slot] = states
        strengths[slot] = c
        if target is not None:
            targets[slot] = target
            errors[slot] = lyapunov_W(theta, states, target)
        else:
            errors[slot] = lyapunov_V(theta, states)

    logger.info(
        f"Simulating {spec.n_nodes} nodes x {len(spec.layers)} layers, "
        f"{n_steps} steps of dt={dt}"
    )
    record(0, 0)
    for step in range(1, n_steps + 1):
        try:
            y = rk4_step(f, (step - 1) * dt, y, dt)
            if not np.all(np.isfinite(y)):
                raise NonFiniteState("Non-finite value after integration step")
        except NonFiniteState as e:
            t_fail = (step - 1) * dt
            logger.error(f"Simulation diverged at t={t_fail}: {str(e)}")
            raise Diverged(t_fail, str(e)) from e
        if step % record_every == 0:
            record(step // record_every, step)

    logger.info(f"Simulation finished: final error {errors[-1]:.3e}, c={strengths[-1]:.6g}")
    return Trajectory(
        times=times,
        states=states_out,
        V=errors,
        c_of_t=strengths,
        target=targets,
        theta=theta.v.copy(),
    )
