from typing import Callable

import numpy as np

from src.errors import InvalidInput

RHS = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(f: RHS, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step"""
    if not dt > 0.0:
        raise InvalidInput(f"Step size must be positive, got {dt}")
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(f: RHS, y0: np.ndarray, dt: float, n_steps: int) -> np.ndarray:
    """Fixed-step integration returning the state after n_steps"""
    y = np.asarray(y0, dtype=np.float64)
    for k in range(n_steps):
        y = rk4_step(f, k * dt, y, dt)
    return y
