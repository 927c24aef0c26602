"""Synthetic dynamical systems used to validate the pipeline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signal import TimeSeries


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0
    dt: float = 0.01
    n_steps: int = 3000
    initial: tuple[float, float, float] = (1.0, 1.0, 1.0)
    transient: int = 1000

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.transient < 0:
            raise ValueError(f"transient must be >= 0, got {self.transient}")
        if len(self.initial) != 3:
            raise ValueError("initial must have three components")


class IntegrationError(ArithmeticError):
    """Raised when the integrated state stops being finite."""


def lorenz_rhs(state: np.ndarray, sigma: float, rho: float, beta: float) -> np.ndarray:
    x, y, z = state
    return np.array([sigma * (y - x), x * (rho - z) - y, x * y - beta * z])


def rk4_step(state, dt, sigma, rho, beta):
    """Advance one classical Runge-Kutta step."""
    k1 = lorenz_rhs(state, sigma, rho, beta)
    k2 = lorenz_rhs(state + 0.5 * dt * k1, sigma, rho, beta)
    k3 = lorenz_rhs(state + 0.5 * dt * k2, sigma, rho, beta)
    k4 = lorenz_rhs(state + dt * k3, sigma, rho, beta)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def lorenz_trajectory(params: LorenzParams) -> np.ndarray:
    """Integrate the Lorenz system and return an ``(n_steps, 3)`` array.

    The first ``params.transient`` steps are integrated and dropped; the
    initial condition itself is never recorded unless ``transient == 0``.
    """
    state = np.asarray(params.initial, dtype=float)
    out = np.empty((params.n_steps, 3))
    total = params.transient + params.n_steps
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(total):
            if step >= params.transient:
                out[step - params.transient] = state
            state = rk4_step(state, params.dt, params.sigma, params.rho, params.beta)
            if not np.all(np.isfinite(state)):
                raise IntegrationError(f"non-finite Lorenz state at step {step + 1}")
    return out


def lorenz(params: LorenzParams | None = None) -> tuple[TimeSeries, TimeSeries, TimeSeries]:
    """Return the x, y and z components as separate series."""
    params = params or LorenzParams()
    traj = lorenz_trajectory(params)
    return tuple(TimeSeries(traj[:, k].copy(), sample_interval=params.dt) for k in range(3))
