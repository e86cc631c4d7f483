"""Explicit Euler transport of actions along learned velocity fields."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..netlib.mlp import INSTANTANEOUS, MEANFLOW


class FlowIntegrationError(RuntimeError):
    """Raised when the integration state stops being finite."""


@dataclass(frozen=True)
class IntegrationSchedule:
    """Strictly increasing time grid from 0 to 1."""

    times: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        object.__setattr__(self, "times", times)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("schedule needs at least one step")
        if times[0] != 0.0 or times[-1] != 1.0:
            raise ValueError("schedule must start at 0 and end at 1")
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("schedule times must be strictly increasing")

    @classmethod
    def uniform(cls, n_steps: int) -> "IntegrationSchedule":
        if n_steps < 1:
            raise ValueError("need at least one step")
        return cls(np.linspace(0.0, 1.0, n_steps + 1))

    @property
    def n_steps(self) -> int:
        return self.times.size - 1


def _check_state(a: np.ndarray, step: int, t: float):
    if not np.all(np.isfinite(a)):
        bad = int(np.sum(~np.isfinite(a).all(axis=-1)))
        raise FlowIntegrationError(
            f"non-finite state after step {step} (t={t:.6g}); "
            f"{bad}/{a.shape[0]} rows affected")


def integrate_flow(field, a0, s, schedule: IntegrationSchedule) -> np.ndarray:
    """Euler transport a0 -> a1 under an instantaneous velocity field."""
    if field.mode != INSTANTANEOUS:
        raise ValueError("integrate_flow needs an instantaneous field")
    a = np.array(a0, dtype=np.float64)
    times = schedule.times
    for k in range(schedule.n_steps):
        dt = times[k + 1] - times[k]
        a = a + dt * field.velocity_array(a, times[k], s)
        _check_state(a, k, times[k + 1])
    return a


def integrate_mean_flow(field, a0, s, schedule: IntegrationSchedule) -> np.ndarray:
    """Euler transport using the interval-averaged velocity per substep.

    One step with the [0, 1] average velocity is exact one-step generation.
    """
    if field.mode != MEANFLOW:
        raise ValueError("integrate_mean_flow needs a meanflow field")
    a = np.array(a0, dtype=np.float64)
    times = schedule.times
    for k in range(schedule.n_steps):
        dt = times[k + 1] - times[k]
        a = a + dt * field.avg_velocity_array(a, times[k], times[k + 1], s)
        _check_state(a, k, times[k + 1])
    return a


def sample_actions(field, a0, s, n_steps: int) -> np.ndarray:
    """Draw terminal actions with a uniform grid, dispatching on field mode."""
    schedule = IntegrationSchedule.uniform(n_steps)
    if field.mode == MEANFLOW:
        return integrate_mean_flow(field, a0, s, schedule)
    return integrate_flow(field, a0, s, schedule)
