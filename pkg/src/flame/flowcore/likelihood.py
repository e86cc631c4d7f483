"""Log-likelihoods of flow-generated actions via the augmented ODE.

The action and its accumulated log-density change are co-integrated with
explicit Euler; each substep subtracts dt times the divergence of the field
at the current point.  The divergence is either the exact trace (d
directional-derivative passes) or Hutchinson's estimator with Rademacher
probes.  For average-velocity fields the substep uses the local average
velocity over [t_k, t_{k+1}] and differentiates it in the action argument
only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..netlib.mlp import INSTANTANEOUS, MEANFLOW
from ..numkit import Rng, gaussian_log_density
from .integrate import FlowIntegrationError, IntegrationSchedule, _check_state


@dataclass(frozen=True)
class Divergence:
    """Trace mode: exact, or Hutchinson with a fixed probe count."""

    kind: str
    probes: int = 1

    def __post_init__(self):
        if self.kind not in ("exact", "hutchinson"):
            raise ValueError(f"unknown divergence kind {self.kind!r}")
        if self.probes < 1:
            raise ValueError("need at least one probe")

    @classmethod
    def exact(cls) -> "Divergence":
        return cls("exact")

    @classmethod
    def hutchinson(cls, probes: int = 1) -> "Divergence":
        return cls("hutchinson", probes)

    def describe(self) -> str:
        return ("exact" if self.kind == "exact"
                else f"hutchinson({self.probes})")


@dataclass(frozen=True)
class LogProbResult:
    a1: np.ndarray
    log_prob: np.ndarray
    divergence_mode: str


def _field_jvp(field, a, da, t, s, zeta):
    zero_dt = np.zeros(a.shape[0])
    if zeta is None:
        return field.velocity_jvp(a, da, t, zero_dt, s)
    return field.avg_velocity_jvp(a, da, zeta, t, zero_dt, s)


def velocity_and_divergence(field, a, t, s, zeta=None,
                            mode: Divergence = Divergence.exact(),
                            rng: Rng | None = None):
    """Field value and its action-space divergence at (a, t[, zeta])."""
    a = np.asarray(a, dtype=np.float64)
    batch, d = a.shape
    if mode.kind == "exact":
        div = np.zeros(batch)
        u = None
        for i in range(d):
            da = np.zeros_like(a)
            da[:, i] = 1.0
            u, du = _field_jvp(field, a, da, t, s, zeta)
            div += du[:, i]
        return u, div
    if rng is None:
        raise ValueError("hutchinson divergence needs an rng")
    div = np.zeros(batch)
    u = None
    for _ in range(mode.probes):
        v = rng.rademacher(a.shape)
        u, du = _field_jvp(field, a, v, t, s, zeta)
        div += np.sum(v * du, axis=1)
    return u, div / mode.probes


def divergence(field, a, t, s, zeta=None,
               mode: Divergence = Divergence.exact(),
               rng: Rng | None = None) -> np.ndarray:
    return velocity_and_divergence(field, a, t, s, zeta, mode, rng)[1]


def log_prob_augmented(field, a0, s, schedule: IntegrationSchedule,
                       mode: Divergence = Divergence.exact(),
                       rng: Rng | None = None) -> LogProbResult:
    """Terminal action and log-density from the stored base sample a0.

    ell starts at log N(a0; 0, I) and accumulates -dt * div along the same
    Euler trajectory the samplers follow, so the terminal point here is
    bit-identical to ``integrate_flow``/``integrate_mean_flow`` on the same
    schedule.
    """
    a = np.array(a0, dtype=np.float64)
    ell = gaussian_log_density(a)
    times = schedule.times
    meanflow = field.mode == MEANFLOW
    if not meanflow and field.mode != INSTANTANEOUS:
        raise ValueError(f"unknown field mode {field.mode!r}")
    for k in range(schedule.n_steps):
        t0, t1 = times[k], times[k + 1]
        dt = t1 - t0
        zeta = t0 if meanflow else None
        t_arg = t1 if meanflow else t0
        u, div = velocity_and_divergence(field, a, t_arg, s, zeta=zeta,
                                         mode=mode, rng=rng)
        a = a + dt * u
        ell = ell - dt * div
        _check_state(a, k, t1)
    if not np.all(np.isfinite(ell)):
        raise FlowIntegrationError("non-finite log-density accumulator")
    return LogProbResult(a1=a, log_prob=ell, divergence_mode=mode.describe())
