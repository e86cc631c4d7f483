"""Flow-matching regression losses for instantaneous and average-velocity
networks, plus the gradient-stopped average-velocity target."""

from __future__ import annotations

import numpy as np

from .. import numkit as nk
from ..netlib.mlp import INSTANTANEOUS, MEANFLOW, VectorFieldNet
from ..numkit import Rng, Tensor
from .paths import ot_interpolate

T_EPS = 1e-3  # times are sampled away from t=0 where the path degenerates


def sample_times(rng: Rng, batch: int, lo: float = T_EPS, hi: float = 1.0):
    return rng.uniform(lo, hi, batch)


def sample_time_pairs(rng: Rng, batch: int, lo: float = T_EPS,
                      hi: float = 1.0):
    """(zeta, t) with zeta < t almost surely; ties are nudged apart."""
    u = rng.uniform(lo, hi, (2, batch))
    zeta = np.minimum(u[0], u[1])
    t = np.maximum(u[0], u[1])
    t = np.where(t <= zeta, np.minimum(zeta + 1e-9, hi), t)
    zeta = np.where(t <= zeta, t - 1e-9, zeta)
    return zeta, t


def weighted_field_regression(u: Tensor, target_mean: np.ndarray,
                              target_sqnorm: np.ndarray) -> Tensor:
    """mean_b sum_i w_i ||u_b - c_{b,i}||^2 in expanded form.

    Needs only the weighted candidate mean (B, d) and the weighted mean of
    squared candidate norms (B,); the expansion is exact, not an
    approximation, and keeps the tape free of the candidate axis.
    """
    sq = nk.tsum(u * u, axis=1)
    cross = nk.tsum(u * Tensor(target_mean), axis=1)
    per_row = sq - 2.0 * cross + Tensor(target_sqnorm)
    return nk.tmean(per_row)


def cfm_loss(net: VectorFieldNet, s: np.ndarray, a1: np.ndarray,
             rng: Rng) -> Tensor:
    """Conditional flow-matching loss on the straight path.

    Draws t ~ U[eps, 1] and a0 ~ N(0, I) per row and regresses the network
    velocity at a_t onto a1 - a0.
    """
    if net.mode != INSTANTANEOUS:
        raise ValueError("cfm_loss needs an instantaneous-mode net")
    a1 = np.asarray(a1, dtype=np.float64)
    batch = a1.shape[0]
    a0 = rng.standard_normal(a1.shape)
    t = sample_times(rng, batch)
    a_t, u_cond = ot_interpolate(a0, a1, t)
    u = net.forward_field(Tensor(a_t), t, Tensor(np.asarray(s)))
    diff = u - Tensor(u_cond)
    return nk.tmean(nk.tsum(diff * diff, axis=1))


def meanflow_target(net: VectorFieldNet, a_t, zeta, t, s,
                    u_cond) -> np.ndarray:
    """Bootstrap regression target for the average-velocity network.

    u_cond - (t - zeta) * (d/da ubar . u_cond + d/dt ubar), computed with a
    single forward-mode pass using tangents (u_cond, 1) on (a, t) and 0 on
    zeta.  Returned as a plain array, i.e. already gradient-stopped.
    """
    if net.mode != MEANFLOW:
        raise ValueError("meanflow_target needs a meanflow-mode net")
    a_t = np.asarray(a_t, dtype=np.float64)
    batch = a_t.shape[0]
    t = np.asarray(t, dtype=np.float64)
    if t.ndim == 0:
        t = np.full(batch, float(t))
    zeta = np.asarray(zeta, dtype=np.float64)
    if zeta.ndim == 0:
        zeta = np.full(batch, float(zeta))
    u_cond = np.asarray(u_cond, dtype=np.float64)
    _, total_deriv = net.avg_velocity_jvp(a_t, u_cond, zeta, t,
                                          np.ones(batch), s)
    return u_cond - (t - zeta)[:, None] * total_deriv


def meanflow_loss(net: VectorFieldNet, s: np.ndarray, a1: np.ndarray,
                  rng: Rng) -> Tensor:
    """Average-velocity matching loss with the gradient-stopped target."""
    if net.mode != MEANFLOW:
        raise ValueError("meanflow_loss needs a meanflow-mode net")
    a1 = np.asarray(a1, dtype=np.float64)
    batch = a1.shape[0]
    a0 = rng.standard_normal(a1.shape)
    zeta, t = sample_time_pairs(rng, batch)
    a_t, u_cond = ot_interpolate(a0, a1, t)
    tgt = meanflow_target(net, a_t, zeta, t, s, u_cond)
    u = net.forward_field(Tensor(a_t), t, Tensor(np.asarray(s)), zeta=zeta)
    diff = u - Tensor(tgt)
    return nk.tmean(nk.tsum(diff * diff, axis=1))
