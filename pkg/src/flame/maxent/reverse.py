"""Reverse sampling of terminal-action candidates and their SNIS weights.

Given an intermediate point a_t on the straight path, terminal candidates
are drawn from the Gaussian reverse kernel with mean a_t/t and per-axis
std (1-t)/t.  The kernel noise is truncated so every candidate lands inside
the action box, and the matching base point a0 is recovered algebraically,
so the triple (a0, a_t, a1) always sits exactly on one path.

Candidate scores exp(Q/alpha) are normalized with the log-sum-exp softmax,
so arbitrarily large Q magnitudes cannot overflow.
"""

from __future__ import annotations

import numpy as np

from ..numkit import Rng, logsumexp
from ..numkit.stats import _standard_truncnorm

T_LO = 1e-3   # reverse kernel has 1/t factors
T_HI = 1.0 - 1e-3  # a0 recovery divides by 1-t


def reverse_sample_candidates(a_t, t, k: int, lo, hi, rng: Rng):
    """K bounded terminal candidates per row and their recovered base points.

    Returns (a1, a0) of shape (B, K, d) satisfying lo <= a1 <= hi and
    t*a1 + (1-t)*a0 == a_t exactly.
    """
    a_t = np.asarray(a_t, dtype=np.float64)
    batch, d = a_t.shape
    t = np.asarray(t, dtype=np.float64)
    if t.ndim == 0:
        t = np.full(batch, float(t))
    if np.any((t < T_LO) | (t > T_HI)):
        raise ValueError(f"reverse sampling needs t in [{T_LO}, {T_HI}]")
    if k < 1:
        raise ValueError("need at least one candidate")
    lo = np.broadcast_to(np.asarray(lo, dtype=np.float64), (d,))
    hi = np.broadcast_to(np.asarray(hi, dtype=np.float64), (d,))

    tt = t[:, None, None]
    # standard-normal noise window that maps the kernel into [lo, hi]
    z_lo = (tt * lo[None, None, :] - a_t[:, None, :]) / (1.0 - tt)
    z_hi = (tt * hi[None, None, :] - a_t[:, None, :]) / (1.0 - tt)
    shape = (batch, k, d)
    z = _standard_truncnorm(np.broadcast_to(z_lo, shape),
                            np.broadcast_to(z_hi, shape),
                            rng.random(shape))
    a1 = a_t[:, None, :] / tt + (1.0 - tt) / tt * z
    a1 = np.clip(a1, lo[None, None, :], hi[None, None, :])
    a0 = (a_t[:, None, :] - tt * a1) / (1.0 - tt)
    return a1, a0


def _time_axes(t):
    """t as (broadcast-over-coords, broadcast-over-rows) views."""
    t = np.asarray(t, dtype=np.float64)
    return (t, t) if t.ndim == 0 else (t[:, None], t)


def reverse_kernel_log_density(a1, a_t, t) -> np.ndarray:
    """log of the (untruncated) reverse kernel N(a1; a_t/t, ((1-t)/t)^2 I)."""
    a1 = np.asarray(a1, dtype=np.float64)
    a_t = np.asarray(a_t, dtype=np.float64)
    d = a1.shape[-1]
    t_c, t_r = _time_axes(t)
    resid = (a1 - a_t / t_c) / ((1.0 - t_c) / t_c)
    return (-0.5 * np.sum(resid ** 2, axis=-1)
            - d * np.log((1.0 - t_r) / t_r)
            - 0.5 * d * np.log(2.0 * np.pi))


def forward_kernel_log_density(a_t, a1, t) -> np.ndarray:
    """log of the path kernel N(a_t; t*a1, (1-t)^2 I)."""
    a_t = np.asarray(a_t, dtype=np.float64)
    a1 = np.asarray(a1, dtype=np.float64)
    d = a_t.shape[-1]
    t_c, t_r = _time_axes(t)
    resid = (a_t - t_c * a1) / (1.0 - t_c)
    return (-0.5 * np.sum(resid ** 2, axis=-1)
            - d * np.log(1.0 - t_r) - 0.5 * d * np.log(2.0 * np.pi))


def snis_weights(q_values, alpha: float) -> np.ndarray:
    """Self-normalized importance weights softmax(Q/alpha) over the last axis.

    The result sums to 1 along the candidate axis with every weight in
    (0, 1]; adding a constant to Q or scaling (Q, alpha) jointly leaves the
    weights unchanged.
    """
    q = np.asarray(q_values, dtype=np.float64)
    if q.shape[-1] < 1:
        raise ValueError("need at least one candidate")
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    if not np.all(np.isfinite(q)):
        bad = int(np.sum(~np.isfinite(q)))
        raise FloatingPointError(
            f"{bad}/{q.size} candidate Q-values are non-finite")
    logits = q / alpha
    if q.ndim == 1:
        return np.exp(logits - logsumexp(logits))
    return np.exp(logits - logsumexp(logits, axis=-1)[..., None])


def proposal_sample(kind: str, s, t, policy_old, lo, hi, rng: Rng,
                    n_gen: int = 1) -> np.ndarray:
    """Draw intermediate points a_t from the proposal distribution.

    ``uniform_box`` ignores the policy; ``last_policy`` pushes a terminal
    sample of the frozen policy copy back to time t along the straight path.
    """
    s = np.asarray(s, dtype=np.float64)
    batch = s.shape[0]
    if kind == "uniform_box":
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        return rng.uniform(0.0, 1.0, (batch, lo.size)) * (hi - lo) + lo
    if kind == "last_policy":
        if policy_old is None:
            raise ValueError("last_policy proposal needs a frozen policy")
        from ..flowcore import sample_actions
        d = np.asarray(lo).size
        a0 = rng.standard_normal((batch, d))
        a1 = sample_actions(policy_old, a0, s, n_gen)
        a0_mix = rng.standard_normal((batch, d))
        t = np.asarray(t, dtype=np.float64)
        if t.ndim == 1:
            t = t[:, None]
        return t * a1 + (1.0 - t) * a0_mix
    raise ValueError(f"unknown proposal kind {kind!r}")
