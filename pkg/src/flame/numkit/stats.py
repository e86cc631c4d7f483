"""Elementary probability utilities: logsumexp and truncated-normal sampling.

The truncated-normal sampler is inverse-CDF based and works in log space,
so it stays exact when the truncation window sits many standard deviations
into a tail (where rejection sampling would stall and naive CDF arithmetic
would cancel to zero).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, ndtri_exp

from .random import Rng


def logsumexp(q, axis=None):
    """log(sum(exp(q))), shift-invariant so huge magnitudes cannot overflow."""
    q = np.asarray(q, dtype=np.float64)
    if q.size == 0:
        raise ValueError("logsumexp of an empty array")
    hi = np.max(q, axis=axis, keepdims=True)
    hi = np.where(np.isfinite(hi), hi, 0.0)
    out = np.log(np.sum(np.exp(q - hi), axis=axis, keepdims=True)) + hi
    if axis is None:
        return out.item()
    return np.squeeze(out, axis=axis)


def gaussian_log_density(x, axis=-1):
    """log N(x; 0, I) summed over the coordinate axis."""
    x = np.asarray(x, dtype=np.float64)
    d = x.shape[axis] if x.ndim else 1
    return -0.5 * d * np.log(2.0 * np.pi) - 0.5 * np.sum(x * x, axis=axis)


@dataclass(frozen=True)
class TruncatedNormalSpec:
    """N(mean, std^2) conditioned elementwise on [lo, hi]."""

    mean: np.ndarray
    std: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        for name in ("mean", "std", "lo", "hi"):
            object.__setattr__(self, name,
                               np.asarray(getattr(self, name), dtype=np.float64))
        if np.any(self.std <= 0):
            raise ValueError("std must be positive")
        if np.any(self.lo >= self.hi):
            raise ValueError("need lo < hi elementwise")


def _standard_truncnorm_left(alpha, beta, u):
    # Phi^-1((1-u)*Phi(alpha) + u*Phi(beta)) evaluated in log space.
    with np.errstate(divide="ignore"):
        la = log_ndtr(alpha)
        lb = log_ndtr(beta)
        log_p = np.logaddexp(np.log1p(-u) + la, np.log(u) + lb)
    return ndtri_exp(log_p)


def _standard_truncnorm(alpha, beta, u):
    """Inverse-CDF draw of N(0,1) | [alpha, beta], u ~ U[0,1)."""
    # log_ndtr is accurate in the left tail; mirror right-tail windows.
    mirror = alpha > 0.0
    a = np.where(mirror, -beta, alpha)
    b = np.where(mirror, -alpha, beta)
    z = _standard_truncnorm_left(a, b, u)
    z = np.where(mirror, -z, z)
    return np.clip(z, alpha, beta)


def sample_truncated_normal(spec: TruncatedNormalSpec, rng: Rng, size=None):
    """Draw from the spec's distribution; ``size`` prepends sample dimensions."""
    shape = np.broadcast_shapes(spec.mean.shape, spec.std.shape,
                                spec.lo.shape, spec.hi.shape)
    if size is not None:
        if np.isscalar(size):
            size = (size,)
        shape = tuple(size) + shape
    alpha = (spec.lo - spec.mean) / spec.std
    beta = (spec.hi - spec.mean) / spec.std
    u = rng.random(shape)
    z = _standard_truncnorm(np.broadcast_to(alpha, shape),
                            np.broadcast_to(beta, shape), u)
    return spec.mean + spec.std * z


def truncated_normal(mean, std, lo, hi, rng: Rng, size=None):
    return sample_truncated_normal(
        TruncatedNormalSpec(np.asarray(mean), np.asarray(std),
                            np.asarray(lo), np.asarray(hi)), rng, size)
