"""Optimal-transport probability path: straight interpolants from a
standard-normal base, and the conditional velocity they induce."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numkit import Rng


def ot_interpolate(a0, a1, t):
    """Linear path point and conditional velocity.

    a_t = t*a1 + (1-t)*a0 and u_cond = a1 - a0; ``t`` may be a scalar or a
    per-row vector.
    """
    a0 = np.asarray(a0, dtype=np.float64)
    a1 = np.asarray(a1, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if t.ndim == 1:
        t = t[:, None]
    a_t = t * a1 + (1.0 - t) * a0
    return a_t, a1 - a0


@dataclass(frozen=True)
class OtPath:
    """Action-space path with base p0 = N(0, I) on R^d."""

    d: int

    def sample_base(self, rng: Rng, n: int) -> np.ndarray:
        return rng.standard_normal((n, self.d))

    def interpolate(self, a0, a1, t):
        return ot_interpolate(a0, a1, t)
