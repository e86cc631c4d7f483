"""Analytic fields with closed-form Jacobians.

Used for estimator diagnostics where the ground truth is computable:
Euler maps of linear fields are matrix powers and their log-determinants
are exact, so discretization-bias claims can be checked against linear
algebra instead of another estimator.
"""

from __future__ import annotations

import numpy as np

from ..netlib.mlp import INSTANTANEOUS, MEANFLOW


class LinearInstantaneousField:
    """u(a, t, s) = a @ A^T + c, independent of t and s."""

    mode = INSTANTANEOUS

    def __init__(self, matrix, offset=None):
        self.matrix = np.asarray(matrix, dtype=np.float64)
        d = self.matrix.shape[0]
        self.offset = (np.zeros(d) if offset is None
                       else np.asarray(offset, dtype=np.float64))

    def velocity_array(self, a, t, s):
        return np.asarray(a) @ self.matrix.T + self.offset

    def velocity_jvp(self, a, da, t, dt, s):
        return self.velocity_array(a, t, s), np.asarray(da) @ self.matrix.T


class LinearAverageField:
    """ubar(a, zeta, t, s) = a @ A^T, independent of the interval and state."""

    mode = MEANFLOW

    def __init__(self, matrix):
        self.matrix = np.asarray(matrix, dtype=np.float64)

    def avg_velocity_array(self, a, zeta, t, s):
        return np.asarray(a) @ self.matrix.T

    def avg_velocity_jvp(self, a, da, zeta, t, dt, s):
        return self.avg_velocity_array(a, zeta, t, s), \
            np.asarray(da) @ self.matrix.T


class ConstantField:
    """u(a, t, s) = c everywhere; divergence-free by construction."""

    mode = INSTANTANEOUS

    def __init__(self, value):
        self.value = np.asarray(value, dtype=np.float64)

    def velocity_array(self, a, t, s):
        return np.broadcast_to(self.value, np.asarray(a).shape).copy()

    def velocity_jvp(self, a, da, t, dt, s):
        return self.velocity_array(a, t, s), np.zeros_like(np.asarray(a))
