"""One-dimensional soft bandit with a closed-form optimal stochastic policy.

The action value is a fixed bimodal bump function, so the entropy-regularized
optimum exp(Q/alpha)/Z is computable to quadrature accuracy on a grid.  This
gives an exact target distribution for checking that Q-reweighted actor
training actually converges to the Boltzmann policy rather than to a mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SoftBandit:
    centers: tuple = (0.5, -0.5)
    width2: float = 0.02
    action_lo: float = -1.0
    action_hi: float = 1.0

    state_dim = 1
    action_dim = 1

    def state(self) -> np.ndarray:
        return np.zeros(1)

    def q_values(self, actions) -> np.ndarray:
        """Q(a) for actions of shape (...,) or (..., 1)."""
        a = np.asarray(actions, dtype=np.float64)
        if a.ndim and a.shape[-1] == 1:
            a = a[..., 0]
        q = np.zeros_like(a, dtype=np.float64)
        for c in self.centers:
            q = q + np.exp(-((a - c) ** 2) / self.width2)
        return q


@dataclass(frozen=True)
class BanditOracle:
    """exp(Q/alpha)/Z discretized on a uniform action grid."""

    grid: np.ndarray
    pdf: np.ndarray
    alpha: float

    def cdf(self) -> np.ndarray:
        # trapezoid cumulative mass, pinned to end exactly at 1
        h = np.diff(self.grid)
        seg = 0.5 * h * (self.pdf[1:] + self.pdf[:-1])
        c = np.concatenate([[0.0], np.cumsum(seg)])
        return c / c[-1]

    def entropy(self) -> float:
        p = np.maximum(self.pdf, 1e-300)
        return float(-np.trapezoid(p * np.log(p), self.grid))


def soft_bandit_oracle(bandit: SoftBandit, alpha: float,
                       grid_n: int = 2001) -> BanditOracle:
    """Quadrature-normalized Boltzmann policy over the action interval."""
    if grid_n < 1000:
        raise ValueError("use at least 1000 grid points")
    grid = np.linspace(bandit.action_lo, bandit.action_hi, grid_n)
    logits = bandit.q_values(grid) / alpha
    logits -= logits.max()
    unnorm = np.exp(logits)
    z = np.trapezoid(unnorm, grid)
    return BanditOracle(grid=grid, pdf=unnorm / z, alpha=alpha)


def wasserstein1_to_oracle(samples, oracle: BanditOracle) -> float:
    """W1 between an empirical sample set and the oracle density.

    Computed as the integral of |F_emp - F_oracle| over the action interval
    (the 1-D optimal-transport identity).
    """
    s = np.sort(np.asarray(samples, dtype=np.float64).reshape(-1))
    s = np.clip(s, oracle.grid[0], oracle.grid[-1])
    emp_cdf = np.searchsorted(s, oracle.grid, side="right") / s.size
    return float(np.trapezoid(np.abs(emp_cdf - oracle.cdf()), oracle.grid))
