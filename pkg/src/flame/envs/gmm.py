"""2-D Gaussian-mixture density benchmark with analytic log-density.

Four symmetric modes at (+-1, +-1), sigma = 0.5, uniform weights.  Serves
as supervised training data for flow policies and as the ground truth for
log-likelihood estimation error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..numkit import Rng, logsumexp

_MODES = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])


@dataclass(frozen=True)
class Gmm2d:
    modes: np.ndarray = field(default_factory=lambda: _MODES.copy())
    sigma: float = 0.5

    @property
    def n_modes(self) -> int:
        return self.modes.shape[0]

    def log_density(self, x) -> np.ndarray:
        """Log of the mixture density; accepts (2,) or (n, 2)."""
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        pts = x[None, :] if single else x
        d2 = np.sum((pts[:, None, :] - self.modes[None, :, :]) ** 2, axis=-1)
        comp = (-d2 / (2.0 * self.sigma ** 2)
                - np.log(2.0 * np.pi * self.sigma ** 2)
                - np.log(self.n_modes))
        out = logsumexp(comp, axis=1)
        return out[0] if single else out

    def sample(self, rng: Rng, n: int) -> np.ndarray:
        idx = rng.integers(0, self.n_modes, n)
        return self.modes[idx] + self.sigma * rng.standard_normal((n, 2))

    def grid_integral(self, extent: float = 4.0, resolution: int = 400):
        """Quadrature of the density over [-extent, extent]^2 (sanity check)."""
        xs = np.linspace(-extent, extent, resolution)
        xx, yy = np.meshgrid(xs, xs)
        pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
        dens = np.exp(self.log_density(pts)).reshape(resolution, resolution)
        cell = (2.0 * extent / (resolution - 1)) ** 2
        return float(np.sum(dens) * cell)


def gmm_log_density(x) -> np.ndarray:
    return Gmm2d().log_density(x)
