"""Trained-flow behavior on the analytic mixture benchmark.

These exercise the full training pipelines (slow: each fixture trains a
flow for 10k iterations) and check the qualitative claims that make the
density benchmark useful: losses fall, one-step mean-flow samples match the
target, and likelihood-estimation error decays with integration steps.
"""

import numpy as np
import pytest

from flame import numkit as nk
from flame.flowcore import IntegrationSchedule, integrate_flow, integrate_mean_flow
from flame.harness import loglik_mse_table


def energy_distance(x, y, rng, pairs=2000):
    """Unbiased-ish energy distance between two point sets (subsampled)."""
    def draw(a, n):
        idx = rng.integers(0, a.shape[0], n)
        return a[idx]

    x1, x2 = draw(x, pairs), draw(x, pairs)
    y1, y2 = draw(y, pairs), draw(y, pairs)
    dxy = np.linalg.norm(draw(x, pairs) - draw(y, pairs), axis=1).mean()
    dxx = np.linalg.norm(x1 - x2, axis=1).mean()
    dyy = np.linalg.norm(y1 - y2, axis=1).mean()
    return 2.0 * dxy - dxx - dyy


class TestCfmOnGmm:
    def test_loss_drops_well_below_initialization(self, gmm_cfm_trained):
        losses = gmm_cfm_trained["losses"]
        start = losses[:100].mean()
        end = losses[-100:].mean()
        assert end < 0.5 * start

    def test_samples_cover_all_modes(self, gmm_cfm_trained):
        net = gmm_cfm_trained["net"]
        gmm = gmm_cfm_trained["gmm"]
        rng = nk.Rng(7)
        a0 = rng.standard_normal((2000, 2))
        a1 = integrate_flow(net, a0, np.zeros((2000, 1)),
                            IntegrationSchedule.uniform(50))
        from flame.envs import mode_coverage
        frac, _ = mode_coverage(a1, gmm.modes, radius=0.75)
        assert np.all(frac > 0.1)

    def test_loglik_mse_decays_with_integration_steps(self, gmm_cfm_trained):
        net = gmm_cfm_trained["net"]
        gmm = gmm_cfm_trained["gmm"]
        table = dict(loglik_mse_table(net, gmm, [1, 2, 5, 10, 20], 1500,
                                      nk.Rng(11)))
        assert table[1] > table[5] > 0.0
        assert table[5] >= table[20] * 0.8  # flat once converged


class TestMeanFlowOnGmm:
    def test_loss_drops_well_below_initialization(self, gmm_meanflow_trained):
        losses = gmm_meanflow_trained["losses"]
        assert losses[-100:].mean() < 0.5 * losses[:100].mean()

    def test_one_step_samples_match_target_energy_distance(
            self, gmm_meanflow_trained):
        net = gmm_meanflow_trained["net"]
        gmm = gmm_meanflow_trained["gmm"]
        rng = nk.Rng(13)
        a0 = rng.standard_normal((4000, 2))
        one_step = integrate_mean_flow(net, a0, np.zeros((4000, 1)),
                                       IntegrationSchedule.uniform(1))
        target = gmm.sample(rng.stream("ref"), 4000)
        ed = energy_distance(one_step, target, nk.Rng(17), pairs=4000)
        assert abs(ed) < 0.05

    def test_loglik_mse_decays_with_integration_steps(
            self, gmm_meanflow_trained):
        net = gmm_meanflow_trained["net"]
        gmm = gmm_meanflow_trained["gmm"]
        table = dict(loglik_mse_table(net, gmm, [1, 5, 20], 1500,
                                      nk.Rng(19)))
        assert table[1] > table[5] > 0.0
