"""Desk-scale tasks with analytic ground truth."""

from .bandit import (BanditOracle, SoftBandit, soft_bandit_oracle,
                     wasserstein1_to_oracle)
from .gmm import Gmm2d, gmm_log_density
from .multigoal import (MultiGoalEnv, mode_coverage, multigoal_step,
                        rollout_batch)

__all__ = [
    "BanditOracle", "Gmm2d", "MultiGoalEnv", "SoftBandit",
    "gmm_log_density", "mode_coverage", "multigoal_step", "rollout_batch",
    "soft_bandit_oracle", "wasserstein1_to_oracle",
]
