"""Probability paths, flow losses, Euler sampling, and augmented-ODE
log-likelihood estimation."""

from .fields import ConstantField, LinearAverageField, LinearInstantaneousField
from .integrate import (FlowIntegrationError, IntegrationSchedule,
                        integrate_flow, integrate_mean_flow, sample_actions)
from .likelihood import (Divergence, LogProbResult, divergence,
                         log_prob_augmented, velocity_and_divergence)
from .losses import (T_EPS, cfm_loss, meanflow_loss, meanflow_target,
                     sample_time_pairs, sample_times,
                     weighted_field_regression)
from .paths import OtPath, ot_interpolate

__all__ = [
    "ConstantField", "Divergence", "FlowIntegrationError",
    "IntegrationSchedule", "LinearAverageField", "LinearInstantaneousField",
    "LogProbResult", "OtPath", "T_EPS", "cfm_loss", "divergence",
    "integrate_flow", "integrate_mean_flow", "log_prob_augmented",
    "meanflow_loss", "meanflow_target", "ot_interpolate", "sample_actions",
    "sample_time_pairs", "sample_times", "velocity_and_divergence",
    "weighted_field_regression",
]
