"""Energy-based target handling via Q-reweighting: reverse candidate
sampling, SNIS weights, soft critics, temperature tuning, replay, and the
combined training step."""

from .agent import (FlameAgent, FlameConfig, TrainingDiverged, qrfm_loss,
                    qrmf_loss)
from .critic import (SoftCriticPair, bellman_target, critic_loss,
                     temperature_update)
from .replay import ReplayBuffer, Transition
from .reverse import (T_HI, T_LO, forward_kernel_log_density, proposal_sample,
                      reverse_kernel_log_density, reverse_sample_candidates,
                      snis_weights)

__all__ = [
    "FlameAgent", "FlameConfig", "ReplayBuffer", "SoftCriticPair", "T_HI",
    "T_LO", "TrainingDiverged", "Transition", "bellman_target", "critic_loss",
    "forward_kernel_log_density", "proposal_sample", "qrfm_loss", "qrmf_loss",
    "reverse_kernel_log_density", "reverse_sample_candidates", "snis_weights",
    "temperature_update",
]
