"""Twin soft critics with target copies and the auto-tuned temperature."""

from __future__ import annotations

import numpy as np

from .. import numkit as nk
from ..netlib import Adam, Mlp, MlpSpec, polyak_update
from ..numkit import Rng, Tensor


class SoftCriticPair:
    """Q1/Q2 with frozen target copies; alpha is log-parameterized (> 0)."""

    def __init__(self, state_dim: int, action_dim: int, rng: Rng,
                 hidden_layers: int = 3, hidden_width: int = 256,
                 alpha_init: float = 0.2, target_entropy: float | None = None):
        spec = MlpSpec(state_dim + action_dim, 1,
                       hidden_layers=hidden_layers, hidden_width=hidden_width)
        self.q1 = Mlp(spec, rng.stream("q1"))
        self.q2 = Mlp(spec, rng.stream("q2"))
        self.q1_target = Mlp(spec, rng.stream("q1"))
        self.q2_target = Mlp(spec, rng.stream("q2"))
        self.q1_target.copy_from(self.q1)
        self.q2_target.copy_from(self.q2)
        if alpha_init <= 0.0:
            raise ValueError("alpha must start positive")
        self.log_alpha = float(np.log(alpha_init))
        self.target_entropy = (-float(action_dim) if target_entropy is None
                               else float(target_entropy))

    @property
    def alpha(self) -> float:
        return float(np.exp(self.log_alpha))

    # -- evaluation ---------------------------------------------------------

    @staticmethod
    def _join(s, a):
        return np.concatenate([np.asarray(s, dtype=np.float64),
                               np.asarray(a, dtype=np.float64)], axis=1)

    def q_min_array(self, s, a) -> np.ndarray:
        x = self._join(s, a)
        return np.minimum(self.q1.forward_array(x),
                          self.q2.forward_array(x))[:, 0]

    def q_min_target_array(self, s, a) -> np.ndarray:
        x = self._join(s, a)
        return np.minimum(self.q1_target.forward_array(x),
                          self.q2_target.forward_array(x))[:, 0]

    def forward_pair(self, s, a) -> tuple[Tensor, Tensor]:
        x = Tensor(self._join(s, a))
        return self.q1.forward(x), self.q2.forward(x)

    # -- parameters -----------------------------------------------------------

    def parameters(self) -> dict[str, Tensor]:
        out = {}
        for tag, net in (("q1", self.q1), ("q2", self.q2)):
            for k, p in net.parameters().items():
                out[f"{tag}/{k}"] = p
        return out

    def target_parameters(self) -> dict[str, Tensor]:
        out = {}
        for tag, net in (("q1", self.q1_target), ("q2", self.q2_target)):
            for k, p in net.parameters().items():
                out[f"{tag}/{k}"] = p
        return out

    def polyak(self, tau: float):
        polyak_update(self.target_parameters(), self.parameters(), tau)


def critic_loss(critics: SoftCriticPair, batch: dict,
                target: np.ndarray) -> Tensor:
    """Sum of the two mean squared soft-TD errors against a fixed target."""
    if not np.all(np.isfinite(target)):
        bad = int(np.sum(~np.isfinite(target)))
        raise FloatingPointError(f"{bad}/{target.size} TD targets non-finite")
    q1, q2 = critics.forward_pair(batch["s"], batch["a"])
    y = Tensor(target[:, None])
    e1 = q1 - y
    e2 = q2 - y
    return nk.tmean(e1 * e1) + nk.tmean(e2 * e2)


def bellman_target(critics: SoftCriticPair, r, done, s2, a2, logp,
                   gamma: float, alpha: float) -> np.ndarray:
    """r + gamma*(1-done)*(min_j Qbar_j(s', a') - alpha*log pi(a'|s'))."""
    qmin = critics.q_min_target_array(s2, a2)
    return (np.asarray(r)
            + gamma * (1.0 - np.asarray(done)) * (qmin - alpha * logp))


def temperature_update(log_alpha: float, logp_batch, target_entropy: float,
                       lr: float) -> float:
    """One log-space gradient step pushing entropy toward its target.

    alpha grows while the policy entropy -mean(logp) sits below the target
    and shrinks above it; at equality the update is exactly stationary.
    """
    drift = float(np.mean(logp_batch) + target_entropy)
    return log_alpha + lr * drift
