"""Q-reweighted flow-matching training: configuration, actor losses, and
the combined actor/critic/temperature update step.

Variant "r" trains an instantaneous velocity field (multi-step ODE sampling
during training, one-step at evaluation); variant "m" trains an
average-velocity field that both samples in one step and supports multi-step
likelihood estimation on a finer grid for the critic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..flowcore import (Divergence, IntegrationSchedule, log_prob_augmented,
                        sample_actions, weighted_field_regression)
from ..netlib import Adam, VectorFieldNet, polyak_update
from ..netlib.mlp import INSTANTANEOUS, MEANFLOW
from ..numkit import Rng, Tensor
from .critic import (SoftCriticPair, bellman_target, critic_loss,
                     temperature_update)
from .replay import ReplayBuffer
from .reverse import (T_HI, T_LO, proposal_sample, reverse_sample_candidates,
                      snis_weights)


class TrainingDiverged(RuntimeError):
    """Raised when a training step produces non-finite quantities."""

    def __init__(self, message: str, dump: dict | None = None):
        super().__init__(message)
        self.dump = dump or {}


@dataclass
class FlameConfig:
    variant: str
    state_dim: int
    action_dim: int
    action_lo: np.ndarray
    action_hi: np.ndarray
    k: int = 300
    n_gen_train: int = 20
    n_gen_eval: int = 1
    n_est: int = 5
    alpha_init: float = 0.2
    target_entropy: float | None = None  # None -> -action_dim
    batch_size: int = 256
    buffer_capacity: int = 1_000_000
    gamma: float = 0.99
    utd_ratio: float = 0.2
    proposal: str = "uniform_box"
    entropy_off: bool = False
    hidden_layers: int = 3
    hidden_width: int = 256
    time_embed_dim: int = 64
    actor_lr: float = 3e-4
    actor_lr_end: float = 3e-5
    critic_lr: float = 3e-4
    alpha_lr: float = 3e-4
    tau: float = 0.005
    anneal_steps: int = 0
    hutchinson_probes: int = 1
    exact_trace_max_dim: int = 16

    def __post_init__(self):
        if self.variant not in ("r", "m"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.k < 1 or self.n_est < 1:
            raise ValueError("k and n_est must be at least 1")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if self.proposal not in ("uniform_box", "last_policy"):
            raise ValueError(f"unknown proposal {self.proposal!r}")
        self.action_lo = np.asarray(self.action_lo, dtype=np.float64)
        self.action_hi = np.asarray(self.action_hi, dtype=np.float64)
        if np.any(self.action_lo >= self.action_hi):
            raise ValueError("need action_lo < action_hi")

    @property
    def entropy_target(self) -> float:
        return (-float(self.action_dim) if self.target_entropy is None
                else self.target_entropy)

    def divergence_mode(self) -> Divergence:
        if self.action_dim <= self.exact_trace_max_dim:
            return Divergence.exact()
        return Divergence.hutchinson(self.hutchinson_probes)

    def gen_steps(self, evaluation: bool) -> int:
        if self.variant == "m":
            return 1
        return self.n_gen_eval if evaluation else self.n_gen_train


def _candidate_stats(weights, targets):
    """Weighted candidate mean (B, d) and mean squared norm (B,)."""
    wmean = np.einsum("bk,bkd->bd", weights, targets)
    wsq = np.einsum("bk,bk->b", weights, np.sum(targets ** 2, axis=-1))
    return wmean, wsq


def _draw_candidates(q_fn, s, t, alpha, config: FlameConfig, rng: Rng,
                     policy_old):
    a_t = proposal_sample(config.proposal, s, t, policy_old,
                          config.action_lo, config.action_hi, rng,
                          n_gen=config.gen_steps(evaluation=False))
    a1, a0 = reverse_sample_candidates(a_t, t, config.k, config.action_lo,
                                       config.action_hi, rng)
    batch, k, d = a1.shape
    s_rep = np.repeat(s, k, axis=0)
    q = q_fn(s_rep, a1.reshape(-1, d)).reshape(batch, k)
    w = snis_weights(q, alpha)
    return a_t, a1, a0, w


def qrfm_loss(net: VectorFieldNet, q_fn, s, alpha: float,
              config: FlameConfig, rng: Rng, policy_old=None) -> Tensor:
    """Q-reweighted conditional flow-matching loss (variant "r").

    One (t, a_t) pair per state, K reverse-sampled candidates per pair,
    softmax(Q/alpha) candidate weights; the critic enters only through the
    weights, never through the tape.
    """
    if net.mode != INSTANTANEOUS:
        raise ValueError("qrfm_loss needs an instantaneous-mode net")
    s = np.asarray(s, dtype=np.float64)
    t = rng.uniform(T_LO, T_HI, s.shape[0])
    a_t, a1, a0, w = _draw_candidates(q_fn, s, t, alpha, config, rng,
                                      policy_old)
    wmean, wsq = _candidate_stats(w, a1 - a0)
    u = net.forward_field(Tensor(a_t), t, Tensor(s))
    return weighted_field_regression(u, wmean, wsq)


def qrmf_loss(net: VectorFieldNet, q_fn, s, alpha: float,
              config: FlameConfig, rng: Rng, policy_old=None) -> Tensor:
    """Q-reweighted average-velocity loss (variant "m").

    Same candidate pipeline as qrfm_loss; the regression target per
    candidate is the gradient-stopped bootstrap
    u_cond - (t - zeta) * (d/da ubar . u_cond + d/dt ubar), assembled from
    the full action-space Jacobian (action_dim + 1 forward-mode passes).
    """
    if net.mode != MEANFLOW:
        raise ValueError("qrmf_loss needs a meanflow-mode net")
    s = np.asarray(s, dtype=np.float64)
    batch = s.shape[0]
    d = config.action_dim
    t = rng.uniform(T_LO, T_HI, batch)
    zeta = T_LO + (t - T_LO) * rng.random(batch)  # in [T_LO, t) a.s.
    a_t, a1, a0, w = _draw_candidates(q_fn, s, t, alpha, config, rng,
                                      policy_old)
    u_cond = a1 - a0

    jac = np.empty((batch, d, d))
    zero_dt = np.zeros(batch)
    for j in range(d):
        da = np.zeros((batch, d))
        da[:, j] = 1.0
        _, col = net.avg_velocity_jvp(a_t, da, zeta, t, zero_dt, s)
        jac[:, :, j] = col
    _, du_dt = net.avg_velocity_jvp(a_t, np.zeros((batch, d)), zeta, t,
                                    np.ones(batch), s)
    total_deriv = (np.einsum("bij,bkj->bki", jac, u_cond)
                   + du_dt[:, None, :])
    targets = u_cond - (t - zeta)[:, None, None] * total_deriv

    wmean, wsq = _candidate_stats(w, targets)
    u = net.forward_field(Tensor(a_t), t, Tensor(s), zeta=zeta)
    return weighted_field_regression(u, wmean, wsq)


class FlameAgent:
    """Training state: actor, frozen actor copy, twin critics, optimizers,
    replay, and the per-component random streams."""

    def __init__(self, config: FlameConfig, rng: Rng):
        self.config = config
        self.rng_act = rng.stream("act")
        self.rng_critic = rng.stream("critic")
        self.rng_actor = rng.stream("actor-loss")
        self.rng_batch = rng.stream("batch")
        self.rng_probe = rng.stream("probe")

        mode = MEANFLOW if config.variant == "m" else INSTANTANEOUS
        self.actor = VectorFieldNet(
            config.action_dim, config.state_dim, mode, rng.stream("actor"),
            hidden_layers=config.hidden_layers,
            hidden_width=config.hidden_width,
            time_embed_dim=config.time_embed_dim, zero_init_final=True)
        self.actor_old = VectorFieldNet(
            config.action_dim, config.state_dim, mode, rng.stream("actor"),
            hidden_layers=config.hidden_layers,
            hidden_width=config.hidden_width,
            time_embed_dim=config.time_embed_dim, zero_init_final=True)
        self.actor_old.copy_from(self.actor)

        self.critics = SoftCriticPair(
            config.state_dim, config.action_dim, rng.stream("critics"),
            hidden_layers=config.hidden_layers,
            hidden_width=config.hidden_width,
            alpha_init=config.alpha_init,
            target_entropy=config.entropy_target)

        self.actor_opt = Adam(self.actor.parameters(), lr=config.actor_lr,
                              lr_end=config.actor_lr_end,
                              anneal_steps=config.anneal_steps)
        self.critic_opt = Adam(self.critics.parameters(), lr=config.critic_lr)

        self.buffer = ReplayBuffer(config.buffer_capacity, config.state_dim,
                                   config.action_dim, config.action_lo,
                                   config.action_hi)
        self.train_steps = 0

    # -- interaction -------------------------------------------------------

    def sample_action_batch(self, s, evaluation: bool):
        """(clipped actions, base noise) for a batch of states."""
        s = np.asarray(s, dtype=np.float64)
        a0 = self.rng_act.standard_normal((s.shape[0], self.config.action_dim))
        a1 = sample_actions(self.actor, a0, s,
                            self.config.gen_steps(evaluation))
        return (np.clip(a1, self.config.action_lo, self.config.action_hi),
                a0)

    def act(self, s, evaluation: bool = False):
        a, a0 = self.sample_action_batch(np.asarray(s)[None, :], evaluation)
        return a[0], a0[0]

    def observe(self, s, a, r, s2, done, a0):
        self.buffer.push(s, a, r, s2, done, a0)

    # -- training ---------------------------------------------------------------

    def _policy_eval_inputs(self, s2):
        """Fresh next actions, their base noise, and log-density estimates."""
        batch = s2.shape[0]
        a0 = self.rng_critic.standard_normal((batch, self.config.action_dim))
        a2 = sample_actions(self.actor, a0, s2,
                            self.config.gen_steps(evaluation=False))
        res = log_prob_augmented(
            self.actor, a0, s2, IntegrationSchedule.uniform(self.config.n_est),
            mode=self.config.divergence_mode(), rng=self.rng_probe)
        return a2, res.log_prob

    def train_step(self) -> dict:
        """One critic + actor + temperature + target update; emits metrics."""
        cfg = self.config
        if len(self.buffer) < cfg.batch_size:
            raise ValueError("replay buffer smaller than one batch")
        batch = self.buffer.sample(self.rng_batch, cfg.batch_size)

        a2, logp = self._policy_eval_inputs(batch["s2"])
        alpha_critic = 0.0 if cfg.entropy_off else self.critics.alpha
        target = bellman_target(self.critics, batch["r"], batch["done"],
                                batch["s2"], a2, logp, cfg.gamma,
                                alpha_critic)

        closs = critic_loss(self.critics, batch, target)
        self.critic_opt.zero_grad()
        closs.backward()
        self.critic_opt.step()

        loss_fn = qrmf_loss if cfg.variant == "m" else qrfm_loss
        aloss = loss_fn(self.actor, self.critics.q_min_array, batch["s"],
                        self.critics.alpha, cfg, self.rng_actor,
                        policy_old=self.actor_old)
        self.actor_opt.zero_grad()
        aloss.backward()
        self.actor_opt.step()

        if not cfg.entropy_off:
            self.critics.log_alpha = temperature_update(
                self.critics.log_alpha, logp, cfg.entropy_target,
                cfg.alpha_lr)

        self.critics.polyak(cfg.tau)
        polyak_update(self.actor_old.parameters(), self.actor.parameters(),
                      cfg.tau)
        self.train_steps += 1

        metrics = {
            "critic_loss": float(closs.data),
            "actor_loss": float(aloss.data),
            "alpha": self.critics.alpha,
            "entropy_estimate": float(-np.mean(logp)),
            "mean_q": float(np.mean(
                self.critics.q_min_array(batch["s"], batch["a"]))),
        }
        if not all(np.isfinite(v) for v in metrics.values()):
            raise TrainingDiverged(
                f"non-finite metrics at train step {self.train_steps}",
                dump={"metrics": metrics, "step": self.train_steps})
        return metrics

    # -- persistence ----------------------------------------------------------

    def checkpoint_arrays(self) -> dict[str, np.ndarray]:
        from ..netlib import pack_uint64
        out = {}
        groups = {
            "actor": self.actor.parameters(),
            "actor_old": self.actor_old.parameters(),
            "critic": self.critics.parameters(),
            "critic_target": self.critics.target_parameters(),
        }
        for tag, params in groups.items():
            for k, p in params.items():
                out[f"{tag}/{k}"] = p.data
        out.update(self.actor_opt.state_arrays("opt/actor"))
        out.update(self.critic_opt.state_arrays("opt/critic"))
        out["meta/log_alpha"] = np.array([self.critics.log_alpha])
        out["meta/train_steps"] = np.array([float(self.train_steps)])
        for name, stream in (("act", self.rng_act), ("critic", self.rng_critic),
                             ("actor", self.rng_actor),
                             ("batch", self.rng_batch),
                             ("probe", self.rng_probe)):
            out[f"rng/{name}"] = pack_uint64(stream.state_vector())
        return out

    def load_checkpoint_arrays(self, arrays: dict[str, np.ndarray]):
        from ..netlib import unpack_uint64
        groups = {
            "actor": self.actor.parameters(),
            "actor_old": self.actor_old.parameters(),
            "critic": self.critics.parameters(),
            "critic_target": self.critics.target_parameters(),
        }
        for tag, params in groups.items():
            for k, p in params.items():
                p.data[...] = arrays[f"{tag}/{k}"]
        self.actor_opt.load_state_arrays("opt/actor", arrays)
        self.critic_opt.load_state_arrays("opt/critic", arrays)
        self.critics.log_alpha = float(arrays["meta/log_alpha"][0])
        self.train_steps = int(arrays["meta/train_steps"][0])
        for name, stream in (("act", self.rng_act), ("critic", self.rng_critic),
                             ("actor", self.rng_actor),
                             ("batch", self.rng_batch),
                             ("probe", self.rng_probe)):
            stream.set_state_vector(unpack_uint64(arrays[f"rng/{name}"]))
