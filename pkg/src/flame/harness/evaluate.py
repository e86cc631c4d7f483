"""Offline evaluation of a finished run directory."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..envs import (Gmm2d, MultiGoalEnv, SoftBandit, mode_coverage,
                    rollout_batch, soft_bandit_oracle, wasserstein1_to_oracle)
from ..maxent import FlameAgent
from ..netlib import VectorFieldNet, load_arrays
from ..netlib.mlp import INSTANTANEOUS, MEANFLOW
from ..numkit import Rng
from .config import RunConfig, flame_config_from, parse_config
from .sweeps import loglik_mse_table


def _load_run(run_dir: Path) -> tuple[RunConfig, dict]:
    cfg = parse_config((run_dir / "config.cfg").read_text())
    arrays = load_arrays(run_dir / "checkpoint.bin")
    return cfg, arrays


def _restore_field_net(cfg: RunConfig, arrays: dict, state_dim: int,
                       action_dim: int) -> VectorFieldNet:
    mode = MEANFLOW if cfg.algorithm == "flame_m" else INSTANTANEOUS
    net = VectorFieldNet(action_dim, state_dim, mode, Rng(cfg.seed),
                         hidden_layers=cfg.hidden_layers,
                         hidden_width=cfg.hidden_width,
                         time_embed_dim=cfg.time_embed_dim)
    for key, param in net.parameters().items():
        param.data[...] = arrays[f"actor/{key}"]
    return net


def evaluate_run(run_dir, episodes: int = 200) -> dict:
    run_dir = Path(run_dir)
    cfg, arrays = _load_run(run_dir)

    if cfg.task == "multigoal":
        env = MultiGoalEnv()
        agent = FlameAgent(
            flame_config_from(cfg, env.state_dim, env.action_dim,
                              env.action_lo, env.action_hi),
            Rng(cfg.seed).stream("agent"))
        agent.load_checkpoint_arrays(arrays)
        rng = Rng(cfg.seed).stream("offline-eval")

        def policy(states):
            acts, _ = agent.sample_action_batch(states, evaluation=True)
            return acts

        returns, terminal = rollout_batch(env, policy, rng, episodes)
        coverage, _ = mode_coverage(terminal, env.goals, env.goal_radius)
        out = {"episode_return": float(returns.mean()),
               "covered_goals": int(np.sum(coverage >= 0.1))}
        out.update({f"coverage_g{i + 1}": float(coverage[i])
                    for i in range(4)})
        return out

    if cfg.task == "bandit":
        bandit = SoftBandit()
        net = _restore_field_net(cfg, arrays, bandit.state_dim,
                                 bandit.action_dim)
        oracle = soft_bandit_oracle(bandit, alpha=cfg.alpha_init, grid_n=4001)
        from .run import _bandit_sample
        samples = _bandit_sample(net, cfg, Rng(cfg.seed).stream("offline"),
                                 max(episodes, 1000))
        return {"wasserstein1": wasserstein1_to_oracle(samples, oracle),
                "mean_q": float(np.mean(bandit.q_values(samples)))}

    gmm = Gmm2d()
    net = _restore_field_net(cfg, arrays, 1, 2)
    table = loglik_mse_table(net, gmm, cfg.nest_list(),
                             cfg.loglik_eval_samples,
                             Rng(cfg.seed).stream("offline"))
    return {f"loglik_mse_nest{n}": m for n, m in table}
