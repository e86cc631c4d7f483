"""Run orchestration: data collection, UTD-scheduled training, periodic
evaluation, metrics CSV, and checkpointing.

Every run directory receives the serialized config, an append-only metrics
CSV with a fixed versioned header, the final checkpoint, and a DONE marker
(or FAILED with the abort reason).  Runs are deterministic given the seed.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..envs import (Gmm2d, MultiGoalEnv, SoftBandit, mode_coverage,
                    rollout_batch, soft_bandit_oracle, wasserstein1_to_oracle)
from ..flowcore import FlowIntegrationError, sample_actions
from ..maxent import FlameAgent, TrainingDiverged, qrfm_loss, qrmf_loss
from ..netlib import (Adam, VectorFieldNet, pack_uint64, polyak_update,
                      save_arrays)
from ..netlib.mlp import INSTANTANEOUS, MEANFLOW
from ..numkit import Rng
from .config import RunConfig, flame_config_from, serialize_config
from .sweeps import loglik_mse_table

CSV_VERSION = "flame-metrics-v1"


@dataclass
class RunResult:
    status: str  # "done" | "failed"
    out_dir: Path
    metrics_path: Path
    checkpoint_path: Path
    final_metrics: dict


class MetricsWriter:
    """Append-only CSV with a fixed header; all values must be finite."""

    def __init__(self, path: Path, columns: list[str], task: str):
        self.path = Path(path)
        self.columns = columns
        with open(self.path, "w") as fh:
            fh.write(f"# {CSV_VERSION} task={task}\n")
            fh.write(",".join(columns) + "\n")

    def write(self, row: dict):
        vals = []
        for col in self.columns:
            v = row[col]
            if not np.isfinite(v):
                raise TrainingDiverged(f"non-finite metric {col!r}",
                                       dump={"row": row})
            vals.append(repr(int(v)) if col == "step" else repr(float(v)))
        with open(self.path, "a") as fh:
            fh.write(",".join(vals) + "\n")


def default_out_dir(cfg: RunConfig) -> Path:
    root = Path(os.environ.get("FLAME_OUT_ROOT", "runs"))
    return root / f"{cfg.task}_{cfg.algorithm}_seed{cfg.seed}"


def config_hash(cfg: RunConfig) -> np.ndarray:
    digest = hashlib.sha256(serialize_config(cfg).encode()).digest()[:8]
    word = np.frombuffer(digest, dtype=np.uint64)
    return pack_uint64(word)


def run(cfg: RunConfig) -> RunResult:
    cfg.validate()
    out = Path(cfg.out_dir) if cfg.out_dir else default_out_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.cfg").write_text(serialize_config(cfg))
    metrics_path = out / "metrics.csv"
    checkpoint_path = out / "checkpoint.bin"
    runner = {"multigoal": _run_multigoal, "bandit": _run_bandit,
              "gmm": _run_gmm}[cfg.task]
    try:
        final = runner(cfg, out, metrics_path, checkpoint_path)
    except (TrainingDiverged, FlowIntegrationError) as exc:
        (out / "FAILED").write_text(f"{type(exc).__name__}: {exc}\n")
        return RunResult("failed", out, metrics_path, checkpoint_path,
                         {"error": str(exc)})
    (out / "DONE").write_text("ok\n")
    return RunResult("done", out, metrics_path, checkpoint_path, final)


# -- multigoal ------------------------------------------------------------------


def _eval_multigoal(agent: FlameAgent, env: MultiGoalEnv, rng: Rng,
                    episodes: int):
    def policy(states):
        acts, _ = agent.sample_action_batch(states, evaluation=True)
        return acts

    returns, terminal = rollout_batch(env, policy, rng, episodes)
    coverage, _ = mode_coverage(terminal, env.goals, env.goal_radius)
    return float(returns.mean()), coverage, terminal


def _run_multigoal(cfg: RunConfig, out: Path, metrics_path: Path,
                   checkpoint_path: Path) -> dict:
    env = MultiGoalEnv()
    root = Rng(cfg.seed)
    agent = FlameAgent(
        flame_config_from(cfg, env.state_dim, env.action_dim,
                          env.action_lo, env.action_hi),
        root.stream("agent"))
    env_rng = root.stream("env")
    eval_rng = root.stream("eval")

    columns = ["step", "episode_return", "actor_loss", "critic_loss",
               "alpha", "entropy_estimate", "mean_q",
               "coverage_g1", "coverage_g2", "coverage_g3", "coverage_g4"]
    writer = MetricsWriter(metrics_path, columns, cfg.task)

    def checkpoint():
        arrays = agent.checkpoint_arrays()
        arrays["meta/config_hash"] = config_hash(cfg)
        arrays["meta/env_steps"] = np.array([float(step)])
        arrays["rng/env"] = pack_uint64(env_rng.state_vector())
        save_arrays(checkpoint_path, arrays)

    s = env.reset(env_rng)
    utd_credit = 0.0
    step = 0
    last_metrics: dict = {"actor_loss": 0.0, "critic_loss": 0.0,
                          "alpha": agent.critics.alpha,
                          "entropy_estimate": 0.0, "mean_q": 0.0}
    try:
        for step in range(1, cfg.total_env_steps + 1):
            a, a0 = agent.act(s, evaluation=False)
            s2, r, done = env.step(a)
            # the objective is infinite-horizon; episode ends (goal entry or
            # horizon) truncate data collection but never the value recursion
            agent.observe(s, a, r, s2, False, a0)
            s = env.reset(env_rng) if done else s2

            utd_credit += cfg.utd_ratio
            while utd_credit >= 1.0 and len(agent.buffer) >= cfg.batch_size:
                last_metrics = agent.train_step()
                utd_credit -= 1.0

            if step % cfg.eval_every == 0:
                mean_ret, coverage, _ = _eval_multigoal(
                    agent, env, eval_rng, cfg.eval_episodes)
                writer.write({
                    "step": step, "episode_return": mean_ret,
                    **{f"coverage_g{i + 1}": coverage[i] for i in range(4)},
                    **last_metrics})
    except (TrainingDiverged, FlowIntegrationError):
        checkpoint()
        raise

    mean_ret, coverage, terminal = _eval_multigoal(
        agent, env, eval_rng, cfg.final_eval_episodes)
    checkpoint()
    np.savetxt(out / "terminal_states.csv", terminal, delimiter=",",
               header="x,y", comments="# ")
    return {"episode_return": mean_ret,
            "coverage": coverage.tolist(),
            "train_steps": agent.train_steps,
            "env_steps": step}


# -- soft bandit ------------------------------------------------------------------


def _bandit_net_and_loss(cfg: RunConfig, bandit: SoftBandit, rng: Rng):
    mode = MEANFLOW if cfg.algorithm == "flame_m" else INSTANTANEOUS
    net = VectorFieldNet(bandit.action_dim, bandit.state_dim, mode, rng,
                         hidden_layers=cfg.hidden_layers,
                         hidden_width=cfg.hidden_width,
                         time_embed_dim=cfg.time_embed_dim,
                         zero_init_final=True)
    loss_fn = qrmf_loss if mode == MEANFLOW else qrfm_loss
    return net, loss_fn


def _bandit_sample(net, cfg: RunConfig, rng: Rng, n: int):
    # the R-variant policy is trained (and therefore measured) on the
    # fine integration grid; the M-variant generates in one step
    steps = 1 if net.mode == MEANFLOW else cfg.n_gen_train
    a0 = rng.standard_normal((n, 1))
    return sample_actions(net, a0, np.zeros((n, 1)), steps)


def _run_bandit(cfg: RunConfig, out: Path, metrics_path: Path,
                checkpoint_path: Path) -> dict:
    bandit = SoftBandit()
    oracle = soft_bandit_oracle(bandit, alpha=cfg.alpha_init, grid_n=4001)
    root = Rng(cfg.seed)
    net, loss_fn = _bandit_net_and_loss(cfg, bandit, root.stream("net"))
    net_old, _ = _bandit_net_and_loss(cfg, bandit, root.stream("net"))
    net_old.copy_from(net)
    fcfg = flame_config_from(cfg, bandit.state_dim, bandit.action_dim,
                             [bandit.action_lo], [bandit.action_hi])
    opt = Adam(net.parameters(), lr=cfg.actor_lr, lr_end=cfg.actor_lr_end,
               anneal_steps=cfg.total_env_steps)
    loss_rng = root.stream("loss")
    eval_rng = root.stream("eval")
    s_batch = np.zeros((cfg.batch_size, 1))

    def q_fn(s_rep, a_flat):
        return bandit.q_values(a_flat)

    columns = ["step", "episode_return", "actor_loss", "alpha",
               "wasserstein1"]
    writer = MetricsWriter(metrics_path, columns, cfg.task)

    def evaluate(n=4000):
        samples = _bandit_sample(net, cfg, eval_rng, n)
        w1 = wasserstein1_to_oracle(samples, oracle)
        return float(np.mean(bandit.q_values(samples))), w1

    loss_val = 0.0
    for step in range(1, cfg.total_env_steps + 1):
        loss = loss_fn(net, q_fn, s_batch, cfg.alpha_init, fcfg, loss_rng,
                       policy_old=net_old)
        opt.zero_grad()
        loss.backward()
        opt.step()
        polyak_update(net_old.parameters(), net.parameters(), cfg.tau)
        loss_val = float(loss.data)
        if step % cfg.eval_every == 0:
            mean_q, w1 = evaluate()
            writer.write({"step": step, "episode_return": mean_q,
                          "actor_loss": loss_val, "alpha": cfg.alpha_init,
                          "wasserstein1": w1})

    mean_q, w1 = evaluate()
    arrays = {f"actor/{k}": p.data for k, p in net.parameters().items()}
    arrays["meta/config_hash"] = config_hash(cfg)
    save_arrays(checkpoint_path, arrays)
    return {"wasserstein1": w1, "episode_return": mean_q,
            "actor_loss": loss_val}


# -- gmm density benchmark ---------------------------------------------------------


def _run_gmm(cfg: RunConfig, out: Path, metrics_path: Path,
             checkpoint_path: Path) -> dict:
    from ..flowcore import cfm_loss, meanflow_loss

    gmm = Gmm2d()
    root = Rng(cfg.seed)
    mode = MEANFLOW if cfg.algorithm == "flame_m" else INSTANTANEOUS
    net = VectorFieldNet(2, 1, mode, root.stream("net"),
                         hidden_layers=cfg.hidden_layers,
                         hidden_width=cfg.hidden_width,
                         time_embed_dim=cfg.time_embed_dim,
                         zero_init_final=True)
    opt = Adam(net.parameters(), lr=cfg.actor_lr, lr_end=cfg.actor_lr_end,
               anneal_steps=cfg.total_env_steps)
    data_rng = root.stream("data")
    loss_rng = root.stream("loss")
    eval_rng = root.stream("eval")
    loss_fn = meanflow_loss if mode == MEANFLOW else cfm_loss

    nest_list = cfg.nest_list()
    columns = (["step", "loss"]
               + [f"loglik_mse_nest{n}" for n in nest_list])
    writer = MetricsWriter(metrics_path, columns, cfg.task)

    loss_val = 0.0
    for step in range(1, cfg.total_env_steps + 1):
        a1 = gmm.sample(data_rng, cfg.batch_size)
        s = np.zeros((cfg.batch_size, 1))
        loss = loss_fn(net, s, a1, loss_rng)
        opt.zero_grad()
        loss.backward()
        opt.step()
        loss_val = float(loss.data)
        if step % cfg.eval_every == 0:
            table = loglik_mse_table(net, gmm, nest_list,
                                     cfg.loglik_eval_samples,
                                     eval_rng.stream(("mse", step)))
            writer.write({"step": step, "loss": loss_val,
                          **{f"loglik_mse_nest{n}": m for n, m in table}})

    table = loglik_mse_table(net, gmm, nest_list, cfg.loglik_eval_samples,
                             eval_rng.stream("final"))
    arrays = {f"actor/{k}": p.data for k, p in net.parameters().items()}
    arrays["meta/config_hash"] = config_hash(cfg)
    save_arrays(checkpoint_path, arrays)
    return {"loss": loss_val, "loglik_mse": dict(table)}
