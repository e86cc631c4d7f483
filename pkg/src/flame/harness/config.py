"""Run configuration: flat key=value files, task presets, CLI overrides.

Global defaults carry the reference hyperparameters (critic lr 3e-4, policy
lr 3e-4 annealed to 3e-5, 3x256 Mish nets, batch 256, buffer 1e6, discount
0.99, UTD 0.2, K=300, N_est=5).  Task presets shrink a handful of scale
knobs to desk size (shorter runs, smaller buffer/batch/width for the 2-D
control tasks); anything given explicitly in a file or on the command line
wins over both.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

TASKS = ("gmm", "multigoal", "bandit")
ALGORITHMS = ("flame_r", "flame_m", "flame_noent", "cfm_only")

_TASK_ALGOS = {
    "gmm": ("cfm_only", "flame_m"),
    "multigoal": ("flame_r", "flame_m", "flame_noent"),
    "bandit": ("flame_r", "flame_m"),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    task: str = "multigoal"
    algorithm: str = "flame_r"
    seed: int = 0
    total_env_steps: int = 50_000
    eval_every: int = 5_000
    eval_episodes: int = 20
    final_eval_episodes: int = 200
    out_dir: str = ""

    k: int = 300
    n_gen_train: int = 20
    n_gen_eval: int = 1
    n_est: int = 5
    alpha_init: float = 0.2
    target_entropy: float = math.nan  # nan -> -action_dim
    batch_size: int = 256
    buffer_capacity: int = 1_000_000
    discount: float = 0.99
    utd_ratio: float = 0.2
    proposal: str = "uniform_box"

    hidden_layers: int = 3
    hidden_width: int = 256
    time_embed_dim: int = 64
    actor_lr: float = 3e-4
    actor_lr_end: float = 3e-5
    critic_lr: float = 3e-4
    alpha_lr: float = 3e-4
    tau: float = 0.005
    hutchinson_probes: int = 1

    loglik_eval_nest: str = "1,2,5,10,20"
    loglik_eval_samples: int = 1000

    def validate(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.algorithm not in _TASK_ALGOS[self.task]:
            raise ConfigError(
                f"algorithm {self.algorithm!r} not available for task "
                f"{self.task!r} (choose from {_TASK_ALGOS[self.task]})")
        if self.total_env_steps < 0:
            raise ConfigError("total_env_steps must be non-negative")
        if self.eval_every <= 0:
            raise ConfigError("eval_every must be positive")
        try:
            self.nest_list()
        except ValueError as exc:
            raise ConfigError(f"bad loglik_eval_nest: {exc}") from None
        return self

    def nest_list(self) -> list[int]:
        vals = [int(v) for v in self.loglik_eval_nest.split(",") if v.strip()]
        if not vals or any(v < 1 for v in vals):
            raise ValueError("need positive step counts")
        return vals


# desk-scale shrinkage for the 2-D control tasks (keeps K/N_est/eps verbatim)
_PRESETS: dict[str, dict[str, object]] = {
    "multigoal": {
        "total_env_steps": 50_000, "eval_every": 5_000,
        "buffer_capacity": 100_000, "batch_size": 64,
        "hidden_width": 48, "time_embed_dim": 32,
    },
    "bandit": {
        "total_env_steps": 5_000, "eval_every": 1_000,
        "batch_size": 64, "hidden_width": 64, "time_embed_dim": 32,
        "algorithm": "flame_r",
    },
    "gmm": {
        "total_env_steps": 10_000, "eval_every": 2_000,
        "algorithm": "cfm_only",
    },
}

_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _parse_value(key: str, raw: str):
    ftype = _FIELDS[key].type
    raw = raw.strip()
    try:
        if ftype == "int":
            return int(raw)
        if ftype == "float":
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for key {key!r}") from None


def parse_config_text(text: str) -> dict[str, object]:
    """key=value lines to a typed override dict; rejects unknown keys."""
    out: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = _parse_value(key, raw)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    return out


def _coerce(overrides: dict) -> dict:
    out = {}
    for key, val in overrides.items():
        if key not in _FIELDS:
            raise ConfigError(f"unknown key {key!r}")
        out[key] = _parse_value(key, val) if isinstance(val, str) else val
    return out


def make_config(file_overrides: dict | None = None,
                cli_overrides: dict | None = None) -> RunConfig:
    """Defaults <- task preset <- config file <- command line."""
    explicit = {**_coerce(file_overrides or {}),
                **_coerce(cli_overrides or {})}
    task = explicit.get("task", RunConfig.task)
    merged: dict[str, object] = {}
    merged.update(_PRESETS.get(task, {}))
    merged.update(explicit)
    cfg = RunConfig(**merged)
    cfg.validate()
    return cfg


def serialize_config(cfg: RunConfig) -> str:
    lines = [f"{f.name} = {getattr(cfg, f.name)}"
             for f in dataclasses.fields(RunConfig)]
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> RunConfig:
    cfg = RunConfig(**parse_config_text(text))
    cfg.validate()
    return cfg


def flame_config_from(cfg: RunConfig, state_dim: int, action_dim: int,
                      action_lo, action_hi):
    """Project the run configuration onto the agent's config type."""
    from ..maxent import FlameConfig
    variant = "m" if cfg.algorithm == "flame_m" else "r"
    return FlameConfig(
        variant=variant, state_dim=state_dim, action_dim=action_dim,
        action_lo=np.asarray(action_lo, dtype=np.float64),
        action_hi=np.asarray(action_hi, dtype=np.float64),
        k=cfg.k, n_gen_train=cfg.n_gen_train, n_gen_eval=cfg.n_gen_eval,
        n_est=cfg.n_est, alpha_init=cfg.alpha_init,
        target_entropy=(None if math.isnan(cfg.target_entropy)
                        else cfg.target_entropy),
        batch_size=cfg.batch_size, buffer_capacity=cfg.buffer_capacity,
        gamma=cfg.discount, utd_ratio=cfg.utd_ratio, proposal=cfg.proposal,
        entropy_off=cfg.algorithm == "flame_noent",
        hidden_layers=cfg.hidden_layers, hidden_width=cfg.hidden_width,
        time_embed_dim=cfg.time_embed_dim, actor_lr=cfg.actor_lr,
        actor_lr_end=cfg.actor_lr_end, critic_lr=cfg.critic_lr,
        alpha_lr=cfg.alpha_lr, tau=cfg.tau,
        anneal_steps=max(int(cfg.total_env_steps * cfg.utd_ratio), 1),
        hutchinson_probes=cfg.hutchinson_probes)
