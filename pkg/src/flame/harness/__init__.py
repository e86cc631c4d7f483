"""CLI entry points, run configuration, orchestration, sweeps, and plots."""

from .config import (ALGORITHMS, TASKS, ConfigError, RunConfig,
                     flame_config_from, make_config, parse_config,
                     parse_config_text, serialize_config)
from .evaluate import evaluate_run
from .plots import PLOT_KINDS, PlotError, emit_plot, read_metrics_csv
from .run import MetricsWriter, RunResult, default_out_dir, run
from .sweeps import SWEEP_AXES, loglik_mse_table, sweep_sensitivity

__all__ = [
    "ALGORITHMS", "ConfigError", "MetricsWriter", "PLOT_KINDS", "PlotError",
    "RunConfig", "RunResult", "SWEEP_AXES", "TASKS", "default_out_dir",
    "emit_plot", "evaluate_run", "flame_config_from", "loglik_mse_table",
    "make_config", "parse_config", "parse_config_text", "read_metrics_csv",
    "run", "serialize_config", "sweep_sensitivity",
]
