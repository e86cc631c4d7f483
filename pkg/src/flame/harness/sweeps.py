"""Sweep drivers: likelihood-estimation error vs integration steps, and
one-axis sensitivity sweeps over algorithmic knobs."""

from __future__ import annotations

import dataclasses
from pathlib import Path

import numpy as np

from ..envs import Gmm2d
from ..flowcore import Divergence, IntegrationSchedule, log_prob_augmented
from ..numkit import Rng


def loglik_mse_table(net, gmm: Gmm2d, nest_list, n_samples: int, rng: Rng):
    """(N_est, MSE) rows comparing estimated log-densities to the mixture.

    One shared set of base draws feeds every step count, so differences
    between rows isolate the discretization of the estimator.
    """
    a0 = rng.standard_normal((n_samples, 2))
    s = np.zeros((n_samples, 1))
    rows = []
    for nest in nest_list:
        res = log_prob_augmented(net, a0, s,
                                 IntegrationSchedule.uniform(int(nest)),
                                 mode=Divergence.exact())
        ref = gmm.log_density(res.a1)
        rows.append((int(nest), float(np.mean((res.log_prob - ref) ** 2))))
    return rows


SWEEP_AXES = {
    "n_gen": "n_gen_train",
    "n_est": "n_est",
    "k": "k",
    "proposal": "proposal",
}


def sweep_sensitivity(axis: str, values, base_cfg, out_dir=None):
    """One run per value with a shared seed; returns aggregated rows.

    Each run lands in its own subdirectory; the aggregate CSV holds the
    axis value and the run's final metrics.
    """
    from .config import ConfigError
    from .run import run as run_one

    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r} "
                          f"(choose from {sorted(SWEEP_AXES)})")
    field = SWEEP_AXES[axis]
    out_dir = Path(out_dir) if out_dir else Path(base_cfg.out_dir or "runs")
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for value in values:
        typed = str(value) if field == "proposal" else int(value)
        cfg = dataclasses.replace(base_cfg, **{field: typed})
        cfg.out_dir = str(out_dir / f"{axis}_{value}")
        result = run_one(cfg)
        row = {"axis": axis, "value": value, "status": result.status}
        row.update({k: v for k, v in result.final_metrics.items()
                    if np.isscalar(v)})
        rows.append(row)

    if rows:
        keys = sorted({k for r in rows for k in r})
        lines = [",".join(keys)]
        for r in rows:
            lines.append(",".join(str(r.get(k, "")) for k in keys))
        (out_dir / f"sweep_{axis}.csv").write_text("\n".join(lines) + "\n")
    return rows
