"""Adam with linear learning-rate annealing, and target-network tracking."""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..numkit import Tensor


class Adam:
    """Adam over a named parameter dict.

    The effective learning rate interpolates linearly from ``lr`` to
    ``lr_end`` over ``anneal_steps`` updates (constant when ``lr_end`` is
    None).  Non-finite gradients abort with the offending parameter name.
    """

    def __init__(self, params: dict[str, Tensor], lr: float = 3e-4,
                 lr_end: float | None = None, anneal_steps: int = 0,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = dict(params)
        self.lr = float(lr)
        self.lr_end = None if lr_end is None else float(lr_end)
        self.anneal_steps = int(anneal_steps)
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.step_count = 0
        self.m = {k: np.zeros_like(p.data) for k, p in self.params.items()}
        self.v = {k: np.zeros_like(p.data) for k, p in self.params.items()}

    def current_lr(self) -> float:
        if self.lr_end is None or self.anneal_steps <= 0:
            return self.lr
        frac = min(self.step_count / self.anneal_steps, 1.0)
        return self.lr + (self.lr_end - self.lr) * frac

    def step(self):
        """Apply one update from the accumulated ``.grad`` buffers."""
        lr = self.current_lr()
        self.step_count += 1
        for name, p in self.params.items():
            g = p.grad
            if g is None:
                g = np.zeros_like(p.data)
            elif not np.all(np.isfinite(g)):
                raise FloatingPointError(
                    f"non-finite gradient for parameter {name!r}")
            kernels.adam_step(p.data, g, self.m[name], self.v[name],
                              self.step_count, lr, self.beta1, self.beta2,
                              self.eps)

    def zero_grad(self):
        for p in self.params.values():
            p.zero_grad()

    # -- checkpoint support ----------------------------------------------------

    def state_arrays(self, prefix: str) -> dict[str, np.ndarray]:
        out = {f"{prefix}/step": np.array([float(self.step_count)])}
        for k in self.params:
            out[f"{prefix}/m/{k}"] = self.m[k]
            out[f"{prefix}/v/{k}"] = self.v[k]
        return out

    def load_state_arrays(self, prefix: str, arrays: dict[str, np.ndarray]):
        self.step_count = int(arrays[f"{prefix}/step"][0])
        for k in self.params:
            self.m[k][...] = arrays[f"{prefix}/m/{k}"]
            self.v[k][...] = arrays[f"{prefix}/v/{k}"]


def polyak_update(target_params: dict[str, Tensor],
                  online_params: dict[str, Tensor], tau: float):
    """target <- (1 - tau) * target + tau * online, in place."""
    if not 0.0 < tau <= 1.0:
        raise ValueError("tau must lie in (0, 1]")
    for name, tp in target_params.items():
        op = online_params[name]
        tp.data *= 1.0 - tau
        tp.data += tau * op.data
