"""Uniform-sampling replay buffer over fixed-size transition storage."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numkit import Rng


@dataclass(frozen=True)
class Transition:
    """One environment step plus the base noise that generated the action."""

    s: np.ndarray
    a: np.ndarray
    r: float
    s2: np.ndarray
    done: bool
    a0: np.ndarray


class ReplayBuffer:
    def __init__(self, capacity: int, state_dim: int, action_dim: int,
                 action_lo=None, action_hi=None):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = int(capacity)
        self.s = np.zeros((capacity, state_dim))
        self.a = np.zeros((capacity, action_dim))
        self.r = np.zeros(capacity)
        self.s2 = np.zeros((capacity, state_dim))
        self.done = np.zeros(capacity)
        self.a0 = np.zeros((capacity, action_dim))
        self.action_lo = action_lo
        self.action_hi = action_hi
        self._next = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def push(self, s, a, r, s2, done, a0):
        a = np.asarray(a, dtype=np.float64)
        a0 = np.asarray(a0, dtype=np.float64)
        if not np.all(np.isfinite(a0)):
            raise ValueError("stored base noise must be finite")
        if self.action_lo is not None and (
                np.any(a < self.action_lo) or np.any(a > self.action_hi)):
            raise ValueError("action outside the configured bounds")
        i = self._next
        self.s[i] = s
        self.a[i] = a
        self.r[i] = r
        self.s2[i] = s2
        self.done[i] = float(done)
        self.a0[i] = a0
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, rng: Rng, batch: int) -> dict[str, np.ndarray]:
        if self._size < batch:
            raise ValueError(
                f"buffer holds {self._size} transitions, need {batch}")
        idx = rng.integers(0, self._size, batch)
        return {
            "s": self.s[idx], "a": self.a[idx], "r": self.r[idx],
            "s2": self.s2[idx], "done": self.done[idx], "a0": self.a0[idx],
        }
