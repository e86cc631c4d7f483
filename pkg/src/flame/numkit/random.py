"""Deterministic random streams on top of the counter-based Philox generator.

Each component of a run (environment, actor noise, trace probes, ...) pulls
its own named stream so the draw sequences are independent and reproducible
regardless of interleaving.  Stream derivation goes through SeedSequence
with a stable 64-bit hash of the label, so identical seeds give identical
streams on every platform.
"""

from __future__ import annotations

import hashlib

import numpy as np

_STATE_WORDS = 13  # counter(4) + key(2) + buffer(4) + pos/has32/uint


def _label_hash(label) -> int:
    raw = repr(label).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(raw, digest_size=8).digest(), "little")


class Rng:
    """A Philox-backed generator addressable by (seed, stream path)."""

    def __init__(self, seed: int, _path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = _path
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=_path)
        self.gen = np.random.Generator(np.random.Philox(seq))

    def stream(self, label) -> "Rng":
        """Independent child stream; same label always yields the same stream."""
        return Rng(self.seed, self.path + (_label_hash(label),))

    # -- draws -------------------------------------------------------------

    def standard_normal(self, shape=None):
        return self.gen.standard_normal(shape)

    def normal(self, mean=0.0, std=1.0, shape=None):
        return mean + std * self.gen.standard_normal(shape)

    def uniform(self, low=0.0, high=1.0, shape=None):
        return self.gen.uniform(low, high, shape)

    def random(self, shape=None):
        return self.gen.random(shape)

    def integers(self, low, high=None, shape=None):
        return self.gen.integers(low, high, size=shape)

    def rademacher(self, shape):
        return 2.0 * self.gen.integers(0, 2, size=shape).astype(np.float64) - 1.0

    # -- state snapshot ------------------------------------------------------

    def state_vector(self) -> np.ndarray:
        """Bit-generator state as a uint64 vector (for checkpoints)."""
        st = self.gen.bit_generator.state
        words = list(st["state"]["counter"]) + list(st["state"]["key"])
        words += list(st["buffer"])
        words += [st["buffer_pos"], st["has_uint32"], st["uinteger"]]
        return np.array(words, dtype=np.uint64)

    def set_state_vector(self, vec: np.ndarray):
        vec = np.asarray(vec, dtype=np.uint64)
        if vec.shape != (_STATE_WORDS,):
            raise ValueError(f"expected {_STATE_WORDS} state words")
        st = self.gen.bit_generator.state
        st["state"]["counter"] = vec[0:4].copy()
        st["state"]["key"] = vec[4:6].copy()
        st["buffer"] = vec[6:10].copy()
        st["buffer_pos"] = int(vec[10])
        st["has_uint32"] = int(vec[11])
        st["uinteger"] = int(vec[12])
        self.gen.bit_generator.state = st
