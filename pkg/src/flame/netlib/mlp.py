"""MLPs with Mish activations, sinusoidal time embeddings, and the
velocity-field networks built from them.

Every network exposes three evaluation paths that share the same arithmetic:
a taped path (Tensors, for losses that need parameter gradients), a plain
ndarray path (sampling and candidate scoring), and an ndarray forward-mode
path returning exact input-directional derivatives (divergence estimates
and average-velocity targets).  The value parts of all three agree bitwise,
which the likelihood integrator relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from .. import numkit as nk
from ..numkit import Rng, Tensor

INSTANTANEOUS = "instantaneous"
MEANFLOW = "meanflow"


@dataclass(frozen=True)
class MlpSpec:
    input_dim: int
    output_dim: int
    hidden_layers: int = 3
    hidden_width: int = 256
    activation: str = "mish"
    zero_init_final: bool = False

    def __post_init__(self):
        if min(self.input_dim, self.output_dim,
               self.hidden_layers, self.hidden_width) <= 0:
            raise ValueError("all MlpSpec dimensions must be positive")
        if self.activation not in ("mish", "relu"):
            raise ValueError(f"unknown activation {self.activation!r}")


class Mlp:
    """Fully connected network; hidden activations per spec, linear output."""

    def __init__(self, spec: MlpSpec, rng: Rng):
        self.spec = spec
        dims = ([spec.input_dim]
                + [spec.hidden_width] * spec.hidden_layers
                + [spec.output_dim])
        self.weights: list[Tensor] = []
        self.biases: list[Tensor] = []
        for i, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:])):
            last = i == len(dims) - 2
            if last and spec.zero_init_final:
                w = np.zeros((fan_in, fan_out))
            else:
                limit = np.sqrt(6.0 / (fan_in + fan_out))
                w = rng.uniform(-limit, limit, (fan_in, fan_out))
            self.weights.append(nk.parameter(w))
            self.biases.append(nk.parameter(np.zeros(fan_out)))

    def parameters(self) -> dict[str, Tensor]:
        out = {}
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            out[f"layers.{i}.w"] = w
            out[f"layers.{i}.b"] = b
        return out

    def _act(self, h: Tensor) -> Tensor:
        return nk.mish(h) if self.spec.activation == "mish" else nk.relu(h)

    def forward(self, x: Tensor) -> Tensor:
        h = nk.astensor(x)
        n = len(self.weights)
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = nk.matmul(h, w) + b
            if i < n - 1:
                h = self._act(h)
        return h

    __call__ = forward

    def forward_array(self, x: np.ndarray) -> np.ndarray:
        h = np.asarray(x, dtype=np.float64)
        n = len(self.weights)
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w.data
            h += b.data
            if i < n - 1:
                h = (kernels.mish(h) if self.spec.activation == "mish"
                     else np.maximum(h, 0.0))
        return h

    def forward_array_jvp(self, x, dx):
        """(f(x), J_x f · dx) without touching the tape."""
        h = np.asarray(x, dtype=np.float64)
        dh = np.asarray(dx, dtype=np.float64)
        n = len(self.weights)
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w.data
            h += b.data
            dh = dh @ w.data
            if i < n - 1:
                if self.spec.activation == "mish":
                    h, deriv = kernels.mish_with_deriv(h)
                else:
                    deriv = (h > 0.0).astype(np.float64)
                    h = np.maximum(h, 0.0)
                dh = dh * deriv
        return h, dh

    def copy_from(self, other: "Mlp"):
        for dst, src in zip(self.weights + self.biases,
                            other.weights + other.biases):
            dst.data[...] = src.data


@dataclass(frozen=True)
class TimeEmbedding:
    """Sinusoidal features of the flow time on geometrically spaced frequencies.

    Frequencies run from ``t_scale`` down to ``t_scale/base``, so times in
    [0, 1] resolve at every scale; all coordinates stay in [-1, 1].
    """

    dim: int = 64
    base: float = 1.0e4
    t_scale: float = 1.0e3
    freqs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dim <= 0 or self.dim % 2 != 0:
            raise ValueError("embedding dim must be even and positive")
        half = self.dim // 2
        object.__setattr__(
            self, "freqs",
            self.t_scale * self.base ** (-np.arange(half) / half))

    def embed_array(self, t: np.ndarray) -> np.ndarray:
        ang = np.asarray(t, dtype=np.float64)[:, None] * self.freqs[None, :]
        return np.concatenate([np.sin(ang), np.cos(ang)], axis=1)

    def embed_array_jvp(self, t, dt):
        t = np.asarray(t, dtype=np.float64)
        ang = t[:, None] * self.freqs[None, :]
        dang = np.asarray(dt, dtype=np.float64)[:, None] * self.freqs[None, :]
        sin, cos = np.sin(ang), np.cos(ang)
        return (np.concatenate([sin, cos], axis=1),
                np.concatenate([cos * dang, -sin * dang], axis=1))

    def embed(self, t: Tensor) -> Tensor:
        ang = nk.mul(nk.reshape(t, (-1, 1)), Tensor(self.freqs[None, :]))
        return nk.concat([nk.sin(ang), nk.cos(ang)], axis=1)


def _as_time_array(t, batch: int) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if t.ndim == 0:
        return np.full(batch, float(t))
    if t.shape != (batch,):
        raise ValueError(f"time must be scalar or shape ({batch},)")
    return t


class VectorFieldNet:
    """State-conditioned velocity network.

    ``instantaneous`` mode maps (a, t, s) to a velocity in R^d;
    ``meanflow`` mode maps (a, zeta, t, s) to the average velocity over
    [zeta, t] and requires zeta < t.  Time arguments enter as sinusoidal
    embeddings concatenated with the state before the first layer.
    """

    def __init__(self, action_dim: int, state_dim: int, mode: str,
                 rng: Rng, hidden_layers: int = 3, hidden_width: int = 256,
                 time_embed_dim: int = 64, zero_init_final: bool = True):
        if mode not in (INSTANTANEOUS, MEANFLOW):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.action_dim = action_dim
        self.state_dim = state_dim
        self.time_embed = TimeEmbedding(dim=time_embed_dim)
        n_time_slots = 2 if mode == MEANFLOW else 1
        in_dim = action_dim + state_dim + n_time_slots * time_embed_dim
        self.mlp = Mlp(MlpSpec(in_dim, action_dim,
                               hidden_layers=hidden_layers,
                               hidden_width=hidden_width,
                               zero_init_final=zero_init_final), rng)

    def parameters(self) -> dict[str, Tensor]:
        return self.mlp.parameters()

    def copy_from(self, other: "VectorFieldNet"):
        self.mlp.copy_from(other.mlp)

    def _check_times(self, t, zeta, batch):
        t = _as_time_array(t, batch)
        if self.mode == INSTANTANEOUS:
            if zeta is not None:
                raise ValueError("zeta supplied to an instantaneous field")
            return t, None
        if zeta is None:
            raise ValueError("meanflow field requires zeta")
        zeta = _as_time_array(zeta, batch)
        if np.any(zeta >= t):
            raise ValueError("meanflow field requires zeta < t")
        return t, zeta

    # -- taped path ---------------------------------------------------------

    @staticmethod
    def _as_time_tensor(t, arr) -> Tensor:
        if isinstance(t, Tensor):
            if t.data.shape != arr.shape:
                raise ValueError("taped time must have per-row shape (batch,)")
            return t
        return Tensor(arr)

    def forward_field(self, a, t, s, zeta=None) -> Tensor:
        a = nk.astensor(a)
        batch = a.shape[0]
        s = nk.astensor(s)
        t_arr, zeta_arr = self._check_times(
            t.data if isinstance(t, Tensor) else t,
            zeta.data if isinstance(zeta, Tensor) else zeta, batch)
        parts = [a, s]
        if self.mode == MEANFLOW:
            parts.append(self.time_embed.embed(
                self._as_time_tensor(zeta, zeta_arr)))
        parts.append(self.time_embed.embed(self._as_time_tensor(t, t_arr)))
        return self.mlp.forward(nk.concat(parts, axis=1))

    # -- ndarray paths --------------------------------------------------------

    def velocity_array(self, a, t, s) -> np.ndarray:
        a = np.asarray(a, dtype=np.float64)
        t, _ = self._check_times(t, None, a.shape[0])
        x = np.concatenate([a, s, self.time_embed.embed_array(t)], axis=1)
        return self.mlp.forward_array(x)

    def avg_velocity_array(self, a, zeta, t, s) -> np.ndarray:
        a = np.asarray(a, dtype=np.float64)
        t, zeta = self._check_times(t, zeta, a.shape[0])
        x = np.concatenate([a, s, self.time_embed.embed_array(zeta),
                            self.time_embed.embed_array(t)], axis=1)
        return self.mlp.forward_array(x)

    def velocity_jvp(self, a, da, t, dt, s):
        """(u, du) for tangents (da, dt) on (a, t); s held fixed."""
        a = np.asarray(a, dtype=np.float64)
        batch = a.shape[0]
        t, _ = self._check_times(t, None, batch)
        dt = _as_time_array(dt, batch)
        emb, demb = self.time_embed.embed_array_jvp(t, dt)
        s = np.asarray(s, dtype=np.float64)
        x = np.concatenate([a, s, emb], axis=1)
        dx = np.concatenate([da, np.zeros_like(s), demb], axis=1)
        return self.mlp.forward_array_jvp(x, dx)

    def avg_velocity_jvp(self, a, da, zeta, t, dt, s):
        """(u, du) for tangents (da, dt) on (a, t); zeta and s held fixed."""
        a = np.asarray(a, dtype=np.float64)
        batch = a.shape[0]
        t, zeta = self._check_times(t, zeta, batch)
        dt = _as_time_array(dt, batch)
        emb_t, demb_t = self.time_embed.embed_array_jvp(t, dt)
        emb_z = self.time_embed.embed_array(zeta)
        s = np.asarray(s, dtype=np.float64)
        x = np.concatenate([a, s, emb_z, emb_t], axis=1)
        dx = np.concatenate([da, np.zeros_like(s),
                             np.zeros_like(emb_z), demb_t], axis=1)
        return self.mlp.forward_array_jvp(x, dx)
