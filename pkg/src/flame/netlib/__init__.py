"""Networks and optimization: Mish MLPs, time embeddings, velocity-field
nets, Adam with annealing, target tracking, checkpoint containers."""

from .checkpoint import load_arrays, pack_uint64, save_arrays, unpack_uint64
from .mlp import (INSTANTANEOUS, MEANFLOW, Mlp, MlpSpec, TimeEmbedding,
                  VectorFieldNet)
from .optim import Adam, polyak_update

__all__ = [
    "Adam", "INSTANTANEOUS", "MEANFLOW", "Mlp", "MlpSpec", "TimeEmbedding",
    "VectorFieldNet", "load_arrays", "pack_uint64", "polyak_update",
    "save_arrays", "unpack_uint64",
]
