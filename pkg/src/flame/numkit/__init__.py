"""Deterministic numeric core: tensors with reverse/forward-mode autodiff,
counter-based random streams, and elementary distributions."""

from .random import Rng
from .stats import (TruncatedNormalSpec, gaussian_log_density, logsumexp,
                    sample_truncated_normal, truncated_normal)
from .tensor import (Tensor, astensor, concat, cos, div, exp, jvp, log,
                     matmul, mish, mul, parameter, power, relu, reshape, sin,
                     sqrt, square, stop_gradient, tanh, tmean, tsum)

__all__ = [
    "Rng", "Tensor", "TruncatedNormalSpec", "astensor", "concat", "cos",
    "div", "exp", "gaussian_log_density", "jvp", "log", "logsumexp",
    "matmul", "mish", "mul", "parameter", "power", "relu", "reshape",
    "sample_truncated_normal", "sin", "sqrt", "square", "stop_gradient",
    "tanh", "tmean", "truncated_normal", "tsum",
]
