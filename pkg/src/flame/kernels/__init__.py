"""Hot-kernel dispatch: compiled extension when available, numpy otherwise.

Selection happens once at import.  FLAME_KERNEL_BACKEND=python|compiled
forces a backend (the latter raises if the extension is not built).
benchmarks/bench_kernels.py compares the two.
"""

import importlib
import os

import numpy as np

from . import _py

_FORCE = os.environ.get("FLAME_KERNEL_BACKEND")

_core = None
if _FORCE != "python":
    try:
        _core = importlib.import_module(__name__ + "._core")
    except ImportError:
        if _FORCE == "compiled":
            raise


def _as_flat(x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    return x, x.reshape(-1)


if _core is not None:
    BACKEND = "compiled"

    def mish(x):
        x, flat = _as_flat(x)
        out = np.empty_like(x)
        _core.mish(flat, out.reshape(-1))
        return out

    def mish_with_deriv(x):
        x, flat = _as_flat(x)
        out = np.empty_like(x)
        deriv = np.empty_like(x)
        _core.mish_with_deriv(flat, out.reshape(-1), deriv.reshape(-1))
        return out, deriv

    def adam_step(p, g, m, v, step, lr, beta1, beta2, eps):
        # p/m/v are updated in place and must not be silently copied.
        if not (p.flags.c_contiguous and m.flags.c_contiguous
                and v.flags.c_contiguous):
            raise ValueError("adam_step requires contiguous buffers")
        g = np.ascontiguousarray(g, dtype=np.float64)
        _core.adam_step(p.reshape(-1), g.reshape(-1), m.reshape(-1),
                        v.reshape(-1), step, lr, beta1, beta2, eps)

else:
    BACKEND = "python"
    mish = _py.mish
    mish_with_deriv = _py.mish_with_deriv
    adam_step = _py.adam_step


def backend_name() -> str:
    return BACKEND
