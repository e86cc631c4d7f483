"""Timing comparison of the compiled kernel core against the numpy fallback.

Covers the three hot paths: fused Mish, fused Mish with derivative, and the
Adam update, plus an end-to-end MLP forward at candidate-scoring batch shape.
Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

import flame.kernels as active
import flame.kernels._py as pyk


def timeit(fn, repeats=30):
    fn()
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats * 1e3


def mlp_forward(mish_fn, x, weights, biases):
    h = x
    for i, (w, b) in enumerate(zip(weights, biases)):
        h = h @ w
        h += b
        if i < len(weights) - 1:
            h = mish_fn(h)
    return h


def main():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((19200, 64)) * 2.0

    rows = []

    def add(name, compiled_ms, python_ms):
        rows.append((name, compiled_ms, python_ms,
                     python_ms / compiled_ms if compiled_ms else float("nan")))

    add("mish (19200x64)",
        timeit(lambda: active.mish(x)),
        timeit(lambda: pyk.mish(x)))
    add("mish_with_deriv",
        timeit(lambda: active.mish_with_deriv(x)),
        timeit(lambda: pyk.mish_with_deriv(x)))

    shape = (256, 256)
    p1 = rng.standard_normal(shape)
    p2 = p1.copy()
    g = rng.standard_normal(shape)
    m1, v1 = np.zeros(shape), np.zeros(shape)
    m2, v2 = np.zeros(shape), np.zeros(shape)
    add("adam_step (256x256)",
        timeit(lambda: active.adam_step(p1, g, m1, v1, 5, 3e-4, 0.9, 0.999,
                                        1e-8), repeats=200),
        timeit(lambda: pyk.adam_step(p2, g, m2, v2, 5, 3e-4, 0.9, 0.999,
                                     1e-8), repeats=200))

    dims = [68, 64, 64, 64, 1]
    weights = [rng.standard_normal((a, b)) * 0.2
               for a, b in zip(dims[:-1], dims[1:])]
    biases = [np.zeros(b) for b in dims[1:]]
    xin = rng.standard_normal((19200, 68))
    add("mlp fwd 19200x(68-64-64-64-1)",
        timeit(lambda: mlp_forward(active.mish, xin, weights, biases)),
        timeit(lambda: mlp_forward(pyk.mish, xin, weights, biases)))

    print(f"active backend: {active.backend_name()}")
    header = f"{'kernel':34s} {'compiled ms':>12s} {'numpy ms':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, c_ms, p_ms, speedup in rows:
        print(f"{name:34s} {c_ms:12.3f} {p_ms:10.3f} {speedup:7.1f}x")
    if active.backend_name() != "compiled":
        print("note: compiled extension not built; both columns ran the "
              "numpy fallback")


if __name__ == "__main__":
    main()
