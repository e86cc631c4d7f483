"""Pure-numpy kernel fallback, numerically identical to the compiled core.

Both backends evaluate Mish through the same single-exp identity
tanh(softplus(x)) = e(e+2)/(e^2+2e+2), e = exp(x), capped at x = 20,
so they agree to a couple of ulps.
"""

import numpy as np

BACKEND = "python"


def mish(x):
    x = np.asarray(x, dtype=np.float64)
    e = np.exp(np.minimum(x, 20.0))
    tsp = np.where(x > 20.0, 1.0, e * (e + 2.0) / (e * e + 2.0 * e + 2.0))
    return x * tsp


def mish_with_deriv(x):
    x = np.asarray(x, dtype=np.float64)
    big = x > 20.0
    e = np.exp(np.minimum(x, 20.0))
    tsp = np.where(big, 1.0, e * (e + 2.0) / (e * e + 2.0 * e + 2.0))
    sig = np.where(big, 1.0, e / (1.0 + e))
    return x * tsp, tsp + x * sig * (1.0 - tsp * tsp)


def adam_step(p, g, m, v, step, lr, beta1, beta2, eps):
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * (g * g)
    bc1 = 1.0 - beta1 ** step
    bc2 = 1.0 - beta2 ** step
    p -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
