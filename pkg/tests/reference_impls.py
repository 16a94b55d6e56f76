"""Independent brute-force references the tests check the package against.

Everything here is deliberately naive: textbook recursion with no caching
or division tricks, double-loop forward passes, in-order accumulation.
"""

import numpy as np


def naive_basis(knots, k, i, x):
    """Two-term recursion for B_{k,i}(x), straight from the definition."""
    if k == 0:
        return 1.0 if knots[i] <= x < knots[i + 1] else 0.0
    left = 0.0
    if knots[i + k] != knots[i]:
        left = (x - knots[i]) / (knots[i + k] - knots[i]) * naive_basis(knots, k - 1, i, x)
    right = 0.0
    if knots[i + k + 1] != knots[i + 1]:
        right = (
            (knots[i + k + 1] - x)
            / (knots[i + k + 1] - knots[i + 1])
            * naive_basis(knots, k - 1, i + 1, x)
        )
    return left + right


def naive_basis_vector(cfg, x):
    return np.array([naive_basis(cfg.knots, cfg.k, i, x) for i in range(cfg.n_bases)])


def naive_silu(x):
    return x / (1.0 + np.exp(-x))


def naive_kan_layer(layer, x):
    """Double loop over outputs and inputs, in-order accumulation."""
    out = np.zeros(layer.n_out)
    for q in range(layer.n_out):
        acc = 0.0
        for p in range(layer.n_in):
            acc += layer.w_b[q, p] * naive_silu(x[p])
            basis = naive_basis_vector(layer.spline, float(np.clip(x[p], layer.spline.lo,
                                                                   np.nextafter(layer.spline.hi, layer.spline.lo))))
            for i in range(layer.spline.n_bases):
                acc += layer.t[q, p, i] * basis[i]
        out[q] = acc
    return out


def naive_mlp_layer(layer, x):
    out = np.zeros(layer.n_out)
    for q in range(layer.n_out):
        acc = layer.bias[q]
        for p in range(layer.n_in):
            acc += layer.weight[q, p] * x[p]
        out[q] = max(acc, 0.0) if layer.activation == "relu" else acc
    return out


def naive_network(net, x):
    out = np.asarray(x, dtype=float)
    for layer in net.layers:
        if layer.kind == "kan":
            out = naive_kan_layer(layer, out)
        else:
            out = naive_mlp_layer(layer, out)
    return out
