"""Shared test utilities: finite differences and frozen draws containers."""

import numpy as np

from arr2.inference.nuts import DrawsMatrix


def finite_difference(f, u, h=1e-5):
    """Central finite differences of a scalar function."""
    u = np.asarray(u, dtype=float)
    out = np.empty(u.size)
    for i in range(u.size):
        up, down = u.copy(), u.copy()
        up[i] += h
        down[i] -= h
        out[i] = (f(up) - f(down)) / (2.0 * h)
    return out


def max_rel_err(a, b):
    """Per-coordinate relative error with a unit floor on the denominator."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    denom = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / denom))


def frozen_draws(blocks, param_draws):
    """DrawsMatrix from explicit parameter dicts (single synthetic chain)."""
    return DrawsMatrix.from_param_draws(blocks, param_draws)
