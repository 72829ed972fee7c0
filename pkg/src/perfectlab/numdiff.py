"""Central finite differences used as independent oracles."""
from __future__ import annotations

from typing import Callable

import numpy as np

FD_STEP = 1e-5
RICHARDSON_STEP = 1e-4


def step_for(x: float, base: float = FD_STEP) -> float:
    return base * max(1.0, abs(x))


def central_gradient(F: Callable[[np.ndarray], float], x, base: float = FD_STEP) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    for j in range(x.size):
        h = step_for(x[j], base)
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        out[j] = (F(xp) - F(xm)) / (xp[j] - xm[j])
    return out


def central_jacobian(F: Callable[[np.ndarray], np.ndarray], x, base: float = FD_STEP) -> np.ndarray:
    """Columns are central differences of the vector map ``F``."""
    x = np.asarray(x, dtype=np.float64)
    cols = []
    for j in range(x.size):
        h = step_for(x[j], base)
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        cols.append((np.asarray(F(xp)) - np.asarray(F(xm))) / (xp[j] - xm[j]))
    return np.stack(cols, axis=-1)


def central_derivative(f: Callable[[float], float], x: float, base: float = FD_STEP) -> float:
    h = step_for(x, base)
    return (f(x + h) - f(x - h)) / (2.0 * h)


def _stencil(f, x, h, k):
    if k == 1:
        return (f(x + h) - f(x - h)) / (2.0 * h)
    if k == 2:
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    raise ValueError("only first and second derivatives are supported")


def richardson_derivative(f: Callable[[float], float], x: float, k: int = 1,
                          base: float = RICHARDSON_STEP) -> float:
    """k-th derivative (k in {1, 2}) from central stencils at h and 2h with one
    Richardson extrapolation step; both stencils have O(h^2) error."""
    h = step_for(x, base)
    d1 = _stencil(f, x, h, k)
    d2 = _stencil(f, x, 2.0 * h, k)
    return (4.0 * d1 - d2) / 3.0


def close(actual, expected, rtol: float = 1e-6, atol: float = 1e-8) -> np.ndarray:
    """Elementwise ``|a - e| <= max(rtol * |e|, atol)``."""
    actual = np.asarray(actual, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    return np.abs(actual - expected) <= np.maximum(rtol * np.abs(expected), atol)
