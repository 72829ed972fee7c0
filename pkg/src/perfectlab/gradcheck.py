"""Finite-difference checks of the analytic error gradient and evaluation Jacobian."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .activations import Activation
from .network import (Dims, ParamVec, TrainingSet, error, error_gradient, sample_distinct_points,
                      theta, theta_jacobian)
from .numdiff import central_gradient, central_jacobian

RTOL = 1e-6
ATOL = 1e-8


def violation(actual, expected, rtol: float = RTOL, atol: float = ATOL) -> float:
    """Largest ``|a - e| / max(rtol |e|, atol)``; at most 1 means every entry passes."""
    actual = np.asarray(actual, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    return float(np.max(np.abs(actual - expected) / np.maximum(rtol * np.abs(expected), atol)))


def random_instance(dims: Dims, rng: np.random.Generator, scale: float = 1.0):
    params = ParamVec.from_flat(dims, rng.uniform(-scale, scale, dims.q))
    gamma = sample_distinct_points(rng, dims.p, dims.n, -scale, scale)
    zeta = rng.uniform(-scale, scale, dims.p)
    return params, TrainingSet(gamma, zeta)


@dataclass
class GradCheck:
    dims: Dims
    f: str
    g: str
    gradient_violation: float
    jacobian_violation: float

    @property
    def passed(self) -> bool:
        return self.gradient_violation <= 1.0 and self.jacobian_violation <= 1.0

    def to_dict(self) -> dict:
        return {"dims": self.dims.to_dict(), "f": self.f, "g": self.g,
                "gradient_violation": self.gradient_violation,
                "jacobian_violation": self.jacobian_violation, "passed": self.passed}


def check_instance(dims: Dims, f: Activation, g: Activation, params: ParamVec, data: TrainingSet) -> GradCheck:
    x = params.flatten()
    grad = error_gradient(dims, f, g, params, data)
    fd_grad = central_gradient(lambda y: error(dims, f, g, y, data), x)
    jac = theta_jacobian(dims, f, g, data.gamma, params)
    fd_jac = central_jacobian(lambda y: theta(dims, f, g, data.gamma, y), x)
    return GradCheck(dims, f.name, g.name, violation(grad, fd_grad), violation(jac, fd_jac))


def check_random(dims: Dims, f: Activation, g: Activation, rng: np.random.Generator) -> GradCheck:
    params, data = random_instance(dims, rng)
    return check_instance(dims, f, g, params, data)
