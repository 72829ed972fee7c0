"""Three-layer network ``f(s + v . g(t + w x))`` with one output.

The flat parameter layout is ``(v, s, w row-major, t)``, length
``q = m(n + 2) + 1``.  Every gradient and Jacobian in the package uses it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .activations import Activation

MIN_SEPARATION = 1e-6


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class Dims:
    m: int
    n: int
    p: int

    def __post_init__(self):
        for name in ("m", "n", "p"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, (int, np.integer)) or val < 1:
                raise ValueError(f"{name} must be a positive integer, got {val!r}")

    @property
    def q(self) -> int:
        return self.m * (self.n + 2) + 1

    def slices(self) -> dict[str, slice]:
        m, n = self.m, self.n
        return {
            "v": slice(0, m),
            "s": slice(m, m + 1),
            "w": slice(m + 1, m + 1 + m * n),
            "t": slice(m + 1 + m * n, 2 * m + 1 + m * n),
        }

    def to_dict(self) -> dict:
        return {"m": self.m, "n": self.n, "p": self.p, "q": self.q}


@dataclass(eq=False)
class ParamVec:
    v: np.ndarray
    s: float
    w: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=np.float64).reshape(-1)
        self.s = float(self.s)
        self.w = np.atleast_2d(np.asarray(self.w, dtype=np.float64))
        self.t = np.asarray(self.t, dtype=np.float64).reshape(-1)
        m = self.v.size
        if self.w.shape[0] != m or self.t.size != m:
            raise ShapeError(f"inconsistent shapes: v {self.v.shape}, w {self.w.shape}, t {self.t.shape}")

    @property
    def m(self) -> int:
        return self.v.size

    @property
    def n(self) -> int:
        return self.w.shape[1]

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.v, [self.s], self.w.ravel(), self.t])

    @classmethod
    def from_flat(cls, dims: Dims, x) -> "ParamVec":
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.size != dims.q:
            raise ShapeError(f"expected {dims.q} parameters, got {x.size}")
        sl = dims.slices()
        return cls(x[sl["v"]].copy(), x[sl["s"]][0], x[sl["w"]].reshape(dims.m, dims.n).copy(),
                   x[sl["t"]].copy())

    @classmethod
    def zeros(cls, dims: Dims) -> "ParamVec":
        return cls.from_flat(dims, np.zeros(dims.q))

    def check(self, dims: Dims) -> None:
        if self.m != dims.m or self.n != dims.n:
            raise ShapeError(f"parameters are for (m, n) = ({self.m}, {self.n}), expected ({dims.m}, {dims.n})")


def min_pairwise_distance(points) -> float:
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] < 2:
        return float("inf")
    diff = X[:, None, :] - X[None, :, :]
    d = np.sqrt(np.sum(diff * diff, axis=-1))
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def sample_distinct_points(rng: np.random.Generator, p: int, n: int, low: float, high: float,
                           min_dist: float = MIN_SEPARATION, max_redraws: int = 10_000) -> np.ndarray:
    """Uniform points in ``[low, high]^n``; a point closer than ``min_dist`` to an
    earlier one is redrawn."""
    pts = np.empty((p, n))
    redraws = 0
    for i in range(p):
        while True:
            x = rng.uniform(low, high, n)
            if i == 0 or np.min(np.linalg.norm(pts[:i] - x, axis=1)) >= min_dist:
                break
            redraws += 1
            if redraws > max_redraws:
                raise RuntimeError("could not draw pairwise-distinct points")
        pts[i] = x
    return pts


@dataclass(eq=False)
class TrainingSet:
    gamma: np.ndarray
    zeta: np.ndarray

    def __post_init__(self):
        self.gamma = np.atleast_2d(np.asarray(self.gamma, dtype=np.float64))
        self.zeta = np.asarray(self.zeta, dtype=np.float64).reshape(-1)
        if self.gamma.shape[0] == 0:
            raise ValueError("a training set needs at least one sample")
        if self.gamma.shape[0] != self.zeta.size:
            raise ShapeError(f"{self.gamma.shape[0]} inputs but {self.zeta.size} targets")
        if min_pairwise_distance(self.gamma) <= 0.0:
            raise ValueError("training inputs must be pairwise distinct")

    @property
    def p(self) -> int:
        return self.zeta.size


def _check_inputs(dims: Dims, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != dims.n:
        raise ShapeError(f"inputs must have {dims.n} columns, got shape {X.shape}")
    return X


def _check_gammas(dims: Dims, gammas) -> np.ndarray:
    X = _check_inputs(dims, gammas)
    if X.shape[0] != dims.p:
        raise ShapeError(f"expected {dims.p} inputs, got {X.shape[0]}")
    return X


def _coerce_params(dims: Dims, params) -> ParamVec:
    if not isinstance(params, ParamVec):
        params = ParamVec.from_flat(dims, params)
    params.check(dims)
    return params


def _layers(g: Activation, params: ParamVec, X: np.ndarray):
    pre = X @ params.w.T + params.t          # (p, m)
    h = np.atleast_2d(g(pre))
    z = params.s + h @ params.v               # (p,)
    return pre, h, z


def forward(dims: Dims, f: Activation, g: Activation, params, x) -> float:
    """Network output at a single input ``x``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (dims.n,):
        raise ShapeError(f"input must have shape ({dims.n},), got {x.shape}")
    return float(outputs(dims, f, g, params, x[None, :])[0])


def outputs(dims: Dims, f: Activation, g: Activation, params, X) -> np.ndarray:
    """Network outputs at the rows of ``X``."""
    params = _coerce_params(dims, params)
    X = _check_inputs(dims, X)
    _, _, z = _layers(g, params, X)
    return np.atleast_1d(f(z))


def theta(dims: Dims, f: Activation, g: Activation, gammas, params) -> np.ndarray:
    """Evaluation map: parameters to the vector of outputs at the fixed inputs."""
    return outputs(dims, f, g, params, _check_gammas(dims, gammas))


def _outputs_and_jacobian(f: Activation, g: Activation, params: ParamVec, X: np.ndarray):
    pre, h, z = _layers(g, params, X)
    out = np.atleast_1d(f(z))
    fp = np.atleast_1d(f.deriv(z))
    inner = np.atleast_2d(g.deriv(pre)) * params.v    # d z / d t_k
    dw = inner[:, :, None] * X[:, None, :]             # (p, m, n)
    J = np.concatenate([h, np.ones((X.shape[0], 1)), dw.reshape(X.shape[0], -1), inner], axis=1)
    return out, fp[:, None] * J


def theta_jacobian(dims: Dims, f: Activation, g: Activation, gammas, params) -> np.ndarray:
    """``(p, q)`` matrix; row i is the parameter gradient of the output at ``gammas[i]``."""
    params = _coerce_params(dims, params)
    return _outputs_and_jacobian(f, g, params, _check_gammas(dims, gammas))[1]


def _check_data(dims: Dims, data: TrainingSet) -> None:
    if data.p != dims.p:
        raise ShapeError(f"training set has {data.p} samples, dims say p = {dims.p}")
    _check_inputs(dims, data.gamma)


def residuals(dims: Dims, f: Activation, g: Activation, params, data: TrainingSet) -> np.ndarray:
    _check_data(dims, data)
    return data.zeta - outputs(dims, f, g, params, data.gamma)


def error(dims: Dims, f: Activation, g: Activation, params, data: TrainingSet) -> float:
    """Quadratic error: sum of squared residuals."""
    r = residuals(dims, f, g, params, data)
    return float(r @ r)


def error_gradient(dims: Dims, f: Activation, g: Activation, params, data: TrainingSet) -> np.ndarray:
    return error_and_gradient(dims, f, g, params, data)[1]


def error_and_gradient(dims: Dims, f: Activation, g: Activation, params, data: TrainingSet):
    """Quadratic error and its gradient (backpropagation through f and g)."""
    _check_data(dims, data)
    out, J = _outputs_and_jacobian(f, g, _coerce_params(dims, params), data.gamma)
    r = data.zeta - out
    return float(r @ r), -2.0 * (J.T @ r)


def beta(dims: Dims, rho, V1: float) -> ParamVec:
    """Probe curve: only the first hidden unit is active, with input weights
    ``rho`` and output weight ``V1``; every threshold is zero."""
    rho = np.asarray(rho, dtype=np.float64).reshape(-1)
    if rho.size != dims.n:
        raise ShapeError(f"rho must have length {dims.n}")
    v = np.zeros(dims.m)
    v[0] = V1
    w = np.zeros((dims.m, dims.n))
    w[0] = rho
    return ParamVec(v, 0.0, w, np.zeros(dims.m))


def beta_tangent(dims: Dims, f: Activation, g: Activation, rho, gammas) -> np.ndarray:
    """Closed-form ``d/dV1 theta(beta(rho, V1))`` at ``V1 = 0``:
    ``f'(0) * g(rho . gamma_j)`` for each j."""
    rho = np.asarray(rho, dtype=np.float64).reshape(-1)
    X = _check_gammas(dims, gammas)
    return f.deriv_at_zero * np.atleast_1d(g(X @ rho))
