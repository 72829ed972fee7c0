"""Rank witnesses against continuously differentiable perfect learners.

If a learner map ``pi`` satisfies ``theta(pi(theta(x))) = theta(x)`` and is
differentiable at ``(f(0), ..., f(0))``, then each probe-curve tangent
``f'(0) g(rho_i . gamma_j)_j`` is the image of a vector of R^q under one
fixed linear map.  Finding p > q such tangents that are linearly independent
is therefore a contradiction.  This module builds such instances and measures
their rank.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .activations import Activation
from .detprobe import DEFAULT_MAX_ATTEMPTS, DEFAULT_NODE_RANGE, DEFAULT_TOL, draw_node_sets
from .linalg import hadamard_ratio, jacobi_svd, lu_det, numerical_rank, rank_threshold
from .network import Dims, ParamVec, beta_tangent, theta

CONTRADICTION = "contradiction-witnessed"
TOO_SMALL = "no-contradiction-at-this-size"
RANK_DEFICIENT = "rank-deficient"
SEARCH_FAILED = "point-search-failed"

NOTES = (
    "The final dimension count is read as p <= m(n+2)+1, the number of network "
    "parameters; the printed bound m(m+2)+1 is treated as a typo.",
    "Nonvanishing of det(g(rho_i . gamma_j)) is certified only for the sampled "
    "points, not as an identity in indeterminates.",
)


@dataclass
class PointSearch:
    rho: Optional[np.ndarray]
    gamma: Optional[np.ndarray]
    det: float
    scaled_det: float
    attempts: int
    success: bool


def find_nondegenerate_points(g: Activation, dims: Dims, seed: int,
                              max_attempts: int = DEFAULT_MAX_ATTEMPTS, tol: float = DEFAULT_TOL,
                              node_range: float = DEFAULT_NODE_RANGE) -> PointSearch:
    """Rejection-sample ``rho_i, gamma_j`` in R^n with Hadamard-scaled
    ``|det(g(rho_i . gamma_j))| > tol``.  Uses the same random stream as
    :func:`perfectlab.detprobe.probe_nonvanishing`, so for n = 1 both see the
    same nodes."""
    rng = np.random.default_rng(seed)
    last = PointSearch(None, None, 0.0, 0.0, 0, False)
    for attempt in range(1, max_attempts + 1):
        rho, gamma = draw_node_sets(rng, dims.p, dims.n, node_range)
        G = np.atleast_2d(g(rho @ gamma.T))
        scaled = hadamard_ratio(G)
        last = PointSearch(rho, gamma, lu_det(G), scaled, attempt, scaled > tol)
        if last.success:
            break
    return last


def tangent_family(f: Activation, g: Activation, dims: Dims, rho, gamma) -> np.ndarray:
    """``(p, p)`` matrix whose row i is the probe-curve tangent for ``rho_i``."""
    rho = np.atleast_2d(np.asarray(rho, dtype=np.float64))
    return np.stack([beta_tangent(dims, f, g, r, gamma) for r in rho])


def verdict(rank: int, p: int, q: int, search_ok: bool = True) -> str:
    if not search_ok:
        return SEARCH_FAILED
    if p <= q:
        return TOO_SMALL
    return CONTRADICTION if rank == p else RANK_DEFICIENT


@dataclass
class WitnessReport:
    dims: Dims
    f: str
    g: str
    seed: int
    rho: Optional[np.ndarray]
    gamma: Optional[np.ndarray]
    attempts: int
    det: float
    scaled_det: float
    singular_values: np.ndarray
    rank: int
    rank_threshold: float
    verdict: str
    notes: tuple[str, ...] = NOTES
    argument: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "dims": self.dims.to_dict(), "f": self.f, "g": self.g, "seed": self.seed,
            "rho": None if self.rho is None else self.rho.tolist(),
            "gamma": None if self.gamma is None else self.gamma.tolist(),
            "attempts": self.attempts, "det": self.det, "scaled_det": self.scaled_det,
            "singular_values": self.singular_values.tolist(), "tangent_rank": self.rank,
            "rank_threshold": self.rank_threshold, "jacobian_width": self.dims.q,
            "verdict": self.verdict, "argument": self.argument, "notes": list(self.notes),
        }


def _argument(dims: Dims, rank: int, v: str) -> list[str]:
    p, q = dims.p, dims.q
    lines = [
        "All probe curves start at the same parameter point, whose image is (f(0), ..., f(0)).",
        f"A perfect learner pi differentiable there gives, by the chain rule on theta o pi o theta = theta, "
        f"tangent_i = M u_i with one fixed linear map M = d(theta) : R^{q} -> R^{p} and u_i in R^{q}.",
        f"Hence rank(tangent family) <= {q}. Measured rank: {rank} of {p}.",
    ]
    if v == CONTRADICTION:
        lines.append(f"{rank} > {q}: no such learner can exist for these points.")
    elif v == TOO_SMALL:
        lines.append(f"p = {p} <= q = {q}: the count leaves room for a perfect learner at this size.")
    elif v == RANK_DEFICIENT:
        lines.append("The tangent family is numerically rank deficient; no conclusion.")
    else:
        lines.append("No nondegenerate points were found; no conclusion.")
    return lines


def unfeasibility_witness(f: Activation, g: Activation, dims: Dims, seed: int,
                          max_attempts: int = DEFAULT_MAX_ATTEMPTS, tol: float = DEFAULT_TOL,
                          node_range: float = DEFAULT_NODE_RANGE) -> WitnessReport:
    search = find_nondegenerate_points(g, dims, seed, max_attempts, tol, node_range)
    if search.rho is None:
        sigma, rank, thr = np.zeros(0), 0, 0.0
    else:
        family = tangent_family(f, g, dims, search.rho, search.gamma)
        sigma = jacobi_svd(family)
        rank = numerical_rank(sigma, family.shape)
        thr = rank_threshold(sigma, family.shape)
    v = verdict(rank, dims.p, dims.q, search.success)
    return WitnessReport(dims, f.name, g.name, seed, search.rho, search.gamma, search.attempts,
                         search.det, search.scaled_det, sigma, rank, thr, v,
                         argument=_argument(dims, rank, v))


Learner = Callable[[np.ndarray], object]


def _as_params(dims: Dims, x) -> ParamVec:
    return x if isinstance(x, ParamVec) else ParamVec.from_flat(dims, x)


def perfect_map_residual(f: Activation, g: Activation, dims: Dims, gamma, pi: Learner, params0) -> float:
    """``|| theta(pi(theta(params0))) - theta(params0) ||_2``."""
    target = theta(dims, f, g, gamma, _as_params(dims, params0))
    learned = _as_params(dims, pi(target))
    return float(np.linalg.norm(theta(dims, f, g, gamma, learned) - target))


@dataclass
class DifferentiabilityProbe:
    base: np.ndarray
    steps: tuple[float, ...]
    directions: np.ndarray
    deviations: list[float]

    @property
    def max_deviation(self) -> float:
        return max(self.deviations)

    def to_dict(self) -> dict:
        return {"base": self.base.tolist(), "steps": list(self.steps),
                "directions": self.directions.tolist(), "deviations": self.deviations,
                "max_deviation": self.max_deviation}


def _relative_gap(x: np.ndarray, y: np.ndarray) -> float:
    scale = max(np.linalg.norm(x), np.linalg.norm(y))
    return 0.0 if scale == 0.0 else float(np.linalg.norm(x - y) / scale)


def pi_point_differentiability_probe(pi: Learner, f: Activation, dims: Dims, gamma=None, seed: int = 0,
                                     n_directions: int = 5,
                                     steps: Sequence[float] = (1e-2, 1e-3, 1e-4)) -> DifferentiabilityProbe:
    """Difference quotients of ``pi`` at ``(f(0), ..., f(0))``.

    For each random unit direction, forward and backward quotients are taken at
    every step size; the reported deviation is the largest pairwise relative
    gap among them.  Small gaps are consistent with differentiability there,
    gaps of order one are not.  ``gamma`` is accepted for symmetry with the
    learner's construction and is not read.
    """
    rng = np.random.default_rng(seed)
    base = np.full(dims.p, f.value_at_zero)
    at_base = np.asarray(_flat(pi(base.copy())), dtype=np.float64)
    dirs = rng.normal(size=(n_directions, dims.p))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    deviations = []
    for u in dirs:
        quotients = []
        for h in steps:
            fwd = np.asarray(_flat(pi(base + h * u)), dtype=np.float64)
            bwd = np.asarray(_flat(pi(base - h * u)), dtype=np.float64)
            quotients += [(fwd - at_base) / h, (at_base - bwd) / h]
        deviations.append(max(_relative_gap(x, y) for i, x in enumerate(quotients)
                              for y in quotients[i + 1:]))
    return DifferentiabilityProbe(base, tuple(steps), dirs, deviations)


def _flat(x):
    return x.flatten() if isinstance(x, ParamVec) else x
