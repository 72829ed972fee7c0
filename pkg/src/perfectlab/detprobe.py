"""Numerical probes for ``det(g(a_i b_j)) != 0`` and the derivative identities
behind it.

For the expansion along the first column, ``det = sum_i g(a_i b_1) M_i`` with
signed cofactors ``M_i`` that do not depend on ``b_1``.  For an activation with
``g' = G(g)`` the k-th ``b_1``-derivative of the determinant is
``sum_i P_k(g(a_i b_1)) a_i^k M_i``; for sine the first derivative at
``b_1 = 0`` is ``sum_i a_i M_i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .activations import SIN, Activation, Kind
from .linalg import hadamard_ratio, lu_det
from .network import MIN_SEPARATION, min_pairwise_distance
from .numdiff import richardson_derivative
from .symbolic import pk_sequence

DEFAULT_TOL = 1e-12
DEFAULT_NODE_RANGE = 4.0
DEFAULT_MAX_ATTEMPTS = 100


def g_matrix(g: Activation, a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    return np.atleast_2d(g(np.outer(a, b)))


def det_g_matrix(g: Activation, a, b) -> float:
    """``det(g(a_i * b_j))`` by partially pivoted LU."""
    M = g_matrix(g, a, b)
    if M.shape[0] != M.shape[1]:
        raise ValueError("a and b must have the same length")
    return lu_det(M)


def draw_node_sets(rng: np.random.Generator, p: int, n: int, node_range: float,
                   min_dist: float = MIN_SEPARATION, max_redraws: int = 10_000):
    """Two ``(p, n)`` arrays, uniform in ``[-node_range, node_range]``, each with
    pairwise-distinct rows.  A coincidence redraws both arrays."""
    for _ in range(max_redraws):
        A = rng.uniform(-node_range, node_range, (p, n))
        B = rng.uniform(-node_range, node_range, (p, n))
        if min_pairwise_distance(A) >= min_dist and min_pairwise_distance(B) >= min_dist:
            return A, B
    raise RuntimeError("could not draw pairwise-distinct nodes")


@dataclass
class DetSample:
    a: np.ndarray
    b: np.ndarray
    det: float
    scaled: float
    passed: bool

    def to_dict(self) -> dict:
        return {"a": self.a.tolist(), "b": self.b.tolist(), "det": self.det,
                "scaled": self.scaled, "passed": self.passed}


@dataclass
class DetProbeReport:
    kind: str
    p: int
    seed: int
    tol: float
    max_attempts: int
    node_range: float
    samples: list[DetSample] = field(default_factory=list)
    identity_residuals: dict[str, float] = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return bool(self.samples) and self.samples[-1].passed

    @property
    def attempts(self) -> int:
        return len(self.samples)

    @property
    def first_success(self) -> Optional[DetSample]:
        return self.samples[-1] if self.success else None

    def to_dict(self) -> dict:
        first = self.first_success
        return {
            "activation": self.kind, "p": self.p, "seed": self.seed, "tol": self.tol,
            "max_attempts": self.max_attempts, "node_range": self.node_range,
            "success": self.success, "attempts": self.attempts,
            "first_success": None if first is None else {"attempt": self.attempts - 1, **first.to_dict()},
            "samples": [s.to_dict() for s in self.samples],
            "identity_residuals": self.identity_residuals,
        }


def probe_nonvanishing(g: Activation, p: int, seed: int, max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                       tol: float = DEFAULT_TOL, node_range: float = DEFAULT_NODE_RANGE,
                       identity_checks: bool = False) -> DetProbeReport:
    """Sample nodes until the Hadamard-scaled ``|det(g(a_i b_j))|`` exceeds ``tol``.

    Running out of attempts gives a report with ``success`` false, not an error.
    """
    if p < 1:
        raise ValueError("p must be positive")
    rng = np.random.default_rng(seed)
    report = DetProbeReport(g.name, p, seed, tol, max_attempts, node_range)
    for _ in range(max_attempts):
        A, B = draw_node_sets(rng, p, 1, node_range)
        a, b = A[:, 0], B[:, 0]
        M = g_matrix(g, a, b)
        det = lu_det(M)
        scaled = hadamard_ratio(M)
        report.samples.append(DetSample(a, b, det, scaled, scaled > tol))
        if scaled > tol:
            break
    if identity_checks and report.success and p >= 2:
        s = report.first_success
        if g.algdiff is not None:
            for k in (1, 2):
                report.identity_residuals[f"derivative_order_{k}"] = estrella_identity_check(g, s.a, s.b, k)
        elif g.kind is Kind.SIN:
            report.identity_residuals["sin_first_derivative"] = sin_derivative_identity_check(s.a, s.b)
    return report


def cofactors_first_column(g: Activation, a, b) -> np.ndarray:
    """Signed cofactors ``M_i`` of the first column of ``g(a_i b_j)``.

    Only ``b[1:]`` is read, so the result cannot depend on ``b_1``.
    """
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    p = a.size
    if p < 2 or b.size != p:
        raise ValueError("need p >= 2 and len(a) == len(b)")
    rest = g_matrix(g, a, b[1:])                       # (p, p-1)
    M = np.empty(p)
    for i in range(p):
        minor = np.delete(rest, i, axis=0)
        M[i] = (-1.0) ** i * lu_det(minor)
    return M


def _det_in_b1(g: Activation, a, b):
    b = np.asarray(b, dtype=np.float64).copy()

    def D(b1: float) -> float:
        b[0] = b1
        return det_g_matrix(g, a, b)
    return D


def estrella_rhs(g: Activation, a, b, k: int) -> float:
    """``sum_i P_k(g(a_i b_1)) a_i^k M_i`` with ``P_k`` from the exact recursion."""
    data = g.algdiff
    if data is None:
        raise ValueError(f"{g.name} has no polynomial algebro-differential data")
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    Pk = pk_sequence(data.G, data.g0, k)[k].poly
    M = cofactors_first_column(g, a, b)
    return float(np.sum(Pk.eval_float(g(a * b[0])) * a ** k * M))


def estrella_identity_check(g: Activation, a, b, k: int) -> float:
    """Normalized residual between the numeric k-th ``b_1``-derivative of the
    determinant and :func:`estrella_rhs`; ``k`` must be 1 or 2."""
    if k not in (1, 2):
        raise ValueError("finite differences are only trusted for k in {1, 2}")
    rhs = estrella_rhs(g, a, b, k)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    lhs = richardson_derivative(_det_in_b1(g, a, b), float(b[0]), k)
    return abs(lhs - rhs) / (abs(rhs) + 1.0)


def sin_first_derivative_rhs(a, M) -> float:
    return float(np.dot(np.asarray(a, dtype=np.float64), np.asarray(M, dtype=np.float64)))


def sin_derivative_identity_check(a, b, k: int = 0) -> float:
    """Residual of ``d/db_1 det(sin(a_i b_j)) |_{b_1=0} = sum_i a_i M_i``.

    ``b[0]`` is ignored (the derivative is taken at ``b_1 = 0``).  Only the
    first-order member (``k = 0``) of the odd-order family is checked.
    """
    if k != 0:
        raise ValueError("only the first-order identity (k = 0) is checked numerically")
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1).copy()
    b[0] = 0.0
    M = cofactors_first_column(SIN, a, b)
    rhs = sin_first_derivative_rhs(a, M)
    lhs = richardson_derivative(_det_in_b1(SIN, a, b), 0.0, 1)
    return abs(lhs - rhs) / (abs(rhs) + 1.0)
