"""Small dense linear algebra: LU determinants and one-sided Jacobi SVD."""
from __future__ import annotations

import numpy as np

RANK_RTOL = 1e-12


def _lu_pivots(A) -> tuple[float, np.ndarray]:
    """Gaussian elimination with partial pivoting; returns (permutation sign, pivots)."""
    U = np.array(A, dtype=np.float64, copy=True)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {U.shape}")
    if not np.all(np.isfinite(U)):
        raise ValueError("matrix has non-finite entries")
    n = U.shape[0]
    sign = 1.0
    pivots = np.zeros(n)
    for k in range(n):
        piv = k + int(np.argmax(np.abs(U[k:, k])))
        if U[piv, k] == 0.0:
            return sign, pivots
        if piv != k:
            U[[k, piv]] = U[[piv, k]]
            sign = -sign
        pivots[k] = U[k, k]
        if k + 1 < n:
            l = U[k + 1:, k] / U[k, k]
            U[k + 1:, k:] -= np.outer(l, U[k, k:])
    return sign, pivots


def lu_det(A) -> float:
    """Determinant by LU factorization with partial pivoting."""
    sign, pivots = _lu_pivots(A)
    det = sign
    for u in pivots:
        det *= u
    return float(det)


def lu_slogdet(A) -> tuple[float, float]:
    """``(sign, log|det|)``; sign is 0 and log is -inf for a singular matrix."""
    sign, pivots = _lu_pivots(A)
    if np.any(pivots == 0.0):
        return 0.0, -np.inf
    return float(sign * np.prod(np.sign(pivots))), float(np.sum(np.log(np.abs(pivots))))


def hadamard_ratio(A) -> float:
    """``|det A| / prod(row 2-norms)``; lies in ``[0, 1]`` by Hadamard's inequality."""
    A = np.asarray(A, dtype=np.float64)
    norms = np.linalg.norm(A, axis=1)
    if np.any(norms == 0.0):
        return 0.0
    sign, logdet = lu_slogdet(A)
    if sign == 0.0:
        return 0.0
    # log space: the plain product underflows for large p
    # clip: rounding can push an orthogonal matrix a hair above 1
    return min(1.0, float(np.exp(logdet - np.sum(np.log(norms)))))


def jacobi_svd(A, tol: float | None = None, max_sweeps: int = 100, compute_uv: bool = False):
    """One-sided Jacobi SVD.

    Rotates column pairs of a working copy until all columns are mutually
    orthogonal; the column norms are then the singular values.  Returns the
    singular values in decreasing order, or ``(U, s, Vt)`` (thin) when
    ``compute_uv`` is set.
    """
    A = np.array(A, dtype=np.float64, copy=True)
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    transposed = A.shape[0] < A.shape[1]
    if transposed:
        A = A.T.copy()
    rows, cols = A.shape
    if tol is None:
        tol = rows * np.finfo(np.float64).eps
    V = np.eye(cols)
    # columns below this squared norm are round-off; rotating them never settles
    floor = (np.finfo(np.float64).eps * np.linalg.norm(A)) ** 2
    for _ in range(max_sweeps):
        rotated = False
        for i in range(cols - 1):
            for j in range(i + 1, cols):
                ai, aj = A[:, i], A[:, j]
                alpha = ai @ ai
                beta = aj @ aj
                gamma = ai @ aj
                if min(alpha, beta) <= floor or abs(gamma) <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                if abs(zeta) > 1e150:
                    t = 0.5 / zeta
                else:
                    t = np.copysign(1.0, zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                Ai = ai.copy()
                A[:, i] = c * Ai - s * aj
                A[:, j] = s * Ai + c * aj
                Vi = V[:, i].copy()
                V[:, i] = c * Vi - s * V[:, j]
                V[:, j] = s * Vi + c * V[:, j]
        if not rotated:
            break
    else:
        raise RuntimeError("Jacobi SVD did not converge")
    sigma = np.linalg.norm(A, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    if not compute_uv:
        return sigma
    V = V[:, order]
    A = A[:, order]
    U = np.zeros_like(A)
    nz = sigma > 0
    U[:, nz] = A[:, nz] / sigma[nz]
    if transposed:
        return V, sigma, U.T
    return U, sigma, V.T


def rank_threshold(sigma, shape: tuple[int, int], rtol: float = RANK_RTOL) -> float:
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.size == 0:
        return 0.0
    return float(sigma[0]) * max(shape) * rtol


def numerical_rank(sigma, shape: tuple[int, int], rtol: float = RANK_RTOL) -> int:
    """Count of singular values above ``sigma_1 * max(shape) * rtol``."""
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.sum(sigma > rank_threshold(sigma, shape, rtol)))
