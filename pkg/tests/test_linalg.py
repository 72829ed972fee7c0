import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from perfectlab.linalg import hadamard_ratio, jacobi_svd, lu_det, lu_slogdet, numerical_rank


def leibniz_det(A):
    n = len(A)
    total = 0.0
    for perm in itertools.permutations(range(n)):
        inversions = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        total += (-1) ** inversions * math.prod(A[i][perm[i]] for i in range(n))
    return total


square = st.integers(1, 5).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(-3, 3, allow_nan=False)))


@given(square)
def test_lu_det_matches_leibniz(A):
    expected = leibniz_det(A.tolist())
    scale = math.prod(max(1.0, np.abs(row).sum()) for row in A)
    assert abs(lu_det(A) - expected) <= 1e-12 * scale


def test_lu_det_small_cases():
    assert lu_det([[2.0]]) == 2.0
    assert lu_det([[0.0, 1.0], [1.0, 0.0]]) == -1.0
    assert lu_det([[1.0, 2.0], [2.0, 4.0]]) == 0.0
    with pytest.raises(ValueError):
        lu_det([[1.0, np.nan], [0.0, 1.0]])
    with pytest.raises(ValueError):
        lu_det(np.ones((2, 3)))


def test_slogdet_consistent(rng):
    A = rng.normal(size=(7, 7))
    sign, logabs = lu_slogdet(A)
    assert sign * math.exp(logabs) == pytest.approx(lu_det(A), rel=1e-12)


@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(-10, 10, allow_nan=False)))
def test_jacobi_singular_values_match_lapack(A):
    s = jacobi_svd(A)
    ref = np.linalg.svd(A, compute_uv=False)
    assert np.allclose(s, ref, rtol=0, atol=1e-12 * max(1.0, ref[0]))


def test_jacobi_reconstruction(rng):
    for shape in [(6, 6), (9, 4), (4, 9)]:
        A = rng.normal(size=shape)
        U, s, Vt = jacobi_svd(A, compute_uv=True)
        np.testing.assert_allclose((U * s) @ Vt, A, atol=1e-13)
        np.testing.assert_allclose(U.T @ U, np.eye(s.size), atol=1e-13)
        assert np.all(np.diff(s) <= 0)


@pytest.mark.parametrize("r", [1, 2, 4, 6])
def test_rank_of_duplicated_rows(rng, r):
    base = rng.normal(size=(r, 8))
    A = base[np.arange(8) % r]
    assert numerical_rank(jacobi_svd(A), A.shape) == r


def test_hadamard_ratio_bounds(rng):
    Q, _ = np.linalg.qr(rng.normal(size=(5, 5)))
    assert hadamard_ratio(Q) == pytest.approx(1.0, abs=1e-14)
    assert hadamard_ratio(Q) <= 1.0
    A = rng.normal(size=(5, 5))
    assert 0.0 < hadamard_ratio(A) < 1.0
    A[1] = A[0]
    assert hadamard_ratio(A) < 1e-13
    assert hadamard_ratio(np.zeros((3, 3))) == 0.0
