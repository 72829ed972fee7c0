import numpy as np
import pytest
from hypothesis import given, strategies as st

from perfectlab.activations import LOGISTIC, SIN, TANH
from perfectlab.detprobe import probe_nonvanishing
from perfectlab.linalg import jacobi_svd, lu_det, numerical_rank
from perfectlab.network import Dims, ParamVec, beta, theta
from perfectlab.numdiff import central_jacobian
from perfectlab.witness import (CONTRADICTION, NOTES, RANK_DEFICIENT, SEARCH_FAILED, TOO_SMALL,
                                find_nondegenerate_points, perfect_map_residual,
                                pi_point_differentiability_probe, tangent_family, unfeasibility_witness,
                                verdict)


def test_one_dimensional_inputs_reduce_to_probe(act):
    for seed in range(5):
        probe = probe_nonvanishing(act, 4, seed)
        search = find_nondegenerate_points(act, Dims(2, 1, 4), seed)
        assert search.attempts == probe.attempts
        s = probe.first_success
        np.testing.assert_array_equal(search.rho[:, 0], s.a)
        np.testing.assert_array_equal(search.gamma[:, 0], s.b)
        assert search.det == s.det


def test_single_point_search(act):
    search = find_nondegenerate_points(act, Dims(1, 3, 1), seed=0)
    assert search.success
    assert act(float(search.rho[0] @ search.gamma[0])) != 0.0


def test_search_n2_p5_tanh():
    search = find_nondegenerate_points(TANH, Dims(2, 2, 5), seed=42)
    assert search.success and search.attempts <= 100


@pytest.mark.parametrize("f", [LOGISTIC, TANH, SIN], ids=lambda a: a.name)
def test_family_determinant_is_scaled_g_determinant(f, act):
    d = Dims(2, 2, 6)
    s = find_nondegenerate_points(act, d, seed=3)
    fam = tangent_family(f, act, d, s.rho, s.gamma)
    G = np.atleast_2d(act(s.rho @ s.gamma.T))
    expected = f.deriv_at_zero ** d.p * lu_det(G)
    assert abs(lu_det(fam) - expected) <= 1e-10 * abs(expected)


def test_logistic_rows_are_quarter_scaled():
    d = Dims(2, 2, 4)
    s = find_nondegenerate_points(TANH, d, seed=1)
    np.testing.assert_allclose(tangent_family(LOGISTIC, TANH, d, s.rho, s.gamma),
                               0.25 * TANH(s.rho @ s.gamma.T), rtol=1e-15, atol=1e-16)


def test_family_rows_match_finite_differences(rng):
    d = Dims(2, 3, 5)
    s = find_nondegenerate_points(TANH, d, seed=8)
    fam = tangent_family(LOGISTIC, TANH, d, s.rho, s.gamma)
    for i, r in enumerate(s.rho):
        fd = central_jacobian(lambda V: theta(d, LOGISTIC, TANH, s.gamma, beta(d, r, V[0])), np.zeros(1))[:, 0]
        np.testing.assert_allclose(fam[i], fd, rtol=1e-6, atol=1e-8)


@pytest.mark.parametrize("r", [1, 3, 5])
def test_rank_with_forced_duplicates(rng, r):
    base = rng.normal(size=(r, 8))
    fam = base[np.arange(8) % r]
    assert numerical_rank(jacobi_svd(fam), fam.shape) == r


@given(st.integers(1, 40), st.integers(1, 40), st.integers(0, 40), st.booleans())
def test_verdict_logic(p, q, rank, ok):
    rank = min(rank, p)
    v = verdict(rank, p, q, ok)
    if not ok:
        assert v == SEARCH_FAILED
    elif rank == p and p > q:
        assert v == CONTRADICTION
    elif p <= q:
        assert v == TOO_SMALL
    else:
        assert v == RANK_DEFICIENT


@given(st.lists(st.floats(0, 10), min_size=1, max_size=20), st.integers(1, 30))
def test_verdict_on_synthetic_spectra(sigmas, q):
    sigma = np.sort(np.array(sigmas))[::-1]
    p = sigma.size
    rank = numerical_rank(sigma, (p, p))
    v = verdict(rank, p, q)
    assert (v == CONTRADICTION) == (rank == p and p > q)


@pytest.mark.parametrize("g", [TANH, LOGISTIC], ids=lambda a: a.name)
def test_witness_contradiction(g):
    rep = unfeasibility_witness(g, g, Dims(2, 2, 12), seed=7)
    assert rep.verdict == CONTRADICTION
    assert rep.rank == 12
    doc = rep.to_dict()
    assert doc["jacobian_width"] == 9
    assert doc["notes"] == list(NOTES)
    assert len(doc["rho"]) == 12 and len(doc["gamma"]) == 12


def test_witness_small_p():
    assert unfeasibility_witness(TANH, TANH, Dims(2, 2, 5), seed=0).verdict == TOO_SMALL
    assert unfeasibility_witness(TANH, TANH, Dims(2, 2, 1), seed=0).verdict == TOO_SMALL


def test_witness_search_failure():
    rep = unfeasibility_witness(TANH, TANH, Dims(2, 2, 12), seed=0, max_attempts=2, tol=1.0)
    assert rep.verdict == SEARCH_FAILED


@pytest.mark.parametrize("scale", [0.5, 2.0, -1.0])
def test_rho_scaling_keeps_verdict(scale):
    d = Dims(2, 2, 12)
    s = find_nondegenerate_points(TANH, d, seed=4)
    for c in (1.0, scale):
        fam = tangent_family(TANH, TANH, d, c * s.rho, s.gamma)
        rank = numerical_rank(jacobi_svd(fam), fam.shape)
        assert verdict(rank, d.p, d.q) == CONTRADICTION


def test_witness_is_deterministic():
    a = unfeasibility_witness(SIN, TANH, Dims(2, 2, 12), seed=9).to_dict()
    b = unfeasibility_witness(SIN, TANH, Dims(2, 2, 12), seed=9).to_dict()
    assert a == b


def test_perfect_map_oracle(rng):
    d = Dims(2, 2, 12)
    gamma = rng.normal(size=(12, 2))
    params0 = ParamVec.from_flat(d, rng.normal(size=d.q))
    assert perfect_map_residual(TANH, TANH, d, gamma, lambda z: params0, params0) == 0.0


def test_perfect_map_constant_learner(rng):
    d = Dims(2, 2, 6)
    gamma = rng.normal(size=(6, 2))
    params0 = ParamVec.from_flat(d, rng.normal(size=d.q))
    res = perfect_map_residual(LOGISTIC, TANH, d, gamma, lambda z: np.zeros(d.q), params0)
    expected = np.linalg.norm(theta(d, LOGISTIC, TANH, gamma, params0) - 0.5)
    assert res == pytest.approx(expected, rel=1e-15)


def test_differentiability_probe_linear_stub(rng):
    d = Dims(2, 2, 6)
    A = rng.normal(size=(d.q, d.p))
    rep = pi_point_differentiability_probe(lambda z: A @ z, LOGISTIC, d)
    assert len(rep.deviations) == 5
    assert rep.max_deviation < 1e-10
    np.testing.assert_array_equal(rep.base, 0.5)


def test_differentiability_probe_kink_stub():
    d = Dims(2, 2, 6)
    star = np.full(d.p, TANH.value_at_zero)
    rep = pi_point_differentiability_probe(lambda z: np.abs(z - star), TANH, d)
    assert all(0.5 <= dev <= 2.0 for dev in rep.deviations)
