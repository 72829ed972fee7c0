"""End-to-end acceptance criteria, each at its stated tolerance and time budget.

Every test prints a single PASS/FAIL line; the lines are repeated in the
pytest terminal summary.
"""
import itertools
import json
import math
import time
from fractions import Fraction

import numpy as np

from perfectlab import activations
from perfectlab.activations import LOGISTIC, TANH
from perfectlab.detprobe import (DEFAULT_NODE_RANGE, draw_node_sets, estrella_identity_check,
                                 probe_nonvanishing, sin_derivative_identity_check)
from perfectlab.experiment import ExperimentConfig, backprop_learner, generate_instance, run_experiment
from perfectlab.gradcheck import check_random, violation
from perfectlab.network import Dims, ParamVec, beta, beta_tangent, theta
from perfectlab.numdiff import central_jacobian
from perfectlab.polynomial import RationalPoly
from perfectlab.symbolic import pk_sequence_for, select_indices
from perfectlab.witness import CONTRADICTION, SEARCH_FAILED, TOO_SMALL, perfect_map_residual, unfeasibility_witness

PAIRS = list(itertools.product(activations.ALL, repeat=2))


def test_gradient_correctness(record):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(100):
        f, g = PAIRS[i % len(PAIRS)]
        dims = Dims(int(rng.integers(1, 5)), int(rng.integers(1, 5)), int(rng.integers(1, 21)))
        c = check_random(dims, f, g, rng)
        worst = max(worst, c.gradient_violation, c.jacobian_violation)
    dt = time.perf_counter() - t0
    ok = worst <= 1.0 and dt < 30
    assert record("1 gradient correctness", ok,
                  f"100 instances, worst |a-e|/max(1e-6|e|,1e-8) = {worst:.3g} (pass <= 1), {dt:.2f}s (< 30s)")


def test_tangent_formula(record):
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    worst = 0.0
    for act in activations.ALL:
        for _ in range(30):
            dims = Dims(int(rng.integers(1, 5)), int(rng.integers(1, 5)), int(rng.integers(1, 13)))
            rho = rng.uniform(-2, 2, dims.n)
            gammas = rng.uniform(-2, 2, (dims.p, dims.n))
            closed = beta_tangent(dims, act, act, rho, gammas)
            fd = central_jacobian(lambda V: theta(dims, act, act, gammas, beta(dims, rho, V[0])),
                                  np.zeros(1))[:, 0]
            worst = max(worst, violation(closed, fd))
    dt = time.perf_counter() - t0
    ok = worst <= 1.0 and dt < 5
    assert record("2 tangent formula", ok,
                  f"90 instances, worst violation = {worst:.3g} (pass <= 1), {dt:.2f}s (< 5s)")


def test_symbolic_exactness(record):
    t0 = time.perf_counter()
    tanh = pk_sequence_for("tanh", 3)
    logistic = pk_sequence_for("logistic", 3)
    polys_ok = tanh.polys == [RationalPoly([0, 1]), RationalPoly([1, 0, -1]), RationalPoly([0, -2, 0, 2]),
                              RationalPoly([-2, 0, 8, 0, -6])]
    values_ok = logistic.values == [Fraction(1, 2), Fraction(1, 4), 0, Fraction(-1, 8)]
    idx_ok = (select_indices(tanh.G, tanh.g0, 2) == (1, 3)
              and select_indices(logistic.G, logistic.g0, 3) == (0, 1, 3))
    mono_ok = True
    for kind in ("tanh", "logistic"):
        degs = [P.degree for P in pk_sequence_for(kind, 50).polys]
        mono_ok &= all(b >= a for a, b in zip(degs, degs[1:]))
    dt = time.perf_counter() - t0
    ok = polys_ok and values_ok and idx_ok and mono_ok and dt < 5
    assert record("3 symbolic exactness", ok,
                  f"tanh P0..P3 {polys_ok}, logistic values {values_ok}, indices {idx_ok}, "
                  f"degree monotone to k=50 {mono_ok}, {dt:.2f}s (< 5s)")


def test_determinant_probes(record):
    t0 = time.perf_counter()
    worst = (None, 10)
    for act in activations.ALL:
        for p in range(1, 7):
            wins = sum(probe_nonvanishing(act, p, seed, max_attempts=100, tol=1e-12).success for seed in range(10))
            if wins < worst[1]:
                worst = ((act.name, p), wins)
    dt = time.perf_counter() - t0
    ok = worst[1] >= 9 and dt < 10
    where = "" if worst[0] is None else f" at {worst[0]}"
    assert record("4 determinant probes", ok,
                  f"min successes over (activation, p) = {worst[1]}/10{where} (need >= 9), "
                  f"node range +-{DEFAULT_NODE_RANGE}, {dt:.2f}s (< 10s)")


def test_derivative_identities(record):
    rng = np.random.default_rng(99)
    t0 = time.perf_counter()
    r1 = r2 = rs = 0.0
    for g in (LOGISTIC, TANH):
        for p in (2, 3):
            for _ in range(20):
                A, B = draw_node_sets(rng, p, 1, DEFAULT_NODE_RANGE)
                r1 = max(r1, estrella_identity_check(g, A[:, 0], B[:, 0], 1))
                r2 = max(r2, estrella_identity_check(g, A[:, 0], B[:, 0], 2))
    for i in range(20):
        A, B = draw_node_sets(rng, 2 + i % 2, 1, DEFAULT_NODE_RANGE)
        rs = max(rs, sin_derivative_identity_check(A[:, 0], B[:, 0]))
    dt = time.perf_counter() - t0
    ok = r1 < 1e-6 and r2 < 1e-4 and rs < 1e-6 and dt < 10
    assert record("5 derivative identities", ok,
                  f"max residual k=1 {r1:.2e} (< 1e-6), k=2 {r2:.2e} (< 1e-4), "
                  f"sin first order {rs:.2e} (< 1e-6), {dt:.2f}s (< 10s)")


def test_unfeasibility_witness(record):
    t0 = time.perf_counter()
    found = 0
    bad = []
    for g in (TANH, LOGISTIC):
        for seed in range(10):
            rep = unfeasibility_witness(g, g, Dims(2, 2, 12), seed)
            if rep.verdict != SEARCH_FAILED:
                found += 1
                if rep.rank != 12 or rep.verdict != CONTRADICTION:
                    bad.append((g.name, seed, rep.rank, rep.verdict))
        small = unfeasibility_witness(g, g, Dims(2, 2, 5), 0)
        if small.verdict != TOO_SMALL:
            bad.append((g.name, "p=5", small.rank, small.verdict))
    dt = time.perf_counter() - t0
    ok = not bad and found > 0 and dt < 10
    assert record("6 unfeasibility witness", ok,
                  f"{found}/20 point searches succeeded, all rank 12 and contradiction: {not bad}; "
                  f"p=5 gives {TOO_SMALL}; {dt:.2f}s (< 10s)")


def test_experiment_pipeline(record):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(m=2, n=2, p=50, n_runs=20, f="tanh", g="tanh", seed=0)
    first = json.dumps(run_experiment(cfg).to_dict())
    second = json.dumps(run_experiment(cfg).to_dict())
    doc = json.loads(first)
    residuals = [doc["teacher_residual"]]
    for seed in range(1, 10):
        teacher, data = generate_instance(ExperimentConfig(seed=seed))
        residuals.append(float(np.sum((data.zeta - theta(Dims(2, 2, 50), TANH, TANH, data.gamma, teacher)) ** 2)))
    dt = time.perf_counter() - t0
    s = doc["summary"]
    ok = max(residuals) < 1e-18 and first == second and len(doc["runs"]) == 20 and dt < 300
    assert record("7 experiment pipeline", ok,
                  f"max teacher residual {max(residuals):.1e} (< 1e-18), bitwise reproducible {first == second}, "
                  f"fraction of runs with E > 1e-2: {s['fraction_above_threshold']:.2f} "
                  f"(median E {s['median_error']:.3g}, recorded not asserted), {dt:.1f}s (< 300s)")


def test_perfect_map_residual(record):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(m=2, n=2, p=12, n_runs=1, seed=3)
    teacher, data = generate_instance(cfg)
    f, g = cfg.activation_pair
    oracle = perfect_map_residual(f, g, cfg.dims, data.gamma, lambda z: teacher, teacher)
    pi = backprop_learner(cfg, data.gamma, run_seed=11)
    backprop = perfect_map_residual(f, g, cfg.dims, data.gamma, pi, teacher)
    dt = time.perf_counter() - t0
    ok = oracle < 1e-12 and math.isfinite(backprop) and dt < 60
    assert record("8 perfect-map residual", ok,
                  f"oracle {oracle:.1e} (< 1e-12), backprop {backprop:.3e} (finite, recorded), {dt:.2f}s (< 60s)")


def test_parameter_dimension_example():
    # the witness relies on q = m(n + 2) + 1 = 9 at (2, 2)
    assert Dims(2, 2, 12).q == 9 == ParamVec.zeros(Dims(2, 2, 1)).flatten().size
