"""Teacher/student backpropagation experiment on exactly realizable data.

A random teacher network labels ``p > q`` random inputs without noise, so the
quadratic error has global minimum zero.  Students start from random
parameters and run full-batch gradient descent with classical momentum; the
report records how often they end far from zero.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Optional

import numpy as np

from .activations import Activation, Kind, get as get_activation
from .network import (Dims, ParamVec, TrainingSet, error, error_and_gradient, outputs,
                      sample_distinct_points)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    m: int = 2
    n: int = 2
    p: int = 50
    f: str = "tanh"
    g: str = "tanh"
    teacher_range: float = 1.0
    input_range: float = 1.0
    n_runs: int = 20
    step_size: float = 0.005
    momentum: float = 0.9
    max_iter: int = 20_000
    grad_tol: float = 1e-10
    seed: int = 0
    overdetermined: bool = True
    error_threshold: float = 1e-2
    init: str = "random"          # "random" or "teacher"
    trace_every: int = 100

    def __post_init__(self):
        try:
            dims = Dims(self.m, self.n, self.p)
            Kind(self.f)
            Kind(self.g)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.overdetermined and self.p <= dims.q:
            raise ConfigError(f"overdetermined mode needs p > q = {dims.q}, got p = {self.p}")
        if self.init not in ("random", "teacher"):
            raise ConfigError(f"init must be 'random' or 'teacher', got {self.init!r}")
        checks = {
            "teacher_range": self.teacher_range > 0, "input_range": self.input_range > 0,
            "n_runs": self.n_runs >= 1, "step_size": self.step_size >= 0,
            "momentum": 0 <= self.momentum < 1, "max_iter": self.max_iter >= 0,
            "grad_tol": self.grad_tol >= 0, "trace_every": self.trace_every >= 1,
            "seed": isinstance(self.seed, int) and self.seed >= 0,
        }
        bad = [k for k, ok in checks.items() if not ok]
        if bad:
            raise ConfigError(f"invalid values for: {', '.join(bad)}")

    @property
    def dims(self) -> Dims:
        return Dims(self.m, self.n, self.p)

    @property
    def activation_pair(self) -> tuple[Activation, Activation]:
        return get_activation(self.f), get_activation(self.g)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def _seed_streams(seed: int, n_runs: int) -> tuple[np.random.Generator, list[int]]:
    instance_ss, runs_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(instance_ss), [int(s) for s in runs_ss.generate_state(n_runs)]


def generate_instance(cfg: ExperimentConfig) -> tuple[ParamVec, TrainingSet]:
    f, g = cfg.activation_pair
    dims = cfg.dims
    rng, _ = _seed_streams(cfg.seed, cfg.n_runs)
    teacher = ParamVec.from_flat(dims, rng.uniform(-cfg.teacher_range, cfg.teacher_range, dims.q))
    gamma = sample_distinct_points(rng, dims.p, dims.n, -cfg.input_range, cfg.input_range)
    zeta = outputs(dims, f, g, teacher, gamma)
    return teacher, TrainingSet(gamma, zeta)


@dataclass
class OptimResult:
    x: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    diverged: bool
    trace: list[tuple[int, float]] = field(default_factory=list)


def momentum_descent(loss_grad: Callable[[np.ndarray], tuple[float, np.ndarray]], x0,
                     step_size: float, momentum: float, max_iter: int, grad_tol: float,
                     trace_every: int = 100) -> OptimResult:
    """Full-batch gradient descent with classical (heavy-ball) momentum.

    Stops when the gradient norm drops below ``grad_tol`` (checked before each
    update), after ``max_iter`` updates, or when the loss stops being finite.
    """
    x = np.array(x0, dtype=np.float64, copy=True)
    vel = np.zeros_like(x)
    trace = []
    it = 0
    while True:
        value, grad = loss_grad(x)
        gnorm = float(np.linalg.norm(grad))
        if not (math.isfinite(value) and math.isfinite(gnorm)):
            trace.append((it, value))
            return OptimResult(x, value, gnorm, it, True, trace)
        if it % trace_every == 0:
            trace.append((it, value))
        if gnorm < grad_tol or it >= max_iter:
            if not trace or trace[-1][0] != it:
                trace.append((it, value))
            return OptimResult(x, value, gnorm, it, False, trace)
        vel = momentum * vel - step_size * grad
        x = x + vel
        it += 1


@dataclass
class StudentRun:
    seed: int
    init: np.ndarray
    params: ParamVec
    final_error: float
    iterations: int
    grad_norm: float
    diverged: bool
    trace: list[tuple[int, float]]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed, "init": self.init.tolist(),
            "final_params": self.params.flatten().tolist() if not self.diverged else None,
            "final_error": self.final_error if not self.diverged else None,
            "iterations": self.iterations,
            "grad_norm": self.grad_norm if math.isfinite(self.grad_norm) else None,
            "diverged": self.diverged,
        }


def train_student(cfg: ExperimentConfig, data: TrainingSet, run_seed: int,
                  init: Optional[np.ndarray] = None) -> StudentRun:
    """Backpropagation from a random start in the teacher range (or ``init``)."""
    f, g = cfg.activation_pair
    dims = cfg.dims
    if init is None:
        rng = np.random.default_rng(run_seed)
        init = rng.uniform(-cfg.teacher_range, cfg.teacher_range, dims.q)
    init = np.asarray(init, dtype=np.float64).reshape(-1)

    def loss_grad(x):
        return error_and_gradient(dims, f, g, x, data)

    res = momentum_descent(loss_grad, init, cfg.step_size, cfg.momentum, cfg.max_iter,
                           cfg.grad_tol, cfg.trace_every)
    params = ParamVec.from_flat(dims, res.x)
    return StudentRun(run_seed, init, params, res.value, res.iterations, res.grad_norm,
                      res.diverged, res.trace)


def backprop_learner(cfg: ExperimentConfig, gamma, run_seed: int) -> Callable[[np.ndarray], np.ndarray]:
    """The learner map ``zeta -> trained parameters`` with inputs and start fixed."""
    gamma = np.asarray(gamma, dtype=np.float64)

    def pi(zeta):
        return train_student(cfg, TrainingSet(gamma, zeta), run_seed).params.flatten()
    return pi


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    teacher: ParamVec
    data: TrainingSet
    teacher_residual: float
    runs: list[StudentRun]

    def summary(self) -> dict:
        thr = self.config.error_threshold
        finite = [r.final_error for r in self.runs if not r.diverged]
        above = sum(1 for r in self.runs if r.diverged or r.final_error > thr)
        return {
            "n_runs": len(self.runs),
            "n_diverged": sum(r.diverged for r in self.runs),
            "min_error": min(finite) if finite else None,
            "median_error": float(np.median(finite)) if finite else None,
            "max_error": max(finite) if finite else None,
            "error_threshold": thr,
            "fraction_above_threshold": above / len(self.runs),
        }

    def to_dict(self) -> dict:
        out = {
            "config": self.config.to_dict(),
            "dims": self.config.dims.to_dict(),
            "teacher": self.teacher.flatten().tolist(),
            "gamma": self.data.gamma.tolist(),
            "teacher_residual": self.teacher_residual,
            "runs": [r.to_dict() for r in self.runs],
            "summary": self.summary(),
            "notes": [
                "Targets are generated by the teacher without noise, so the global minimum of E is 0.",
                "Neither 'E >> 0' nor 'p >> q' has a fixed size; the threshold and p used here "
                "are recorded in config.",
            ],
        }
        return out


CSV_COLUMNS = ("seed", "final_error", "iterations", "grad_norm", "diverged")


def runs_csv(runs: list[dict]) -> str:
    """One row per student run, from the ``runs`` list of a report dict."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in runs:
        w.writerow(["" if r[c] is None else (int(r[c]) if c == "diverged" else r[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    f, g = cfg.activation_pair
    dims = cfg.dims
    teacher, data = generate_instance(cfg)
    residual = error(dims, f, g, teacher, data)
    _, run_seeds = _seed_streams(cfg.seed, cfg.n_runs)
    init = teacher.flatten() if cfg.init == "teacher" else None
    runs = [train_student(cfg, data, s, init) for s in run_seeds]
    return ExperimentReport(cfg, teacher, data, residual, runs)
