import numpy as np
import pytest
from hypothesis import settings

from perfectlab import activations

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["logistic", "tanh", "sin"])
def act(request):
    return activations.get(request.param)


@pytest.fixture(params=["logistic", "tanh"])
def algdiff_act(request):
    return activations.get(request.param)


@pytest.fixture
def record():
    """Log one PASS/FAIL line per acceptance criterion; returns the verdict."""
    def _record(label: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
