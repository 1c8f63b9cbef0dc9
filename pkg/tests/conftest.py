from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import settings

from sofr_convexity import KernelSet, ModelParams

settings.register_profile("pkg", max_examples=40, deadline=None)
settings.load_profile("pkg")

CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"

DESK = dict(alpha=0.03, sigma=0.01, gamma=20.0, y_star=-0.002, rbar=0.02, horizon=5.0)


def desk_params(**changes) -> ModelParams:
    kw = {**DESK, **changes}
    return ModelParams.constant(**kw)


@pytest.fixture(scope="session")
def desk() -> KernelSet:
    return KernelSet(desk_params())


@pytest.fixture(scope="session")
def hw_limit() -> KernelSet:
    return KernelSet(desk_params(gamma=1e-6, y_star=0.0))


@pytest.fixture(scope="session")
def configs() -> Path:
    return CONFIGS


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: s.split(" ", 1)[1]):
            terminalreporter.write_line(line)
