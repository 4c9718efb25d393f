"""Shared fixtures: kernel warmup and the acceptance summary block."""

import numpy as np
import pytest

from dropflow.axisym import AxisymFront, SmoothFlowConfig, evolve
from dropflow.energy import AdhesionField
from dropflow.flatflow import minimize_step
from dropflow.grid import HalfSpaceGrid, rasterize_cap

# labeled acceptance lines, printed as a terminal section after the run
ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # touch every jitted kernel on toy inputs so timed tests measure the
    # algorithms, not compilation (the cache makes this cheap after the
    # first session)
    g = HalfSpaceGrid.cover(0.5, 0.6, 1.0 / 8)
    E = rasterize_cap(g, 0.25, 0.3)
    beta = AdhesionField.constant(g, 0.0)
    minimize_step(E, beta, 0.02)
    evolve(AxisymFront.cap(0.5, 0.0, n=96), 1e-4, SmoothFlowConfig(0.0))


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240229)
