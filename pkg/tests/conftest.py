import numpy as np
import pytest

from mixreg import KernelSpec, build_operator, make_grid

# filled by test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def grid130():
    return make_grid(130)


@pytest.fixture(scope="session")
def op130(grid130):
    return build_operator(grid130, KernelSpec(0.05))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def small_problem(rng, n, theta=None, alpha1=None, alpha2=None, sigma_b=0.15):
    """Random (v, op, spec) on a small grid."""
    from mixreg import PenalizerSpec, Signal, WeightField

    grid = make_grid(n)
    op = build_operator(grid, KernelSpec(sigma_b))
    v = Signal(grid, rng.normal(size=n + 1))
    if theta is None:
        theta = rng.uniform(0, 1, n + 1)
    spec = PenalizerSpec(
        float(rng.uniform(0.05, 1.0)) if alpha1 is None else alpha1,
        float(rng.uniform(0.05, 1.0)) if alpha2 is None else alpha2,
        WeightField(grid, theta),
        beta=float(rng.uniform(1e-3, 1e-1)),
    )
    return v, op, spec


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
