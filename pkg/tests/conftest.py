import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from solwave.grid import make_grid  # noqa: E402
from solwave.params import Params  # noqa: E402
from solwave.solvers import SolverConfig, minimize_nsp_ground, solve_nls_ground  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def record_criterion(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def grid_mid():
    return make_grid(1200, 20.0)


@pytest.fixture(scope="session")
def params_nls():
    # 2 m mu = 1
    return Params(m=1.0, mu=0.5, q=0.5, p=4.0)


@pytest.fixture(scope="session")
def config():
    return SolverConfig()


@pytest.fixture(scope="session")
def nls_shooting(grid_mid, params_nls, config):
    return solve_nls_ground(grid_mid, params_nls, config, method="shooting")


@pytest.fixture(scope="session")
def nsp_ground(grid_mid, params_nls, config):
    return minimize_nsp_ground(grid_mid, params_nls, config)
