import pytest

from sombrero import ModelParams, SolverConfig, solve
from sombrero.model import DerivedConstants

# g = 3, k = 2, a = 1.2 realised as N = 5, l = 0
FIG1 = ModelParams(g=3.0, N=5, l=0, a=1.2)


@pytest.fixture(scope="session")
def fig1_dc():
    return DerivedConstants.from_k(3.0, 2.0, 1.2, N=5, l=0)


@pytest.fixture(scope="session")
def solved_a():
    return solve(FIG1, "A", SolverConfig())


@pytest.fixture(scope="session")
def solved_b():
    return solve(FIG1, "B", SolverConfig())


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
