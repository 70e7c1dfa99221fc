import numpy as np
import pytest

from qadisorder.ising import IsingProblem, reference_problem

ACCEPTANCE_LINES: list[str] = []


def random_problem(rng: np.random.Generator, n: int, edge_prob: float = 0.5, alpha: float = 1.0) -> IsingProblem:
    h = rng.uniform(-1, 1, n)
    j = {(a, b): rng.uniform(-1, 1) for a in range(n) for b in range(a + 1, n) if rng.random() < edge_prob}
    return IsingProblem.from_dict(h.tolist(), j, alpha)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def ref4():
    return reference_problem(4.0)


@pytest.fixture(scope="session")
def ref01():
    return reference_problem(0.1)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
