import sys

import numpy as np
import pytest

from marsrank import PerformanceMatrix, generate_scenario


@pytest.fixture(scope="session")
def scenarios():
    return {i: generate_scenario(i) for i in range(1, 6)}


@pytest.fixture
def constant_matrix():
    return PerformanceMatrix(("A", "B", "C"), ("d0", "d1", "d2", "d3"), np.full((4, 3), 0.7))


def random_matrix(rng, n, k, levels=None):
    """Random N x k matrix; ``levels`` draws integers to force ties."""
    if levels:
        values = rng.integers(0, levels, size=(n, k)).astype(float)
    else:
        values = rng.random((n, k))
    return PerformanceMatrix(
        tuple(f"m{j}" for j in range(k)), tuple(f"d{i}" for i in range(n)), values
    )


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for n in sorted(verdicts):
            terminalreporter.write_line(verdicts[n])
