import numpy as np
import pytest

from netgauss.graph import is_connected, validate

ACCEPTANCE_LINES = []


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


def random_connected_graph(n: int, rng, density: float = 0.3, weighted: bool = True):
    """Random spanning tree plus extra random edges, positive weights."""
    W = np.zeros((n, n))
    order = rng.permutation(n)
    for k in range(1, n):
        i, j = order[k], order[rng.integers(k)]
        W[i, j] = W[j, i] = rng.uniform(0.5, 2.0) if weighted else 1.0
    extra = np.triu(rng.random((n, n)) < density, 1)
    w = rng.uniform(0.1, 3.0, size=(n, n)) if weighted else np.ones((n, n))
    W = np.where(extra & (W == 0), w, W)
    W = np.triu(W, 1)
    W = W + W.T
    g = validate(W)
    assert is_connected(g)
    return g


def path_graph(n: int, weight: float = 1.0):
    W = np.zeros((n, n))
    for i in range(n - 1):
        W[i, i + 1] = W[i + 1, i] = weight
    return validate(W)


def complete_graph(n: int):
    return validate(np.ones((n, n)) - np.eye(n))


def star_graph(leaves: int):
    W = np.zeros((leaves + 1, leaves + 1))
    W[0, 1:] = W[1:, 0] = 1.0
    return validate(W)


@pytest.fixture
def P2():
    return path_graph(2)


@pytest.fixture
def P2w2():
    return path_graph(2, 2.0)


@pytest.fixture
def K3():
    return complete_graph(3)
