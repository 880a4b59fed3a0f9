import numpy as np
import pytest

from wsrel.fsm_model import Edge, ReliabilityFsm

_ACCEPTANCE_LINES: list[str] = []


def model_from(start, edges):
    nodes = sorted({a for a, _, _ in edges} | {b for _, b, _ in edges} - {"C", "F"})
    return ReliabilityFsm(nodes, [Edge(a, b, p) for a, b, p in edges], start)


@pytest.fixture
def direct_edge():
    return model_from("n", [("n", "C", 0.7), ("n", "F", 0.3)])


@pytest.fixture
def self_loop():
    return model_from("n", [("n", "n", 0.1), ("n", "C", 0.8), ("n", "F", 0.1)])


@pytest.fixture
def two_node():
    return model_from("s", [("s", "a", 0.5), ("s", "C", 0.4), ("s", "F", 0.1), ("a", "C", 0.9), ("a", "F", 0.1)])


def random_model(rng: np.random.Generator, max_nodes: int = 12) -> ReliabilityFsm:
    """Valid absorbing model; every row sends at least 10% straight to C or F."""
    n = int(rng.integers(1, max_nodes + 1))
    names = [f"n{i:02d}" for i in range(n)]
    edges = []
    for src in names:
        k = int(rng.integers(0, min(3, n) + 1))
        targets = list(rng.choice(names, size=k, replace=False)) if k else []
        absorb = float(rng.uniform(0.1, 0.9)) if targets else 1.0
        to_c = absorb * float(rng.uniform(0.0, 1.0))
        weights = rng.dirichlet(np.ones(len(targets))) * (1.0 - absorb) if targets else []
        for t, w in zip(targets, weights):
            edges.append(Edge(src, str(t), float(w)))
        edges.append(Edge(src, "C", to_c))
        edges.append(Edge(src, "F", absorb - to_c))
    return ReliabilityFsm(names, edges, names[0])


@pytest.fixture
def acceptance_report():
    def record(criterion: str, ok: bool, detail: str = "") -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}" + (f" :: {detail}" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
