import numpy as np
import pytest
from hypothesis import strategies as st

from kqi import augment_super_root, from_edge_list

_RESULTS: list = []


def record(number: int, ok: bool, detail: str) -> None:
    _RESULTS.append((number, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_RESULTS):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def random_dag(rng: np.random.Generator, n: int, p: float, with_years: bool = False):
    """Random DAG on ``n`` nodes with shuffled string ids.

    Position in a random permutation fixes the topological order, so an edge
    only runs from an earlier to a later position.
    """
    labels = [f"v{i:02d}" for i in rng.permutation(n)]
    edges = []
    for j in range(n):
        for i in range(j):
            if rng.random() < p:
                edges.append((labels[i], labels[j]))  # cited -> citing
    years = {labels[i]: 2000 + i for i in range(n)} if with_years else None
    return from_edge_list(edges, nodes=labels, years=years)


def random_tree(rng: np.random.Generator, n: int):
    """Random forest: each node cites at most one earlier node."""
    labels = [f"t{i:03d}" for i in range(n)]
    edges = []
    for j in range(1, n):
        parent = int(rng.integers(-1, j))
        if parent >= 0:
            edges.append((labels[parent], labels[j]))
    return from_edge_list(edges, nodes=labels)


@st.composite
def dags(draw, max_nodes=12, min_nodes=1):
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = [(i, j) for j in range(n) for i in range(j)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [(f"n{i}", f"n{j}") for (i, j), keep in zip(pairs, mask) if keep]
    return from_edge_list(edges, nodes=[f"n{i}" for i in range(n)], years={f"n{i}": 1990 + i for i in range(n)})


@pytest.fixture
def chain():
    return augment_super_root(from_edge_list([("A", "B"), ("B", "C")]))


@pytest.fixture
def diamond():
    return augment_super_root(from_edge_list([("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")]))
