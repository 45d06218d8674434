import random

import networkx as nx
import numpy as np
import pytest

from depdist.trees import DependencyTree


def tree_from_graph(g: nx.Graph, root: int = 0) -> DependencyTree:
    """Root a networkx tree on nodes 0..n-1 and return its head vector tree."""
    heads = [0] * g.number_of_nodes()
    for u, v in nx.bfs_edges(g, root):
        heads[v] = u + 1
    return DependencyTree(tuple(heads))


def free_trees(n: int):
    """All unlabeled free trees on n vertices (n >= 1)."""
    if n == 1:
        yield DependencyTree((0,))
        return
    for g in nx.nonisomorphic_trees(n):
        yield tree_from_graph(g)


def random_tree(n: int, rng: random.Random) -> DependencyTree:
    """Random recursive tree with shuffled labels."""
    labels = list(range(1, n + 1))
    rng.shuffle(labels)
    heads = [0] * n
    for i in range(1, n):
        heads[labels[i] - 1] = labels[rng.randrange(i)]
    return DependencyTree(tuple(heads))


@pytest.fixture
def rng():
    return random.Random(20211)


@pytest.fixture
def np_rng():
    return np.random.default_rng(20211)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
