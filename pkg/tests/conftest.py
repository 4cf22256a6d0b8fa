import os

import hypothesis
import numpy as np
import pytest

from ising_mcp.graph import Graph, generate_random_graph, write_graph

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=10)
hypothesis.settings.register_profile("ci", max_examples=100, deadline=None)
hypothesis.settings.register_profile("dev", max_examples=30, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "dev"))

TRIANGLE_TEXT = "3 3\n1 2 1\n2 3 1\n1 3 1\n"


@pytest.fixture
def triangle():
    return Graph.from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)], name="triangle")


@pytest.fixture
def two_node():
    return Graph.from_edges(2, [(0, 1, 1)], name="pair")


@pytest.fixture
def k33():
    return Graph.from_edges(6, [(i, j, 1) for i in range(3) for j in range(3, 6)], name="k33")


@pytest.fixture
def triangle_file(tmp_path, triangle):
    path = tmp_path / "triangle.txt"
    write_graph(triangle, path)
    return path


@pytest.fixture
def pair_file(tmp_path, two_node):
    path = tmp_path / "pair.txt"
    write_graph(two_node, path)
    return path


@pytest.fixture
def random_graphs():
    """Seeded random graphs with 4 to 12 nodes and roughly half the possible edges."""
    graphs = []
    for seed in range(10):
        n = 4 + seed % 9
        graphs.append(generate_random_graph(n, n * (n - 1) // 4, seed=seed))
    return graphs


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

