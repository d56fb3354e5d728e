"""Helpful fixtures for testing htgnn.graph functionality."""

from htgnn.graph import HeteroTemporalGraph, bearing_topology, bridge_topology, build_graph

import pytest

from tests.graph.rule_cases import SQUARE_NODES, SQUARE_RULES


@pytest.fixture()
def square() -> HeteroTemporalGraph:
    """Fixture returning a graph of 2 L and 2 H nodes, chained within type and fully bipartite across types."""
    return build_graph(SQUARE_NODES, SQUARE_RULES)


@pytest.fixture(scope="module")
def bearing() -> HeteroTemporalGraph:
    """Fixture returning the default bearing topology."""
    return bearing_topology()


@pytest.fixture(scope="module")
def bridge() -> HeteroTemporalGraph:
    """Fixture returning the default bridge topology."""
    return bridge_topology()
