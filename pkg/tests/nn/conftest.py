"""Helpful fixtures for testing htgnn.nn functionality."""

from htgnn.graph import HeteroTemporalGraph

import pytest

from tests.nn.toys import toy_graph

import torch


@pytest.fixture()
def graph() -> HeteroTemporalGraph:
    """Fixture returning the toy graph of 4 L and 2 H nodes."""
    return toy_graph()


@pytest.fixture()
def seeded():
    """Fixture seeding torch for every test that draws parameters, restoring the default dtype afterwards."""
    torch.manual_seed(0)
    dtype = torch.get_default_dtype()
    yield
    torch.set_default_dtype(dtype)
