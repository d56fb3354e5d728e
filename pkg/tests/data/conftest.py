"""Helpful fixtures for testing htgnn.data functionality."""

from htgnn.data import SensorDataset, generate_bearing_like, generate_bridge_like

import pytest


@pytest.fixture(scope="module")
def bearing_dataset() -> SensorDataset:
    """Fixture returning the default bearing-like dataset."""
    return generate_bearing_like(seed=0)


@pytest.fixture(scope="module")
def bridge_dataset() -> SensorDataset:
    """Fixture returning the default bridge-like dataset."""
    return generate_bridge_like(seed=0)
