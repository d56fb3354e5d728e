"""Helpful fixtures for testing the htgnn command line."""

from htgnn.cli import main

import pytest

from tests.cli.documents import QUICK_TRAINING, SMALL_GENERATOR, write_json


@pytest.fixture(scope="module")
def small_data(tmp_path_factory) -> str:
    """Fixture returning the directory of a bearing-like dataset of 10 conditions."""
    root = tmp_path_factory.mktemp("small")
    config = write_json(root / "generator.json", SMALL_GENERATOR)
    out = str(root / "data")
    assert main(["generate", "--dataset", "bearing-like", "--config", config, "--seed", "1", "--out", out]) == 0
    return out


@pytest.fixture(scope="module")
def quick_config(tmp_path_factory) -> str:
    """Fixture returning a configuration file training a one layer model for two epochs."""
    return write_json(tmp_path_factory.mktemp("config") / "quick.json", QUICK_TRAINING)
