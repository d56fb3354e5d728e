"""Tests for the strict JSON configuration readers."""

import json
from typing import Optional, Tuple

from htgnn.config import ConfigSection, ConfigurationError, load_dataclass, read_config_file
from htgnn.data import BearingLikeConfig, SplitConfig

import pytest

from tests.config.config_cases import GOOD_SECTIONS, INVALID_SECTIONS


@pytest.mark.parametrize("values, expected", GOOD_SECTIONS)
def test_load_generator_section(values: dict, expected: dict):
    """Tests generator sections are cast to the dataclass field types."""
    config = load_dataclass(BearingLikeConfig, values, "generator")
    for name, value in expected.items():
        assert getattr(config, name) == value
        assert type(getattr(config, name)) is type(value)


@pytest.mark.parametrize("values, match", INVALID_SECTIONS)
def test_invalid_generator_section(values, match: str):
    """Tests unknown keys, mistyped values and values refused by the dataclass."""
    with pytest.raises(ConfigurationError, match=match):
        load_dataclass(BearingLikeConfig, values, "generator")


def test_overrides():
    """Tests overrides replace dataclass defaults but not values from the mapping."""
    assert load_dataclass(SplitConfig, None, "split", mode="bridge").mode == "bridge"
    assert load_dataclass(SplitConfig, {"mode": "bearing"}, "split", mode="bridge").mode == "bearing"
    assert load_dataclass(SplitConfig, {}, "split") == SplitConfig()


def test_section_reads():
    """Tests values are consumed as they are read and hints are honoured."""
    section = ConfigSection("model", {"layers": 2, "sizes": [1, 2], "snr": None})
    assert section.name == "model"
    assert "layers" in section
    assert section.get("layers", int, 3) == 2
    assert "layers" not in section
    assert section.get("layers", int, 3) == 3
    assert section.get("sizes", Tuple[float, ...]) == (1.0, 2.0)
    assert section.get("snr", Optional[float], 30.0) is None
    section.raise_for_unexpected_args()


def test_read_config_file(tmp_path):
    """Tests reading configuration files and the errors for unreadable or unexpected content."""
    assert read_config_file(None) == {}
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"train": {"lr0": 0.001}}))
    assert read_config_file(str(path), ("model", "train")) == {"train": {"lr0": 0.001}}
    with pytest.raises(ConfigurationError, match=r"Unknown configuration section\(s\) in '.*': train"):
        read_config_file(str(path), ("generator",))
    with pytest.raises(ConfigurationError, match="Cannot read configuration file"):
        read_config_file(str(tmp_path / "missing.json"))
    path.write_text("{\n  'train': 1\n}")
    with pytest.raises(ConfigurationError, match="Invalid JSON in '.*' at line 2"):
        read_config_file(str(path))
    path.write_text("[1, 2]")
    with pytest.raises(ConfigurationError, match="must contain a JSON object"):
        read_config_file(str(path))
