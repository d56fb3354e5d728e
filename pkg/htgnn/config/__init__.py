"""Strict JSON configuration loading shared by generation, modelling and training."""

from htgnn.config.base import ConfigSection, load_dataclass, read_config_file
from htgnn.config.errors import ConfigurationError

__all__ = ["ConfigSection", "ConfigurationError", "load_dataclass", "read_config_file", "errors"]
