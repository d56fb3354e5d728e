"""Defines common errors raised while loading configuration."""


class ConfigurationError(Exception):
    """Raised when a configuration file or section is malformed, mistyped or carries unknown keys."""

    pass
