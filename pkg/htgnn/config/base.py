"""Typed, strict readers turning JSON mappings into frozen configuration dataclasses."""

import dataclasses
import json
import logging
import typing
from typing import Any, Mapping, Optional

from htgnn.config.errors import ConfigurationError

logger = logging.getLogger(__name__)


class ConfigSection:
    """A named mapping of raw configuration values that are consumed (popped) as they are read.

    Anything left in the section once all expected keys have been read is an error, so a typo in a configuration
    file never silently falls back to a default.
    """

    def __init__(self, name: str, values: Optional[Mapping[str, Any]] = None):
        """Construct a configuration section.

        :param name: the section name used in error messages (e.g. "model")
        :param values: the raw key / value mapping, usually straight from a JSON document
        :raises: ConfigurationError
        """
        self.logger = logging.getLogger(__name__)
        if values is not None and not isinstance(values, Mapping):
            raise ConfigurationError(f"Section '{name}' must be a JSON object, got {type(values).__name__}")
        self._name = name
        self._args = dict(values or {})

    @property
    def name(self) -> str:
        """Return the name of this section."""
        return self._name

    def __contains__(self, key: str) -> bool:
        """Return True if the key has not been consumed yet."""
        return key in self._args

    @staticmethod
    def _strict_scalar(name: str, value, expected_type):
        if expected_type is bool:
            if not isinstance(value, bool):
                raise ValueError(f"'{value}' is not a bool")
            return value
        if expected_type is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError(f"'{value}' is not an int")
            return value
        if expected_type is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"'{value}' is not a number")
            return float(value)
        if expected_type is str:
            if not isinstance(value, str):
                raise ValueError(f"'{value}' is not a string")
            return value
        return expected_type(value)

    def get(self, name: str, expected_type, default=None):
        """Pop a value from the section and cast it strictly to the expected type.

        Tuple types such as ``Tuple[int, ...]`` accept JSON lists and cast every element.

        :param name: the key to read
        :param expected_type: a scalar type (int, float, bool, str) or a homogeneous Tuple hint
        :param default: the value returned if the key is absent
        :returns: the cast value, or the default
        :raises: ConfigurationError
        """
        if name not in self._args:
            self.logger.debug(f"No '{name}' specified in section '{self._name}', defaulting to {default}")
            return default
        value = self._args.pop(name)
        origin = typing.get_origin(expected_type)
        try:
            if origin is tuple:
                element_type = typing.get_args(expected_type)[0]
                if not isinstance(value, (list, tuple)):
                    raise ValueError(f"'{value}' is not a list")
                return tuple(self._strict_scalar(name, v, element_type) for v in value)
            if origin is typing.Union:
                inner = [t for t in typing.get_args(expected_type) if t is not type(None)]
                return None if value is None else self._strict_scalar(name, value, inner[0])
            return self._strict_scalar(name, value, expected_type)
        except ValueError as x:
            type_name = getattr(expected_type, "__name__", str(expected_type))
            raise ConfigurationError(f"Invalid value for '{self._name}.{name}': must be {type_name} ({x})") from x

    def raise_for_unexpected_args(self):
        """Raise if any key of the section has not been consumed.

        :raises: ConfigurationError
        """
        unexpected = ",".join(sorted(self._args.keys()))
        if unexpected:
            raise ConfigurationError(f"Unexpected key(s) in section '{self._name}': {unexpected}")


def load_dataclass(cls, values: Optional[Mapping[str, Any]], section: str, **overrides):
    """Build a dataclass instance from a mapping, rejecting unknown keys and mistyped values.

    Fields absent from the mapping keep the dataclass defaults (or the given overrides).

    :param cls: the (frozen) dataclass type to build
    :param values: the raw mapping, may be None for all defaults
    :param section: the section name used in error messages
    :param overrides: defaults that take precedence over the dataclass defaults but not over the mapping
    :returns: an instance of cls
    :raises: ConfigurationError
    """
    reader = ConfigSection(section, values)
    hints = typing.get_type_hints(cls)
    kwargs = {}
    for field in dataclasses.fields(cls):
        if not field.init:
            continue
        if field.name in overrides:
            default = overrides[field.name]
        elif field.default is not dataclasses.MISSING:
            default = field.default
        elif field.default_factory is not dataclasses.MISSING:  # pragma: no cover
            default = field.default_factory()
        else:
            default = None
        kwargs[field.name] = reader.get(field.name, hints[field.name], default)
    reader.raise_for_unexpected_args()
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as x:
        raise ConfigurationError(f"Invalid section '{section}': {x}") from x


def read_config_file(path: Optional[str], sections: typing.Iterable[str] = ()) -> dict:
    """Read a JSON configuration file.

    :param path: the path of the file, None yields an empty configuration
    :param sections: if given, the only top level keys allowed in the file
    :returns: the parsed top level object
    :raises: ConfigurationError
    """
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            document = json.load(fh)
    except OSError as x:
        raise ConfigurationError(f"Cannot read configuration file '{path}': {x.strerror}") from x
    except json.JSONDecodeError as x:
        raise ConfigurationError(f"Invalid JSON in '{path}' at line {x.lineno}: {x.msg}") from x
    if not isinstance(document, dict):
        raise ConfigurationError(f"Configuration file '{path}' must contain a JSON object")
    allowed = set(sections)
    if allowed:
        unknown = sorted(set(document) - allowed)
        if unknown:
            raise ConfigurationError(f"Unknown configuration section(s) in '{path}': {','.join(unknown)}")
    logger.debug(f"Loaded configuration from {path} with sections {sorted(document)}")
    return document
