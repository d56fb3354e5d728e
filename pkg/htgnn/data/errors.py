"""Defines common errors raised while generating, storing and windowing sensor data."""


class DataError(Exception):
    """Base exception for errors related to sensor data."""

    pass


class EmptyGridError(DataError):
    """Raised when a generator configuration yields no operating condition."""

    pass


class ZeroPowerSignalError(DataError):
    """Raised when noise at a given SNR is requested for a signal without power."""

    pass


class SeriesTooShortError(DataError):
    """Raised when a series is too short for the requested window or filter."""

    pass


class GroupTooSmallError(DataError):
    """Raised when a condition or day holds too few windows to be split."""

    pass


class ManifestError(DataError):
    """Raised when a dataset directory or its manifest is missing or inconsistent."""

    pass
