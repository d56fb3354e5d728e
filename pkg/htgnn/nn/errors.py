"""Defines common errors raised by the neural network modules."""


class ModelError(Exception):
    """Base exception for errors raised while building or evaluating models."""

    pass


class ShapeMismatchError(ModelError):
    """Raised when a tensor does not have the shape a module was built for."""

    pass


class NonFiniteInputError(ModelError):
    """Raised when an input tensor contains NaN or infinite values."""

    pass


class WindowTooShortError(ModelError):
    """Raised when a window is shorter than an encoder's receptive field."""

    pass


class EmptyNeighborhoodError(ModelError):
    """Raised when attention is requested over an empty set of neighbors."""

    pass


class MissingParamsError(ModelError):
    """Raised when a relation of the graph has no parameters in a layer."""

    pass


class InvalidVariantError(ModelError):
    """Raised when an unknown model variant is requested."""

    pass


class CheckpointError(ModelError):
    """Raised when a checkpoint cannot be written, read or matched to a model."""

    pass
