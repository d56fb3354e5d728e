"""Defines common errors raised while training and evaluating models."""


class TrainingError(Exception):
    """Base exception for errors related to training and evaluation."""

    pass


class DivergedLossError(TrainingError):
    """Raised when the training loss becomes NaN or infinite, carries the training state at that point."""

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class DegenerateRangeError(TrainingError):
    """Raised when true values have no spread to normalise an error by."""

    pass


class NearZeroTruthError(TrainingError):
    """Raised when a percentage error is requested for a true value too close to zero."""

    pass


class EmptyCategoryError(TrainingError):
    """Raised when an evaluation category holds no sample."""

    pass


class PreconditionError(TrainingError):
    """Raised when a verification routine is called outside its preconditions."""

    pass
