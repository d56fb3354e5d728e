"""Error metrics reported per target."""

from typing import Optional

from htgnn.training.errors import DegenerateRangeError, NearZeroTruthError

import numpy as np

EPSILON = 1e-8


def nrmse(y_true, y_pred, value_range: Optional[float] = None) -> float:
    """Return the root mean squared error divided by the range of the true values.

    :param y_true: the true values
    :param y_pred: the predictions, same length
    :param value_range: the normaliser, the range of ``y_true`` if None (an evaluation set reports per category
        errors against the range of the whole set)
    :returns: the normalised error
    :raises: DegenerateRangeError, ValueError
    """
    y_true = np.asarray(y_true, dtype=np.float64).ravel()
    y_pred = np.asarray(y_pred, dtype=np.float64).ravel()
    if y_true.shape != y_pred.shape:
        raise ValueError(f"Got {y_true.size} true values and {y_pred.size} predictions")
    if value_range is None:
        if y_true.size < 2:
            raise DegenerateRangeError(f"Need at least 2 values to measure a range, got {y_true.size}")
        value_range = float(y_true.max() - y_true.min())
    if not value_range > 0.0:
        raise DegenerateRangeError(f"True values have no spread (range {value_range})")
    return float(np.sqrt(np.mean((y_true - y_pred) ** 2)) / value_range)


def mape(y_true, y_pred) -> float:
    """Return the mean absolute percentage error.

    :raises: NearZeroTruthError, ValueError
    """
    y_true = np.asarray(y_true, dtype=np.float64).ravel()
    y_pred = np.asarray(y_pred, dtype=np.float64).ravel()
    if y_true.shape != y_pred.shape or y_true.size == 0:
        raise ValueError(f"Got {y_true.size} true values and {y_pred.size} predictions")
    if np.any(np.abs(y_true) <= EPSILON):
        raise NearZeroTruthError(f"True values must exceed {EPSILON} in magnitude for a percentage error")
    return float(np.mean(np.abs(y_true - y_pred) / np.abs(y_true)) * 100.0)
