"""Per-channel standardisation fitted on training windows and stored with every checkpoint."""

from dataclasses import asdict, dataclass
from typing import Any, Dict, Sequence, Tuple

from htgnn.data.errors import DataError

import numpy as np

MIN_SCALE = 1e-12


def _stats(values: np.ndarray, axes: Tuple[int, ...]) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    mean = values.mean(axis=axes)
    std = values.std(axis=axes)
    std = np.where(std < MIN_SCALE, 1.0, std)
    return tuple(float(v) for v in mean), tuple(float(v) for v in std)


@dataclass(frozen=True)
class Standardizer:
    """Channel means and standard deviations of the three signal blocks and of the targets.

    Channels without spread keep a scale of one.
    """

    low_mean: Tuple[float, ...]
    low_std: Tuple[float, ...]
    high_mean: Tuple[float, ...]
    high_std: Tuple[float, ...]
    exo_mean: Tuple[float, ...]
    exo_std: Tuple[float, ...]
    target_mean: Tuple[float, ...]
    target_std: Tuple[float, ...]

    @classmethod
    def fit(cls, windows: Sequence) -> "Standardizer":
        """Fit on windows (objects with ``x_l``, ``x_h``, ``w`` and ``y`` arrays), normally the training split.

        :raises: DataError
        """
        if not windows:
            raise DataError("Cannot fit a standardizer on zero windows")
        low_mean, low_std = _stats(np.stack([w.x_l for w in windows]), (0, 2))
        high_mean, high_std = _stats(np.stack([w.x_h for w in windows]), (0, 2))
        exo_mean, exo_std = _stats(np.stack([w.w for w in windows]), (0, 2))
        target_mean, target_std = _stats(np.stack([w.y for w in windows]), (0,))
        return cls(low_mean, low_std, high_mean, high_std, exo_mean, exo_std, target_mean, target_std)

    @classmethod
    def identity(cls, n_low: int, n_high: int, n_exogenous: int, d_y: int) -> "Standardizer":
        """Return a standardizer leaving every value unchanged."""
        values = []
        for n in (n_low, n_high, n_exogenous, d_y):
            values.extend([(0.0,) * n, (1.0,) * n])
        return cls(*values)

    @staticmethod
    def _apply(values: np.ndarray, mean: Tuple[float, ...], std: Tuple[float, ...]) -> np.ndarray:
        return (values - np.asarray(mean)[:, None]) / np.asarray(std)[:, None]

    def transform(self, x_l: np.ndarray, x_h: np.ndarray, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Standardise stacked blocks of shape (n, channels, L)."""
        return (
            self._apply(x_l, self.low_mean, self.low_std),
            self._apply(x_h, self.high_mean, self.high_std),
            self._apply(w, self.exo_mean, self.exo_std),
        )

    def transform_target(self, y: np.ndarray) -> np.ndarray:
        """Standardise targets of shape (n, d_y)."""
        return (y - np.asarray(self.target_mean)) / np.asarray(self.target_std)

    def inverse_target(self, y: np.ndarray) -> np.ndarray:
        """Map standardised targets of shape (n, d_y) back to physical units."""
        return y * np.asarray(self.target_std) + np.asarray(self.target_mean)

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON serialisable form."""
        return {k: list(v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "Standardizer":
        """Rebuild from :meth:`to_dict` output.

        :raises: DataError
        """
        try:
            return cls(**{k: tuple(float(x) for x in v) for k, v in values.items()})
        except (TypeError, ValueError) as x:
            raise DataError(f"Invalid standardizer: {x}") from x
