"""Sliding windows over raw series, leakage-free temporal splits and the torch dataset feeding training."""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence

from htgnn.data.errors import DataError, GroupTooSmallError, SeriesTooShortError
from htgnn.data.generators import RawSeries, SensorDataset
from htgnn.data.scaling import Standardizer
from htgnn.data.signals import preprocess_low_freq, valid_span

import numpy as np

import torch
from torch.utils.data import Dataset

logger = logging.getLogger(__name__)

SPLIT_MODES = ("bearing", "bridge")


@dataclass(frozen=True, eq=False)
class SensorWindow:
    """One sample: the three signal blocks over L steps and the target at the window's last step."""

    x_l: np.ndarray
    x_h: np.ndarray
    w: np.ndarray
    y: np.ndarray
    condition: int
    group: int
    offset: int
    speed: Optional[float] = None
    temperature: Optional[float] = None


def window_offsets(length: int, window: int, stride: int) -> range:
    """Return the start offsets of every window, ``floor((length - window) / stride) + 1`` of them.

    :raises: SeriesTooShortError, ValueError
    """
    if window < 1 or stride < 1:
        raise ValueError(f"Window ({window}) and stride ({stride}) must be positive")
    if length < window:
        raise SeriesTooShortError(f"Series of {length} steps is shorter than the window of {window}")
    return range(0, length - window + 1, stride)


def window_dataset(series: RawSeries, window: int, stride: int) -> List[SensorWindow]:
    """Cut a series into sliding windows.

    :param series: the series of one condition or passage
    :param window: the window length L
    :param stride: the step between window starts
    :returns: the windows in time order
    :raises: SeriesTooShortError
    """
    windows = []
    for offset in window_offsets(series.length, window, stride):
        end = offset + window
        windows.append(
            SensorWindow(
                x_l=series.low[:, offset:end],
                x_h=series.high[:, offset:end],
                w=series.exogenous[:, offset:end],
                y=series.target[:, end - 1],
                condition=series.condition,
                group=series.group,
                offset=offset,
                speed=series.info.get("speed"),
                temperature=series.info.get("temperature"),
            )
        )
    return windows


def preprocessed(series: RawSeries, ma_window: int, rate_horizon: int) -> RawSeries:
    """Turn raw temperatures into smoothed rates of change and trim every block to the samples where it is defined."""
    low = preprocess_low_freq(series.low, ma_window, rate_horizon)
    span = valid_span(low)
    return RawSeries(
        condition=series.condition,
        group=series.group,
        low=low[:, span],
        high=series.high[:, span],
        exogenous=series.exogenous[:, span],
        target=series.target[:, span],
        info=series.info,
    )


def dataset_windows(
    dataset: SensorDataset, window: Optional[int] = None, stride: Optional[int] = None
) -> List[SensorWindow]:
    """Window every series of a dataset, applying the dataset's low-frequency preprocessing first.

    :param dataset: the dataset
    :param window: the window length, the dataset default if None
    :param stride: the stride, the dataset default if None
    :returns: the windows, in condition then time order
    :raises: SeriesTooShortError
    """
    window = window or dataset.window
    stride = stride or dataset.stride
    windows = []
    for series in dataset.series:
        if dataset.preprocess:
            series = preprocessed(series, dataset.preprocess["ma_window"], dataset.preprocess["rate_horizon"])
        windows.extend(window_dataset(series, window, stride))
    logger.debug(f"Cut {len(windows)} windows of {window} steps (stride {stride}) from {len(dataset.series)} series")
    return windows


@dataclass(frozen=True)
class SplitConfig:
    """How windows are split into train, validation and test sets.

    ``bearing`` mode splits every condition in time: the first ``train_fraction`` of its windows go to train and
    validation (a seeded ``val_fraction`` of them to validation), the rest to test, of which the first ``purge``
    windows are dropped. ``bridge`` mode sends odd days to train and validation and even days to test.
    """

    mode: str = "bearing"
    seed: int = 0
    train_fraction: float = 0.5
    val_fraction: float = 0.2
    purge: int = 0
    min_group: int = 5

    def __post_init__(self):
        if self.mode not in SPLIT_MODES:
            raise ValueError(f"Unknown split mode '{self.mode}', expected one of {', '.join(SPLIT_MODES)}")
        if not 0.0 < self.train_fraction < 1.0 or not 0.0 <= self.val_fraction < 1.0:
            raise ValueError("Split fractions must lie in (0, 1)")
        if self.purge < 0:
            raise ValueError(f"'purge' must be >= 0, got {self.purge}")

    @classmethod
    def for_dataset(cls, kind: str, **overrides) -> "SplitConfig":
        """Return the split matching a dataset kind."""
        return cls(mode="bridge" if kind == "bridge-like" else "bearing", **overrides)


class Split(NamedTuple):
    """Train, validation and test windows."""

    train: List[SensorWindow]
    val: List[SensorWindow]
    test: List[SensorWindow]


def _grouped(windows: Iterable[SensorWindow], key: str, minimum: int) -> Dict[int, List[SensorWindow]]:
    groups: Dict[int, List[SensorWindow]] = {}
    for window in windows:
        groups.setdefault(getattr(window, key), []).append(window)
    for name, members in groups.items():
        if len(members) < minimum:
            raise GroupTooSmallError(
                f"{key.capitalize()} {name} holds {len(members)} windows, at least {minimum} needed"
            )
        members.sort(key=lambda w: (w.condition, w.offset))
    return dict(sorted(groups.items()))


def _n_val(n: int, fraction: float) -> int:
    return int(fraction * n + 0.5)


def temporal_split(windows: Sequence[SensorWindow], config: Optional[SplitConfig] = None) -> Split:
    """Split windows without leakage between the train / validation and the test partitions.

    :param windows: the windows of a dataset
    :param config: the split settings, bearing mode defaults if None
    :returns: the split, every partition in (condition, offset) order
    :raises: GroupTooSmallError
    """
    config = config or SplitConfig()
    train: List[SensorWindow] = []
    val: List[SensorWindow] = []
    test: List[SensorWindow] = []
    if config.mode == "bearing":
        for condition, members in _grouped(windows, "condition", config.min_group).items():
            n_trainval = int(len(members) * config.train_fraction)
            order = np.random.default_rng([config.seed, condition]).permutation(n_trainval)
            held = set(order[: _n_val(n_trainval, config.val_fraction)].tolist())
            for i in range(n_trainval):
                (val if i in held else train).append(members[i])
            test.extend(members[n_trainval + config.purge :])
    else:
        pooled = []
        for day, members in _grouped(windows, "group", config.min_group).items():
            (pooled if day % 2 == 1 else test).extend(members)
        order = np.random.default_rng(config.seed).permutation(len(pooled))
        held = set(order[: _n_val(len(pooled), config.val_fraction)].tolist())
        for i, window in enumerate(pooled):
            (val if i in held else train).append(window)
    logger.debug(f"Split ({config.mode}): {len(train)} train, {len(val)} val, {len(test)} test windows")
    return Split(train, val, test)


class WindowBatch(NamedTuple):
    """A batch of windows as tensors: (batch, N_L, L), (batch, N_H, L), (batch, N_w, L) and (batch, d_y)."""

    x_l: torch.Tensor
    x_h: torch.Tensor
    w: torch.Tensor
    y: torch.Tensor


class WindowDataset(Dataset):
    """Standardised windows held as stacked tensors."""

    def __init__(self, windows: Sequence[SensorWindow], standardizer: Standardizer, dtype: torch.dtype = torch.float32):
        """Stack and standardise windows.

        :param windows: the windows, non-empty
        :param standardizer: the scaling fitted on the training windows
        :param dtype: the floating point type of the tensors
        :raises: DataError
        """
        self.windows = list(windows)
        if not self.windows:
            raise DataError("Cannot build a dataset from zero windows")
        arrays = standardizer.transform(
            np.stack([w.x_l for w in self.windows]),
            np.stack([w.x_h for w in self.windows]),
            np.stack([w.w for w in self.windows]),
        )
        targets = standardizer.transform_target(np.stack([w.y for w in self.windows]))
        self.x_l, self.x_h, self.w, self.y = (torch.as_tensor(a, dtype=dtype) for a in arrays + (targets,))

    def __len__(self) -> int:
        """Return the number of windows."""
        return len(self.windows)

    def __getitem__(self, item: int) -> WindowBatch:
        """Return one standardised window."""
        return WindowBatch(self.x_l[item], self.x_h[item], self.w[item], self.y[item])

    def batch(self) -> WindowBatch:
        """Return every window as a single batch."""
        return WindowBatch(self.x_l, self.x_h, self.w, self.y)


def collate_windows(items: Sequence[WindowBatch]) -> WindowBatch:
    """Stack single windows into a batch."""
    return WindowBatch(*(torch.stack(parts) for parts in zip(*items)))
