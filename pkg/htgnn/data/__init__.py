"""Synthetic sensor data: generators, signal preprocessing, windows, leakage-free splits and on-disk storage."""

from htgnn.data.generators import (
    GENERATORS,
    BearingLikeConfig,
    BridgeLikeConfig,
    RawSeries,
    SensorDataset,
    bearing_load_grid,
    generate_bearing_like,
    generate_bridge_like,
)
from htgnn.data.scaling import Standardizer
from htgnn.data.signals import (
    add_noise,
    dominant_frequency,
    magnitude_spectrum,
    moving_average,
    preprocess_low_freq,
    spectral_centroid,
    upsample,
    valid_span,
)
from htgnn.data.storage import read_dataset, write_dataset
from htgnn.data.windows import (
    SensorWindow,
    Split,
    SplitConfig,
    WindowBatch,
    WindowDataset,
    collate_windows,
    dataset_windows,
    temporal_split,
    window_dataset,
    window_offsets,
)

__all__ = [
    "GENERATORS",
    "BearingLikeConfig",
    "BridgeLikeConfig",
    "RawSeries",
    "SensorDataset",
    "SensorWindow",
    "Split",
    "SplitConfig",
    "Standardizer",
    "WindowBatch",
    "WindowDataset",
    "add_noise",
    "bearing_load_grid",
    "collate_windows",
    "dataset_windows",
    "dominant_frequency",
    "generate",
    "generate_bearing_like",
    "generate_bridge_like",
    "magnitude_spectrum",
    "moving_average",
    "preprocess_low_freq",
    "read_dataset",
    "spectral_centroid",
    "temporal_split",
    "upsample",
    "valid_span",
    "window_dataset",
    "window_offsets",
    "write_dataset",
    "errors",
]


def generate(kind: str, config=None, seed: int = 0) -> SensorDataset:
    """Generate a dataset of the given kind ("bearing-like" or "bridge-like").

    :raises: ValueError, EmptyGridError
    """
    if kind not in GENERATORS:
        raise ValueError(f"Unknown dataset kind '{kind}', expected one of {', '.join(GENERATORS)}")
    _, generator = GENERATORS[kind]
    return generator(config, seed=seed)
