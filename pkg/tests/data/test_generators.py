"""Tests the statistical structure of the synthetic bearing-like and bridge-like generators."""

import dataclasses

from htgnn.data import (
    BearingLikeConfig,
    BridgeLikeConfig,
    bearing_load_grid,
    dataset_windows,
    dominant_frequency,
    generate,
    generate_bearing_like,
    generate_bridge_like,
    spectral_centroid,
)
from htgnn.data.errors import EmptyGridError

import numpy as np

import pytest

QUIET_BEARING = BearingLikeConfig(temperature_noise=0.0, vibration_jitter=0.0, vibration_snr_db=None)


def _r_squared(features: np.ndarray, target: np.ndarray) -> float:
    design = np.column_stack([features, np.ones(len(target))])
    coefficients, *_ = np.linalg.lstsq(design, target, rcond=None)
    residual = target - design @ coefficients
    return 1.0 - float(residual @ residual) / float(((target - target.mean()) ** 2).sum())


def test_bearing_grid(bearing_dataset):
    """Tests the default grid holds 55 distinct conditions of 5 speeds and 11 load pairs."""
    assert len(bearing_dataset.series) == 55
    assert [s.info["speed"] for s in bearing_dataset.series[:5]] == [10.0, 20.0, 30.0, 40.0, 50.0]
    combos = {(s.info["axial_load"], s.info["radial_load"], s.info["speed"]) for s in bearing_dataset.series}
    assert len(combos) == 55
    loads = bearing_load_grid(BearingLikeConfig())
    assert [fy for _, fy in loads] == sorted(fy for _, fy in loads)
    assert all(4.0 <= fx <= 12.0 and 20.0 <= fy <= 60.0 for fx, fy in loads)
    first = bearing_dataset.series[0]
    assert first.low.shape == (20, 66)
    assert first.high.shape == (12, 66)
    assert first.target.shape == (2, 66)
    assert bearing_dataset.target_names == ("F_x", "F_y")
    assert bearing_dataset.exogenous_names == ("speed",)


def test_bearing_dominant_frequency_tracks_speed():
    """Tests the dominant vibration frequency doubles when the speed doubles on every vibration sensor."""
    config = BearingLikeConfig(
        speeds=(10.0, 20.0, 40.0), load_pairs=1, steps=1000, vibration_snr_db=None, frequency_slip=0.0
    )
    dataset = generate_bearing_like(config, seed=3)
    for series, expected in zip(dataset.series, (40, 80, 160)):
        assert dominant_frequency(series.high).tolist() == [expected] * 12


def test_bearing_heating_scales_with_speed():
    """Tests noiseless heating rates are constant in time and proportional to the speed."""
    config = dataclasses.replace(QUIET_BEARING, speeds=(10.0, 20.0), load_pairs=2)
    series = generate_bearing_like(config, seed=1).series
    for slow, fast in ((series[0], series[1]), (series[2], series[3])):
        assert np.allclose(slow.low, slow.low[:, :1], rtol=0.0, atol=1e-15)
        assert np.allclose(fast.low, 2.0 * slow.low, rtol=1e-12, atol=0.0)
        assert np.all(slow.low > 0.0)


def test_bearing_zero_load_has_zero_mean_heating():
    """Tests temperature rates fluctuate around zero when no load is applied."""
    config = BearingLikeConfig(axial_load=(0.0, 0.0), radial_load=(0.0, 0.0), load_pairs=1, steps=1000)
    for series in generate_bearing_like(config, seed=2).series:
        assert np.all(np.abs(series.low.mean(axis=1)) < 5 * 0.02 / np.sqrt(100))


def test_bearing_loads_are_linearly_recoverable():
    """Tests the loads are linear in the speed normalised temperature rates."""
    dataset = generate_bearing_like(QUIET_BEARING, seed=0)
    features = np.stack([s.low.mean(axis=1) / s.info["speed"] for s in dataset.series])
    for k in range(2):
        target = np.array([s.target[k, -1] for s in dataset.series])
        assert _r_squared(features, target) > 0.95


def test_radial_load_only_reaches_the_temperatures():
    """Tests changing the radial loads leaves every vibration sample unchanged but not the temperature rates."""
    config = BearingLikeConfig(load_pairs=3, speeds=(20.0, 40.0))
    reference = generate_bearing_like(config, seed=6).series
    heavier = generate_bearing_like(dataclasses.replace(config, radial_load=(30.0, 90.0)), seed=6).series
    wider = generate_bearing_like(dataclasses.replace(config, axial_load=(2.0, 16.0)), seed=6).series
    for first, second in zip(reference, heavier):
        assert np.array_equal(first.high, second.high)
        assert not np.array_equal(first.low, second.low)
    assert not np.array_equal(reference[-1].high, wider[-1].high)


@pytest.mark.parametrize("raw_temperature", (False, True))
def test_bearing_outputs_respect_ceilings(raw_temperature: bool):
    """Tests rates, integrated temperatures and vibrations stay finite and within their configured ceilings."""
    config = BearingLikeConfig(raw_temperature=raw_temperature, temperature_ceiling=50.0, vibration_ceiling=1.0)
    for series in generate_bearing_like(config, seed=0).series:
        assert np.all(np.isfinite(series.low))
        assert np.all(np.isfinite(series.high))
        assert np.abs(series.low).max() <= 50.0
        assert np.abs(series.high).max() <= 1.0


def test_raw_temperatures_are_clipped_after_integration():
    """Tests the hottest conditions saturate a low temperature ceiling and integrate freely under the default one."""
    clipped = generate_bearing_like(BearingLikeConfig(raw_temperature=True, temperature_ceiling=50.0), seed=0)
    assert max(s.low.max() for s in clipped.series) == 50.0
    free = generate_bearing_like(BearingLikeConfig(raw_temperature=True), seed=0)
    assert 50.0 < max(s.low.max() for s in free.series) < 120.0


def test_generation_is_deterministic():
    """Tests the same seed reproduces every array and another seed does not."""
    config = BearingLikeConfig(load_pairs=2)
    a, b, c = (generate_bearing_like(config, seed=s) for s in (7, 7, 8))
    for first, second in zip(a.series, b.series):
        assert np.array_equal(first.high, second.high)
        assert np.array_equal(first.low, second.low)
    assert not np.array_equal(a.series[0].high, c.series[0].high)
    bridge = BridgeLikeConfig(days=1, passages_per_day=3)
    x, y = generate_bridge_like(bridge, seed=4), generate_bridge_like(bridge, seed=4)
    assert [s.info for s in x.series] == [s.info for s in y.series]
    assert np.array_equal(x.series[2].high, y.series[2].high)


def test_bridge_schedule(bridge_dataset):
    """Tests the default schedule of 14 days of 11 passages with loads and temperatures inside their ranges."""
    assert len(bridge_dataset.series) == 154
    groups = [s.group for s in bridge_dataset.series]
    assert sorted(set(groups)) == list(range(1, 15))
    assert all(groups.count(day) == 11 for day in range(1, 15))
    assert all(42100.0 <= s.info["load"] <= 53500.0 for s in bridge_dataset.series)
    assert all(-5.0 <= s.info["temperature"] <= 30.0 for s in bridge_dataset.series)
    assert all(s.target[0, -1] == s.info["load"] for s in bridge_dataset.series)
    assert len(dataset_windows(bridge_dataset)) == 154 * 13


def test_bridge_centroid_rises_with_temperature():
    """Tests the acceleration spectral centroid increases with the temperature at a fixed load."""
    centroids = []
    for temperature in (-5.0, 10.0, 25.0):
        config = BridgeLikeConfig(
            days=1, passages_per_day=1, steps=600, temperature_range=(temperature, temperature), snr_db=None
        )
        centroids.append(spectral_centroid(generate_bridge_like(config, seed=0).series[0].high))
    assert np.all(centroids[0] < centroids[1])
    assert np.all(centroids[1] < centroids[2])


def test_bridge_deflection_is_linear_in_load():
    """Tests the displacement peak of every sensor is a linear function of the train load."""
    dataset = generate_bridge_like(BridgeLikeConfig(days=1, passages_per_day=20, snr_db=None), seed=5)
    loads = np.array([s.info["load"] for s in dataset.series])
    peaks = np.stack([s.low.max(axis=1) for s in dataset.series])
    for row in range(peaks.shape[1]):
        assert np.corrcoef(loads, peaks[:, row])[0, 1] ** 2 > 0.99
    assert _r_squared(peaks, loads) > 0.95


def test_raw_temperature_preprocessing():
    """Tests raw temperatures are turned back into their heating rates and trimmed before windowing."""
    config = dataclasses.replace(QUIET_BEARING, speeds=(10.0,), load_pairs=1, steps=200)
    rates = generate_bearing_like(config, seed=0).series[0].low
    dataset = generate_bearing_like(dataclasses.replace(config, raw_temperature=True), seed=0)
    assert dataset.preprocess == {"ma_window": 6, "rate_horizon": 30}
    assert dataset.series[0].low[0, 0] > 20.0
    windows = dataset_windows(dataset)
    assert len(windows) == 136
    for window in windows[::15]:
        assert np.allclose(window.x_l, rates[:, :30], rtol=0.0, atol=1e-9)


@pytest.mark.parametrize(
    "kind, config",
    (
        ("bearing-like", BearingLikeConfig(speeds=())),
        ("bearing-like", BearingLikeConfig(load_pairs=0)),
        ("bridge-like", BridgeLikeConfig(days=0)),
        ("bridge-like", BridgeLikeConfig(speed_classes=())),
    ),
)
def test_empty_grids(kind: str, config):
    """Tests configurations without any condition are refused."""
    with pytest.raises(EmptyGridError):
        generate(kind, config)


def test_generator_errors():
    """Tests unknown kinds and malformed configurations are rejected."""
    with pytest.raises(ValueError, match="Unknown dataset kind 'tunnel-like'"):
        generate("tunnel-like")
    with pytest.raises(ValueError, match="Load ranges"):
        BearingLikeConfig(axial_load=(1.0,))
    with pytest.raises(ValueError, match="modal frequency"):
        BridgeLikeConfig(modal_amplitudes=(1.0,))
