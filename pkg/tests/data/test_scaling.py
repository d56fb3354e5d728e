"""Tests for the per-channel standardizer."""

from htgnn.data import Standardizer, window_dataset
from htgnn.data.errors import DataError

import numpy as np

import pytest

from tests.data.ramps import ramp_series


def test_fit_statistics():
    """Tests standardised training windows have zero mean and unit spread per channel."""
    windows = window_dataset(ramp_series(50), 10, 1)
    scaling = Standardizer.fit(windows)
    x_l, x_h, w = scaling.transform(
        np.stack([v.x_l for v in windows]), np.stack([v.x_h for v in windows]), np.stack([v.w for v in windows])
    )
    assert np.allclose(x_l.mean(axis=(0, 2)), 0.0, atol=1e-12)
    assert np.allclose(x_l.std(axis=(0, 2)), 1.0)
    assert np.allclose(x_h.std(axis=(0, 2)), 1.0)
    assert scaling.exo_std == (1.0,)
    assert np.array_equal(w, np.zeros_like(w))
    y = np.stack([v.y for v in windows])
    assert np.allclose(scaling.inverse_target(scaling.transform_target(y)), y)


def test_identity():
    """Tests the identity standardizer leaves values unchanged."""
    scaling = Standardizer.identity(2, 1, 1, 1)
    assert scaling.low_mean == (0.0, 0.0)
    assert scaling.target_std == (1.0,)
    y = np.array([[3.5], [-1.0]])
    assert np.array_equal(scaling.transform_target(y), y)


def test_dict_round_trip():
    """Tests the JSON form rebuilds an equal standardizer."""
    scaling = Standardizer.fit(window_dataset(ramp_series(40), 30, 1))
    assert Standardizer.from_dict(scaling.to_dict()) == scaling


def test_errors():
    """Tests fitting on nothing and rebuilding from malformed values fail."""
    with pytest.raises(DataError, match="zero windows"):
        Standardizer.fit([])
    with pytest.raises(DataError, match="Invalid standardizer"):
        Standardizer.from_dict({"low_mean": [0.0]})
    with pytest.raises(DataError, match="Invalid standardizer"):
        Standardizer.from_dict({**Standardizer.identity(1, 1, 1, 1).to_dict(), "low_std": ["x"]})
