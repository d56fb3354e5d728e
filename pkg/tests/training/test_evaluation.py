"""Tests per-category evaluation and the aggregation of repeated runs."""

import logging

from htgnn.data import SensorWindow, Standardizer
from htgnn.training import (
    TEMPERATURE_BINS,
    category_of,
    evaluate_by_category,
    mean_interval,
    metrics_by_category,
    predict,
    summarize_runs,
    temperature_bin,
    worst_categories,
)
from htgnn.training.errors import EmptyCategoryError

import numpy as np

import pytest

from tests.training.stubs import LastValue, linear_windows

import torch


def _passage(last: float, load: float, temperature: float, condition: int = 0) -> SensorWindow:
    x_l = np.full((2, 6), last)
    return SensorWindow(
        x_l, np.zeros((1, 6)), np.full((1, 6), temperature), np.array([load]), condition, 1, 0, 1.0, temperature
    )


@pytest.mark.parametrize(
    "temperature, label",
    ((-5.0, "<0"), (-0.01, "<0"), (0.0, "0-10"), (9.99, "0-10"), (10.0, "10-20"), (20.0, ">20"), (31.0, ">20")),
)
def test_temperature_bin(temperature: float, label: str):
    """Tests the bin edges of the temperature categories."""
    assert temperature_bin(temperature) == label


def test_category_of():
    """Tests category labels of a window and the errors for missing metadata."""
    window = linear_windows(4)[3]
    assert category_of(window, "speed") == "40"
    assert category_of(window, "condition") == "3"
    assert category_of(_passage(1.0, 1.0, 12.5), "temperature") == "10-20"
    with pytest.raises(EmptyCategoryError, match="carries no temperature"):
        category_of(window, "temperature")
    with pytest.raises(ValueError, match="Unknown category key"):
        category_of(window, "load")


def test_category_average():
    """Tests per-category errors use the range of the whole set and are averaged without weights."""
    y_true = np.array([[10.0], [110.0], [20.0], [60.0], [40.0], [50.0]])
    y_pred = np.array([[12.0], [108.0], [24.0], [56.0], [36.0], [54.0]])
    report = metrics_by_category(y_true, y_pred, ["a", "a", "b", "b", "b", "b"], ["load"])
    assert report["categories"]["a"]["load"]["nrmse"] == pytest.approx(0.02)
    assert report["categories"]["b"]["load"]["nrmse"] == pytest.approx(0.04)
    assert report["categories"]["b"]["load"]["n"] == 4
    assert report["average"]["load"]["nrmse"] == pytest.approx(0.03)
    assert report["categories"]["a"]["load"]["mape"] == pytest.approx((20.0 + 200.0 / 110.0) / 2.0)
    with pytest.raises(EmptyCategoryError, match="Category 'c' holds no sample"):
        metrics_by_category(y_true, y_pred, ["a", "a", "b", "b", "b", "b"], ["load"], expected=["a", "c"])
    with pytest.raises(EmptyCategoryError):
        metrics_by_category(y_true[:0], y_pred[:0], [], ["load"])


def test_categories_are_ordered():
    """Tests temperature bins come in temperature order and numeric labels in numeric order."""
    y = np.arange(1.0, 5.0)[:, None]
    report = metrics_by_category(y, y, [">20", "<0", "10-20", "0-10"], ["load"])
    assert list(report["categories"]) == list(TEMPERATURE_BINS)
    report = metrics_by_category(y, y, ["50", "10", "20", "10"], ["load"])
    assert list(report["categories"]) == ["10", "20", "50"]


def test_predict_returns_physical_units():
    """Tests predictions are mapped back through the target scaling."""
    windows = [_passage(v, 2.0 * v, 5.0) for v in (1.0, 2.0, 3.0)]
    scaling = Standardizer(
        (0.0, 0.0), (1.0, 1.0), (0.0,), (1.0,), (0.0,), (1.0,), target_mean=(10.0,), target_std=(2.0,)
    )
    y_true, y_pred = predict(LastValue(), windows, scaling, torch.float64)
    assert y_true.ravel().tolist() == [2.0, 4.0, 6.0]
    assert y_pred.ravel().tolist() == [12.0, 14.0, 16.0]


def test_evaluate_by_temperature(caplog):
    """Tests the temperature report and the warning about bins without windows."""
    windows = [_passage(v, v + 0.5, t, i) for i, (v, t) in enumerate(((1.0, -3.0), (2.0, 4.0), (3.0, 12.0)))]
    with caplog.at_level(logging.WARNING):
        report = evaluate_by_category(
            LastValue(), windows, "temperature", Standardizer.identity(2, 1, 1, 1), ["load"], torch.float64
        )
    assert report["by"] == "temperature"
    assert list(report["categories"]) == ["<0", "0-10", "10-20"]
    assert report["average"]["load"]["nrmse"] == pytest.approx(0.5 / 2.0)
    assert "No window in temperature bin(s) >20" in caplog.text
    with pytest.raises(EmptyCategoryError):
        evaluate_by_category(LastValue(), [], "temperature", Standardizer.identity(2, 1, 1, 1), ["load"])


def test_summarize_runs():
    """Tests means and normal approximation confidence half-widths over runs."""
    reports = [
        {
            "categories": {"10": {"load": {"nrmse": v, "mape": 10 * v}}, **({"20": {}} if v < 0.3 else {})},
            "average": {"load": {"nrmse": v, "mape": 10 * v}},
        }
        for v in (0.1, 0.2, 0.3)
    ]
    summary = summarize_runs(reports)
    assert summary["n"] == 3
    assert list(summary["categories"]) == ["10"]
    assert summary["average"]["load"]["nrmse"]["mean"] == pytest.approx(0.2)
    assert summary["average"]["load"]["nrmse"]["ci"] == pytest.approx(1.96 * 0.1 / 3**0.5)
    assert summary["categories"]["10"]["load"]["mape"]["mean"] == pytest.approx(2.0)
    assert summarize_runs(reports[:1])["average"]["load"]["nrmse"]["ci"] == 0.0
    with pytest.raises(EmptyCategoryError):
        summarize_runs([])


def test_worst_categories():
    """Tests the categories with the largest error come worst first, per target, ties in report order."""
    report = metrics_by_category(
        np.array([[10.0, 10.0], [20.0, 10.0], [10.0, 20.0], [20.0, 20.0]]),
        np.array([[11.0, 10.5], [26.0, 10.5], [12.0, 22.0], [20.0, 24.0]]),
        ["a", "b", "c", "d"],
        ["F_x", "F_y"],
    )
    assert worst_categories(report) == {"F_x": ["b", "c"], "F_y": ["d", "c"]}
    assert worst_categories(report, count=3)["F_y"] == ["d", "c", "a"]
    assert worst_categories(report, count=9)["F_x"] == ["b", "c", "a", "d"]
    with pytest.raises(ValueError, match="'count' must be positive"):
        worst_categories(report, count=0)
    with pytest.raises(ValueError, match="Unknown metric 'rmse'"):
        worst_categories(report, metric="rmse")


def test_mean_interval():
    """Tests the mean and half-width of repeated measurements, zero width for a single run."""
    assert mean_interval([1.0, 2.0, 3.0]) == pytest.approx({"mean": 2.0, "ci": 1.96 / 3**0.5})
    assert mean_interval([4.0]) == {"mean": 4.0, "ci": 0.0}
