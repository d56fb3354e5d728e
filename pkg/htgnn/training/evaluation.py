"""Per-category evaluation and aggregation of reports over runs."""

import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

from htgnn.data.scaling import Standardizer
from htgnn.data.windows import SensorWindow, WindowDataset
from htgnn.training.errors import EmptyCategoryError
from htgnn.training.metrics import mape, nrmse

import numpy as np

import torch
from torch import nn

logger = logging.getLogger(__name__)

CATEGORY_KEYS = ("speed", "temperature", "condition")
TEMPERATURE_BINS = ("<0", "0-10", "10-20", ">20")
Z_95 = 1.96


def temperature_bin(temperature: float) -> str:
    """Return the temperature category (°C) of a value."""
    if temperature < 0.0:
        return TEMPERATURE_BINS[0]
    if temperature < 10.0:
        return TEMPERATURE_BINS[1]
    if temperature < 20.0:
        return TEMPERATURE_BINS[2]
    return TEMPERATURE_BINS[3]


def category_of(window: SensorWindow, key: str) -> str:
    """Return the category label of a window.

    :param window: the window
    :param key: "speed", "temperature" (binned) or "condition"
    :returns: the label
    :raises: EmptyCategoryError, ValueError
    """
    if key not in CATEGORY_KEYS:
        raise ValueError(f"Unknown category key '{key}', expected one of {', '.join(CATEGORY_KEYS)}")
    if key == "condition":
        return str(window.condition)
    value = getattr(window, key)
    if value is None:
        raise EmptyCategoryError(f"Window of condition {window.condition} carries no {key}")
    return f"{value:g}" if key == "speed" else temperature_bin(value)


def _sort_key(label: str) -> Tuple[int, Any]:
    if label in TEMPERATURE_BINS:
        return 0, TEMPERATURE_BINS.index(label)
    try:
        return 1, float(label)
    except ValueError:
        return 2, label


def predict(
    model: nn.Module, windows: Sequence[SensorWindow], standardizer: Standardizer, dtype: torch.dtype = torch.float32
) -> Tuple[np.ndarray, np.ndarray]:
    """Run a model in evaluation mode over windows.

    :returns: the true and predicted targets in physical units, both (windows, d_y)
    """
    dataset = WindowDataset(windows, standardizer, dtype)
    batch = dataset.batch()
    model.eval()
    with torch.no_grad():
        y_pred = model(batch.x_l, batch.x_h, batch.w).double().numpy()
    y_true = np.stack([w.y for w in dataset.windows]).astype(np.float64)
    return y_true, standardizer.inverse_target(y_pred)


def metrics_by_category(
    y_true: np.ndarray,
    y_pred: np.ndarray,
    categories: Sequence[str],
    target_names: Sequence[str],
    expected: Optional[Sequence[str]] = None,
) -> Dict[str, Any]:
    """Compute NRMSE and MAPE per target within every category, plus their unweighted average over categories.

    NRMSE is normalised by the range of each target over all samples, so categories are comparable.

    :param y_true: the true targets, (samples, d_y)
    :param y_pred: the predictions, (samples, d_y)
    :param categories: the category label of every sample
    :param target_names: the name of every target column
    :param expected: if given, every one of these categories must hold samples
    :returns: ``{"categories": {label: {target: {"nrmse", "mape", "n"}}}, "average": {target: {"nrmse", "mape"}}}``
    :raises: EmptyCategoryError, DegenerateRangeError, NearZeroTruthError
    """
    y_true = np.atleast_2d(np.asarray(y_true, dtype=np.float64))
    y_pred = np.atleast_2d(np.asarray(y_pred, dtype=np.float64))
    labels = np.asarray(list(categories))
    if labels.size == 0:
        raise EmptyCategoryError("No sample to evaluate")
    present = sorted(set(labels.tolist()), key=_sort_key)
    for label in expected or ():
        if label not in present:
            raise EmptyCategoryError(f"Category '{label}' holds no sample")
    ranges = y_true.max(axis=0) - y_true.min(axis=0)
    report: Dict[str, Any] = {"categories": {}, "average": {}}
    for label in present:
        mask = labels == label
        report["categories"][label] = {
            name: {
                "nrmse": nrmse(y_true[mask, k], y_pred[mask, k], float(ranges[k])),
                "mape": mape(y_true[mask, k], y_pred[mask, k]),
                "n": int(mask.sum()),
            }
            for k, name in enumerate(target_names)
        }
    for name in target_names:
        values = [report["categories"][label][name] for label in present]
        report["average"][name] = {m: float(np.mean([v[m] for v in values])) for m in ("nrmse", "mape")}
    return report


def evaluate_by_category(
    model: nn.Module,
    windows: Sequence[SensorWindow],
    key: str,
    standardizer: Standardizer,
    target_names: Sequence[str],
    dtype: torch.dtype = torch.float32,
) -> Dict[str, Any]:
    """Evaluate a model on windows grouped by speed, temperature bin or condition.

    Temperature bins without windows are dropped with a warning.

    :raises: EmptyCategoryError, DegenerateRangeError, NearZeroTruthError
    """
    if not windows:
        raise EmptyCategoryError("No window to evaluate")
    categories = [category_of(w, key) for w in windows]
    if key == "temperature":
        missing = [b for b in TEMPERATURE_BINS if b not in categories]
        if missing:
            logger.warning(f"No window in temperature bin(s) {', '.join(missing)}")
    y_true, y_pred = predict(model, windows, standardizer, dtype)
    report = metrics_by_category(y_true, y_pred, categories, target_names)
    report["by"] = key
    return report


def worst_categories(report: Dict[str, Any], count: int = 2, metric: str = "mape") -> Dict[str, List[str]]:
    """Return, per target, the labels of the categories with the largest error, worst first.

    Ties keep the report's category order.

    :param report: a report from :func:`metrics_by_category`
    :param count: how many categories to return per target, fewer if the report holds fewer
    :param metric: "nrmse" or "mape"
    :raises: ValueError
    """
    if count < 1:
        raise ValueError(f"'count' must be positive, got {count}")
    if metric not in ("nrmse", "mape"):
        raise ValueError(f"Unknown metric '{metric}', expected nrmse or mape")
    labels = list(report["categories"])
    return {
        target: sorted(labels, key=lambda label: -report["categories"][label][target][metric])[:count]
        for target in report["average"]
    }


def mean_interval(values: Sequence[float]) -> Dict[str, float]:
    """Return the mean of repeated measurements and its 95% normal approximation confidence half-width."""
    n = len(values)
    ci = Z_95 * float(np.std(values, ddof=1)) / math.sqrt(n) if n > 1 else 0.0
    return {"mean": float(np.mean(values)), "ci": ci}


def summarize_runs(reports: Sequence[Dict[str, Any]]) -> Dict[str, Any]:
    """Aggregate reports of repeated runs into means with 95% normal approximation confidence half-widths.

    Only categories present in every report are summarised.

    :param reports: reports from :func:`metrics_by_category`
    :returns: ``{"n": runs, "categories": {label: {target: {metric: {"mean", "ci"}}}}, "average": {...}}``
    :raises: EmptyCategoryError
    """
    if not reports:
        raise EmptyCategoryError("No run to summarise")
    n = len(reports)
    labels = [label for label in reports[0]["categories"] if all(label in r["categories"] for r in reports)]
    targets = list(reports[0]["average"])
    result: Dict[str, Any] = {"n": n, "categories": {}, "average": {}}
    for label in labels:
        result["categories"][label] = {
            t: {m: mean_interval([r["categories"][label][t][m] for r in reports]) for m in ("nrmse", "mape")}
            for t in targets
        }
    for t in targets:
        result["average"][t] = {m: mean_interval([r["average"][t][m] for r in reports]) for m in ("nrmse", "mape")}
    return result
