"""Static figures: ablation bars, prediction timelines and H-signal spectra."""

import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from htgnn.data import SensorDataset, magnitude_spectrum
from htgnn.graph import NodeType

from matplotlib.figure import Figure

import numpy as np

import pandas as pd

logger = logging.getLogger(__name__)

PLOT_KINDS = ("bars", "timeline", "spectrum")
RC = {"figsize": (7.0, 4.0), "dpi": 120}


def _save(figure: Figure, path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    figure.tight_layout()
    figure.savefig(path)
    logger.info(f"Wrote figure {path}")
    return path


def _suffixed(path: str, suffix: str) -> str:
    root, extension = os.path.splitext(path)
    return f"{root}_{suffix}{extension or '.png'}"


def plot_bars(report: Dict[str, Any], out: str, metric: str = "mape") -> List[str]:
    """Draw one grouped bar chart per target from an ablation report: variants side by side in every category.

    :param report: an ablation report, ``{"variants": {name: summary}}`` with summaries from ``summarize_runs``
    :param out: the image path, the target name is appended to it
    :param metric: "mape" or "nrmse"
    :returns: the written paths
    """
    variants = {name: s for name, s in report["variants"].items() if s}
    if not variants:
        raise ValueError("The report holds no successful variant")
    first = next(iter(variants.values()))
    targets = list(first["average"])
    labels = list(first["categories"]) + ["Avg."]
    paths = []
    for target in targets:
        figure = Figure(**RC)
        axes = figure.subplots()
        width = 0.8 / len(variants)
        x = np.arange(len(labels))
        for k, (name, summary) in enumerate(variants.items()):
            cells = [summary["categories"].get(label, {}).get(target, {}).get(metric) for label in labels[:-1]]
            cells.append(summary["average"][target][metric])
            means = [c["mean"] if c else np.nan for c in cells]
            errors = [c["ci"] if c else 0.0 for c in cells]
            axes.bar(x + k * width - 0.4 + width / 2, means, width, yerr=errors, capsize=2, label=name)
        axes.set_xticks(x)
        axes.set_xticklabels(labels)
        axes.set_ylabel(f"{metric.upper()} ({target})")
        axes.legend(fontsize="small", ncol=2)
        paths.append(_save(figure, _suffixed(out, target)))
    return paths


def plot_timeline(predictions: pd.DataFrame, out: str) -> str:
    """Draw true against predicted targets in window order with a 95% band from the residual spread.

    :param predictions: a frame with ``<target>_true`` and ``<target>_pred`` columns
    :param out: the image path
    :returns: the written path
    """
    targets = [c[: -len("_true")] for c in predictions.columns if c.endswith("_true")]
    if not targets:
        raise ValueError("The predictions hold no '<target>_true' column")
    figure = Figure(figsize=(RC["figsize"][0], 2.5 * len(targets)), dpi=RC["dpi"])
    for k, target in enumerate(targets):
        axes = figure.add_subplot(len(targets), 1, k + 1)
        truth = predictions[f"{target}_true"].to_numpy()
        guess = predictions[f"{target}_pred"].to_numpy()
        band = 1.96 * np.std(guess - truth)
        steps = np.arange(len(truth))
        axes.plot(steps, truth, color="black", linewidth=1.0, label="true")
        axes.plot(steps, guess, linewidth=1.0, label="predicted")
        axes.fill_between(steps, guess - band, guess + band, alpha=0.25, linewidth=0)
        axes.set_ylabel(target)
        axes.legend(fontsize="small")
    axes.set_xlabel("window")
    return _save(figure, out)


def plot_spectrum(dataset: SensorDataset, out: str, by: str = "speed") -> str:
    """Draw the mean H-signal magnitude spectrum of every condition, coloured by an exogenous value.

    :param dataset: the dataset
    :param out: the image path
    :param by: the condition info key used for the colour scale, e.g. "speed" or "temperature"
    :returns: the written path
    """
    if dataset.graph.count(NodeType.H) == 0:
        raise ValueError("The dataset has no high-frequency sensor")
    values = np.array([s.info.get(by, np.nan) for s in dataset.series], dtype=np.float64)
    lo, hi = np.nanmin(values), np.nanmax(values)
    figure = Figure(**RC)
    axes = figure.subplots()
    for series, value in zip(dataset.series, values):
        spectrum = magnitude_spectrum(series.high).mean(axis=0)
        frequencies = np.fft.rfftfreq(series.length)
        shade = 0.5 if hi == lo else (value - lo) / (hi - lo)
        axes.plot(frequencies, spectrum, color=(shade, 0.2, 1.0 - shade), linewidth=0.6, alpha=0.6)
    axes.set_xlabel("frequency [cycles / sample]")
    axes.set_ylabel("|X(f)|")
    axes.set_title(f"H-signal spectra, {by} from {lo:g} (blue) to {hi:g} (red)")
    return _save(figure, out)


@dataclass(frozen=True)
class PlotConfig:
    """Figure settings: the metric drawn by bar charts and the condition value colouring spectra."""

    metric: str = "mape"
    by: Optional[str] = None

    def __post_init__(self):
        if self.metric not in ("mape", "nrmse"):
            raise ValueError(f"'metric' must be 'mape' or 'nrmse', got '{self.metric}'")
