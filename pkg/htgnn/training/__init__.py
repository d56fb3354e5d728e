"""Training loop, learning rate schedule, metrics, per-category evaluation and gradient verification."""

from htgnn.training.config import TrainConfig
from htgnn.training.evaluation import (
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
from htgnn.training.gradcheck import grad_check
from htgnn.training.metrics import mape, nrmse
from htgnn.training.schedule import EpochRecord, TrainState, lr_at, steady_lr
from htgnn.training.trainer import TrainResult, batch_loss, evaluate_loss, train

__all__ = [
    "TEMPERATURE_BINS",
    "EpochRecord",
    "TrainConfig",
    "TrainResult",
    "TrainState",
    "batch_loss",
    "category_of",
    "evaluate_by_category",
    "evaluate_loss",
    "grad_check",
    "lr_at",
    "mape",
    "mean_interval",
    "metrics_by_category",
    "nrmse",
    "predict",
    "steady_lr",
    "summarize_runs",
    "temperature_bin",
    "train",
    "worst_categories",
    "errors",
]
