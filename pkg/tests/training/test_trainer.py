"""Tests the training loop on linearly solvable toy data."""

import dataclasses

from htgnn.data import Standardizer, WindowDataset
from htgnn.training import EpochRecord, TrainConfig, evaluate_loss, train
from htgnn.training.errors import DivergedLossError

import pytest

from tests.training.stubs import Diverging, LinearMap, linear_windows

import torch

LINEAR_CONFIG = TrainConfig(
    lr0=2e-2, max_epochs=60, patience=10, min_epochs=0, warmup_iters=0, weight_decay=0.0, batch_size=16, dtype="float64"
)
SOLVABLE_CONFIG = dataclasses.replace(
    LINEAR_CONFIG, max_epochs=150, patience=149, plateau_factor=0.5, plateau_patience=2, lr_min=1e-5
)


@pytest.fixture(scope="module")
def linear_sets():
    """Fixture returning float64 training and validation sets of linearly generated windows."""
    windows = linear_windows(200, seed=1)
    scaling = Standardizer.identity(4, 2, 1, 2)
    return WindowDataset(windows[:160], scaling, torch.float64), WindowDataset(windows[160:], scaling, torch.float64)


def _linear_model(seed: int = 0) -> LinearMap:
    torch.manual_seed(seed)
    return LinearMap().double()


def test_training_fits_a_linear_target(linear_sets):
    """Tests the training loss of an exactly solvable problem falls below 1e-3 of its start within 150 epochs."""
    train_set, val_set = linear_sets
    model = _linear_model()
    initial = evaluate_loss(model, train_set)
    records = []
    result = train(model, train_set, val_set, SOLVABLE_CONFIG, on_epoch=records.append)
    assert result.state.epoch <= 150
    assert evaluate_loss(model, train_set) < 1e-3 * initial
    assert evaluate_loss(model, val_set) == pytest.approx(result.state.best_val)
    assert records == result.history
    assert all(isinstance(r, EpochRecord) for r in records)
    assert result.state.iteration == result.state.epoch * 10
    assert not model.training


def test_training_is_deterministic(linear_sets):
    """Tests the same seeds reproduce the loss history exactly."""
    train_set, val_set = linear_sets
    config = dataclasses.replace(LINEAR_CONFIG, max_epochs=5, patience=2)
    first = train(_linear_model(), train_set, val_set, config).history
    second = train(_linear_model(), train_set, val_set, config).history
    assert first == second
    other = train(_linear_model(), train_set, val_set, dataclasses.replace(config, seed=1)).history
    assert other != first


def test_divergence_is_reported(linear_sets):
    """Tests a NaN loss stops training with the state at that point."""
    train_set, val_set = linear_sets
    with pytest.raises(DivergedLossError, match="Loss became nan at epoch 1, iteration 0") as x:
        train(Diverging().double(), train_set, val_set, LINEAR_CONFIG)
    assert x.value.state.epoch == 0
