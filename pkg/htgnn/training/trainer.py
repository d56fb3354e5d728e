"""The optimisation loop: AdamW on the mean squared error with warm-up, plateau decay and early stopping."""

import copy
import logging
import math
from typing import Callable, List, NamedTuple, Optional

from htgnn.data.windows import WindowBatch, WindowDataset, collate_windows
from htgnn.training.config import TrainConfig
from htgnn.training.errors import DivergedLossError
from htgnn.training.schedule import EpochRecord, TrainState, lr_at

import torch
from torch import nn
from torch.nn import functional as F
from torch.utils.data import DataLoader

logger = logging.getLogger(__name__)


class TrainResult(NamedTuple):
    """The final training state and the per-epoch loss history."""

    state: TrainState
    history: List[EpochRecord]


def batch_loss(model: nn.Module, batch: WindowBatch) -> torch.Tensor:
    """Return the mean squared error of a model on a batch."""
    return F.mse_loss(model(batch.x_l, batch.x_h, batch.w), batch.y)


def evaluate_loss(model: nn.Module, dataset: WindowDataset) -> float:
    """Return the loss over a whole dataset with the model in evaluation mode."""
    was_training = model.training
    model.eval()
    with torch.no_grad():
        loss = batch_loss(model, dataset.batch()).item()
    model.train(was_training)
    return loss


def train(
    model: nn.Module,
    train_set: WindowDataset,
    val_set: WindowDataset,
    config: Optional[TrainConfig] = None,
    on_epoch: Optional[Callable[[EpochRecord], None]] = None,
) -> TrainResult:
    """Fit a model and leave it holding the parameters of its best validation epoch.

    Batches are drawn by a generator seeded with ``config.seed``, so identical inputs give identical histories.

    :param model: the model, already in ``config.dtype``
    :param train_set: the training windows
    :param val_set: the validation windows, disjoint from the training windows
    :param config: the training settings, defaults if None
    :param on_epoch: called with every epoch record
    :returns: the final state and the history
    :raises: DivergedLossError
    """
    config = config or TrainConfig()
    torch.manual_seed(config.seed)
    generator = torch.Generator().manual_seed(config.seed)
    loader = DataLoader(
        train_set, batch_size=config.batch_size, shuffle=True, generator=generator, collate_fn=collate_windows
    )
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.lr0, weight_decay=config.weight_decay)
    state = TrainState(lr=config.lr0)
    best = copy.deepcopy(model.state_dict())
    logger.debug(f"Training on {len(train_set)} windows, validating on {len(val_set)}: {config}")
    while True:
        model.train()
        total, count = 0.0, 0
        for batch in loader:
            state.lr = lr_at(state.iteration, state, config)
            for group in optimizer.param_groups:
                group["lr"] = state.lr
            optimizer.zero_grad()
            loss = batch_loss(model, batch)
            if not math.isfinite(loss.item()):
                raise DivergedLossError(
                    f"Loss became {loss.item()} at epoch {state.epoch + 1}, iteration {state.iteration}", state
                )
            loss.backward()
            optimizer.step()
            state.iteration += 1
            total += loss.item() * len(batch.y)
            count += len(batch.y)
        val_loss = evaluate_loss(model, val_set)
        if not math.isfinite(val_loss):
            raise DivergedLossError(f"Validation loss became {val_loss} at epoch {state.epoch + 1}", state)
        improved = val_loss < state.best_val
        stop = state.end_epoch(total / count, val_loss, config)
        if improved:
            best = copy.deepcopy(model.state_dict())
        record = state.history[-1]
        logger.info(
            f"Epoch {record.epoch}: train {record.train_loss:.6g}, val {record.val_loss:.6g}, lr {record.lr:.4g}"
        )
        if on_epoch:
            on_epoch(record)
        if stop:
            break
    model.load_state_dict(best)
    model.eval()
    logger.info(f"Stopped after {state.epoch} epochs, best validation loss {state.best_val:.6g} at {state.best_epoch}")
    return TrainResult(state, state.history)
