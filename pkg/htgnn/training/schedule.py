"""Learning rate schedule and early stopping bookkeeping."""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, NamedTuple

from htgnn.training.config import TrainConfig


class EpochRecord(NamedTuple):
    """One row of the loss history."""

    epoch: int
    train_loss: float
    val_loss: float
    lr: float


@dataclass
class TrainState:
    """Mutable progress of a training run.

    The optimiser's moment estimates live in the optimiser, this tracks the schedule and stopping state.
    """

    epoch: int = 0
    iteration: int = 0
    best_val: float = math.inf
    best_epoch: int = 0
    since_improvement: int = 0
    since_decay: int = 0
    decays: int = 0
    lr: float = math.nan
    history: List[EpochRecord] = field(default_factory=list)

    def end_epoch(self, train_loss: float, val_loss: float, config: TrainConfig) -> bool:
        """Record an epoch and update the plateau and stopping counters.

        :param train_loss: the mean training loss of the epoch
        :param val_loss: the validation loss after the epoch
        :param config: the training settings
        :returns: True if training should stop
        """
        self.epoch += 1
        self.history.append(EpochRecord(self.epoch, train_loss, val_loss, self.lr))
        if val_loss < self.best_val:
            self.best_val = val_loss
            self.best_epoch = self.epoch
            self.since_improvement = 0
            self.since_decay = 0
        else:
            self.since_improvement += 1
            self.since_decay += 1
            if self.since_decay >= config.plateau_patience:
                self.decays += 1
                self.since_decay = 0
        if self.epoch >= config.max_epochs:
            return True
        return self.since_improvement >= config.patience and self.epoch >= config.min_epochs

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON serialisable form, non-finite numbers as strings."""
        values = asdict(self)
        values["history"] = [r._asdict() for r in self.history]
        return {k: (str(v) if isinstance(v, float) and not math.isfinite(v) else v) for k, v in values.items()}


def steady_lr(decays: int, config: TrainConfig) -> float:
    """Return the plateau-decayed learning rate after a number of decays."""
    return max(config.lr_min, config.lr0 * config.plateau_factor**decays)


def lr_at(iteration: int, state: TrainState, config: TrainConfig) -> float:
    """Return the learning rate of an optimiser iteration.

    During the first ``warmup_iters`` iterations the rate moves linearly from ``lr0`` to the plateau-decayed rate,
    afterwards it is the plateau-decayed rate. Either way it stays within ``[lr_min, lr0]``.

    :param iteration: the global iteration, counted from zero
    :param state: the training state holding the number of plateau decays
    :param config: the training settings
    :returns: the learning rate
    """
    steady = steady_lr(state.decays, config)
    if iteration < config.warmup_iters:
        return config.lr0 + (steady - config.lr0) * iteration / config.warmup_iters
    return steady
