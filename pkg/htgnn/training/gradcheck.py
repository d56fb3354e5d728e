"""Comparison of autograd gradients against central finite differences."""

import logging
import math
from typing import Callable, Optional

from htgnn.data.windows import WindowBatch
from htgnn.training.errors import PreconditionError

import numpy as np

import torch
from torch import nn
from torch.nn import functional as F

logger = logging.getLogger(__name__)


def _mse(model: nn.Module, batch: WindowBatch) -> torch.Tensor:
    return F.mse_loss(model(batch.x_l, batch.x_h, batch.w), batch.y)


def grad_check(
    model: nn.Module,
    batch: WindowBatch,
    step: float = 1e-5,
    fraction: float = 0.05,
    minimum: int = 50,
    seed: int = 0,
    floor: float = 1e-6,
    loss_fn: Optional[Callable[[nn.Module, WindowBatch], torch.Tensor]] = None,
) -> float:
    """Return the largest relative error between analytic and central difference gradients of the loss.

    A seeded random ``fraction`` of all parameter entries, at least ``minimum`` of them (or all if fewer), is
    checked. The relative error of an entry is ``|g - g_fd| / max(|g|, |g_fd|, floor)``. The model is evaluated in
    evaluation mode, so dropout is off, and its parameters are left unchanged.

    :param model: a model whose parameters are all float64
    :param batch: the inputs and targets
    :param step: the finite difference step
    :param fraction: the share of parameter entries to check
    :param minimum: the least number of entries to check
    :param seed: the seed selecting the entries
    :param floor: the least denominator of the relative error
    :param loss_fn: the scalar loss, mean squared error if None
    :returns: the maximum relative error
    :raises: PreconditionError
    """
    if not step > 0.0 or not math.isfinite(step):
        raise PreconditionError(f"Finite difference step must be positive, got {step}")
    parameters = [p for p in model.parameters() if p.requires_grad]
    if not parameters:
        raise PreconditionError("Model has no trainable parameter")
    if any(p.dtype != torch.float64 for p in parameters):
        raise PreconditionError("Gradient checks need a float64 model")
    loss_fn = loss_fn or _mse
    was_training = model.training
    model.eval()
    model.zero_grad()
    loss_fn(model, batch).backward()
    analytic = [p.grad.detach().clone().view(-1) if p.grad is not None else torch.zeros(p.numel()) for p in parameters]
    sizes = np.array([p.numel() for p in parameters])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    count = min(total, max(minimum, math.ceil(fraction * total)))
    chosen = np.sort(np.random.default_rng(seed).choice(total, size=count, replace=False))
    worst = 0.0
    with torch.no_grad():
        for flat in chosen:
            which = int(np.searchsorted(offsets, flat, side="right") - 1)
            k = int(flat - offsets[which])
            entry = parameters[which].view(-1)
            original = entry[k].item()
            entry[k] = original + step
            plus = loss_fn(model, batch).item()
            entry[k] = original - step
            minus = loss_fn(model, batch).item()
            entry[k] = original
            numeric = (plus - minus) / (2.0 * step)
            exact = analytic[which][k].item()
            worst = max(worst, abs(exact - numeric) / max(abs(exact), abs(numeric), floor))
    model.zero_grad()
    model.train(was_training)
    logger.debug(f"Checked {count} of {total} gradient entries, worst relative error {worst:.3g}")
    return worst
