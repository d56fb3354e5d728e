"""Optimisation settings with per-dataset presets."""

from dataclasses import dataclass

import torch

WARMUP_ITERS = {"bearing-like": 200, "bridge-like": 500}
DTYPES = ("float32", "float64")


@dataclass(frozen=True)
class TrainConfig:
    """AdamW, warm-up, plateau decay and early stopping settings.

    Training stops after ``patience`` epochs without a strict validation improvement, never before ``min_epochs``.
    The learning rate is multiplied by ``plateau_factor`` after ``plateau_patience`` epochs without improvement and
    never drops below ``lr_min``.
    """

    lr0: float = 5e-3
    max_epochs: int = 150
    patience: int = 20
    min_epochs: int = 50
    plateau_factor: float = 0.9
    plateau_patience: int = 10
    warmup_iters: int = 200
    lr_min: float = 1e-4
    weight_decay: float = 1e-4
    batch_size: int = 32
    seed: int = 0
    dtype: str = "float32"

    def __post_init__(self):
        if not 0.0 < self.lr_min <= self.lr0:
            raise ValueError(f"Learning rates must satisfy 0 < lr_min <= lr0, got {self.lr_min} and {self.lr0}")
        if not 0 < self.patience < self.max_epochs:
            raise ValueError(f"'patience' ({self.patience}) must lie in (0, max_epochs = {self.max_epochs})")
        if self.min_epochs < 0 or self.warmup_iters < 0 or self.plateau_patience < 1 or self.batch_size < 1:
            raise ValueError("min_epochs and warmup_iters must be >= 0, plateau_patience and batch_size >= 1")
        if not 0.0 < self.plateau_factor <= 1.0:
            raise ValueError(f"'plateau_factor' must lie in (0, 1], got {self.plateau_factor}")
        if self.weight_decay < 0.0:
            raise ValueError(f"'weight_decay' must be >= 0, got {self.weight_decay}")
        if self.dtype not in DTYPES:
            raise ValueError(f"'dtype' must be one of {', '.join(DTYPES)}, got '{self.dtype}'")

    @property
    def torch_dtype(self) -> torch.dtype:
        """Return the floating point type models and tensors are trained in."""
        return getattr(torch, self.dtype)

    @classmethod
    def for_dataset(cls, kind: str, **overrides) -> "TrainConfig":
        """Return the default settings for a dataset kind.

        :raises: ValueError
        """
        if kind not in WARMUP_ITERS:
            raise ValueError(f"Unknown dataset kind '{kind}', expected one of {', '.join(WARMUP_ITERS)}")
        values = {"warmup_iters": WARMUP_ITERS[kind]}
        values.update(overrides)
        return cls(**values)
