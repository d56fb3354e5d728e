"""Model configuration with per-dataset presets."""

from dataclasses import dataclass, replace
from typing import Any, Dict, Tuple

from htgnn.nn.errors import InvalidVariantError

GRAPH_VARIANTS = (
    "HTGNN",
    "HTGNN_wo_EXO",
    "GRU_GAT_homog",
    "GRU_GCN_homog",
    "CNN_GCN_homog",
    "CNN_GCN_vib",
    "GRU_GCN_vib",
)
BASELINE_VARIANTS = ("BiLSTM", "CNN1D", "GCNN1D", "MTGAT")
VARIANTS = GRAPH_VARIANTS + BASELINE_VARIANTS
ABLATION_VARIANTS = GRAPH_VARIANTS

DATASET_PRESETS: Dict[str, Dict[str, Any]] = {
    "bearing-like": {"window": 30, "n_exogenous": 1, "d_y": 2, "d_w": 5, "d": 10},
    "bridge-like": {"window": 60, "n_exogenous": 1, "d_y": 1, "d_w": 10, "d": 20},
}


@dataclass(frozen=True)
class ModelConfig:
    """Dimensions and switches of a model variant.

    ``d`` is the node state size shared by the low-frequency encoder, the high-frequency encoder (``d // 2`` small
    scale features plus the rest from the large scale) and every message passing layer. ``hidden``,
    ``baseline_kernel`` and ``attention_dim`` only apply to the baselines.
    """

    variant: str = "HTGNN"
    window: int = 30
    n_exogenous: int = 1
    d_y: int = 2
    d_w: int = 5
    d: int = 10
    d_graph: int = 40
    head: int = 40
    layers: int = 3
    dropout: float = 0.2
    residual: bool = True
    single_norm: bool = False
    silu_in_gru: bool = True
    small_kernel: Tuple[int, ...] = (3, 1)
    large_kernel: Tuple[int, ...] = (5, 2)
    channels: Tuple[int, ...] = (4, 4, 1)
    hidden: int = 50
    baseline_kernel: int = 9
    attention_dim: int = 100

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidVariantError(f"Unknown variant '{self.variant}', valid variants: {', '.join(VARIANTS)}")
        sizes = ("window", "n_exogenous", "d_y", "d_w", "d", "d_graph", "head", "layers", "hidden", "attention_dim")
        for name in sizes:
            if getattr(self, name) < 1:
                raise ValueError(f"'{name}' must be positive, got {getattr(self, name)}")
        if self.d < 2:
            raise ValueError(f"'d' must be at least 2 to split across both convolution scales, got {self.d}")
        for name in ("small_kernel", "large_kernel"):
            if len(getattr(self, name)) != 2:
                raise ValueError(f"'{name}' must be [kernel, dilation], got {list(getattr(self, name))}")
        if not self.channels or min(self.channels) < 1:
            raise ValueError(f"'channels' must be positive widths, got {list(self.channels)}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"'dropout' must be in [0, 1), got {self.dropout}")

    @staticmethod
    def preset(kind: str) -> Dict[str, Any]:
        """Return the default dimensions of a dataset kind.

        :raises: ValueError
        """
        if kind not in DATASET_PRESETS:
            raise ValueError(f"Unknown dataset kind '{kind}', expected one of {', '.join(DATASET_PRESETS)}")
        return dict(DATASET_PRESETS[kind])

    @classmethod
    def for_dataset(cls, kind: str, variant: str = "HTGNN", **overrides) -> "ModelConfig":
        """Build the default configuration of a variant for a dataset kind."""
        values = cls.preset(kind)
        values.update(overrides)
        return cls(variant=variant, **values)

    def with_variant(self, variant: str) -> "ModelConfig":
        """Return a copy with another variant."""
        return replace(self, variant=variant)
