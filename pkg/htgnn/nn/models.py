"""The heterogeneous temporal graph regressor and its ablation variants.

Every model takes the three blocks of a batch of windows, ``x_l (batch, N_L, L)``, ``x_h (batch, N_H, L)`` and
``w (batch, N_w, L)``, and returns ``(batch, d_y)``.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from htgnn.graph import GraphView, HeteroTemporalGraph, NodeType, full_view, homogeneous_view, modality_view
from htgnn.nn.config import ModelConfig
from htgnn.nn.encoders import ExogenousEncoder, HighFreqEncoder, LowFreqEncoder
from htgnn.nn.errors import InvalidVariantError, ShapeMismatchError
from htgnn.nn.interaction import HeteroLayer
from htgnn.nn.readout import Readout

import torch
from torch import nn

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VariantLayout:
    """How a graph variant reshapes the graph and which encoder each node type of the reshaped graph uses."""

    view: str
    low: str
    high: str
    attention: str
    conditioned: bool = True


VARIANT_LAYOUTS = {
    "HTGNN": VariantLayout("full", "gru", "cnn", "directed"),
    "HTGNN_wo_EXO": VariantLayout("full", "gru", "cnn", "directed", conditioned=False),
    "GRU_GAT_homog": VariantLayout("homogeneous", "gru", "gru", "all"),
    "GRU_GCN_homog": VariantLayout("homogeneous", "gru", "gru", "none"),
    "CNN_GCN_homog": VariantLayout("homogeneous", "cnn", "cnn", "none"),
    "CNN_GCN_vib": VariantLayout("vibration", "cnn", "cnn", "none"),
    "GRU_GCN_vib": VariantLayout("vibration", "gru", "gru", "none"),
}


def make_view(kind: str, graph: HeteroTemporalGraph, n_exogenous: int) -> GraphView:
    """Return the view of the graph a variant runs on."""
    if kind == "homogeneous":
        return homogeneous_view(graph, n_exogenous)
    if kind == "vibration":
        return modality_view(graph, NodeType.H)
    return full_view(graph)


class SignalRouter(nn.Module):
    """Gathers the sample rows feeding every node of a view into one ``(batch, nodes, L)`` tensor."""

    def __init__(self, view: GraphView, n_low: int, n_high: int, n_exogenous: int):
        super().__init__()
        self.sizes = {"L": n_low, "H": n_high, "W": n_exogenous}
        offsets = {"L": 0, "H": n_low, "W": n_low + n_high}
        for block, row in view.sources:
            if row >= self.sizes[block]:
                raise ShapeMismatchError(f"View reads row {row} of block {block} holding {self.sizes[block]} rows")
        index = torch.tensor([offsets[block] + row for block, row in view.sources], dtype=torch.long)
        self.register_buffer("index", index, persistent=False)

    def forward(self, x_l: torch.Tensor, x_h: torch.Tensor, w: torch.Tensor) -> torch.Tensor:  # noqa: D102
        for block, x in (("L", x_l), ("H", x_h), ("W", w)):
            if x.dim() != 3 or x.shape[1] != self.sizes[block]:
                raise ShapeMismatchError(f"Block {block} must have {self.sizes[block]} rows, got {tuple(x.shape)}")
        if not x_l.shape[-1] == x_h.shape[-1] == w.shape[-1]:
            raise ShapeMismatchError(f"Blocks differ in window length: {x_l.shape[-1]}, {x_h.shape[-1]}, {w.shape[-1]}")
        return torch.cat([x_l, x_h, w], dim=1)[:, self.index]


class GraphRegressor(nn.Module):
    """Encoders, a stack of heterogeneous message passing layers and a bidirectional LSTM readout.

    The exogenous embedding ``h_w`` conditions the encoders, or, for ``HTGNN_wo_EXO``, is concatenated to the
    readout features in front of the perceptron head instead.
    """

    def __init__(self, config: ModelConfig, graph: HeteroTemporalGraph):
        """Construct a graph variant.

        :param config: the model configuration, its variant must be one of the graph variants
        :param graph: the heterogeneous sensor graph the data was recorded on
        :raises: InvalidVariantError, ShapeMismatchError, WindowTooShortError
        """
        super().__init__()
        if config.variant not in VARIANT_LAYOUTS:
            raise InvalidVariantError(f"'{config.variant}' is not a graph variant")
        self.logger = logging.getLogger(__name__)
        self.config = config
        self.layout = VARIANT_LAYOUTS[config.variant]
        self.view = make_view(self.layout.view, graph, config.n_exogenous)
        self.router = SignalRouter(self.view, graph.count(NodeType.L), graph.count(NodeType.H), config.n_exogenous)
        self.exogenous = ExogenousEncoder(config.n_exogenous, config.d_w)
        self.partitions: Tuple[Tuple[str, int, int], ...] = tuple(
            (t.value, self.view.graph.partition(t)[0], self.view.graph.partition(t)[-1] + 1)
            for t in self.view.graph.node_types
        )
        kinds = {t: self.layout.low if t == NodeType.L.value else self.layout.high for t, _, _ in self.partitions}
        self.encoders = nn.ModuleDict({t: self._encoder(kind) for t, kind in kinds.items()})
        attention = {"directed": None, "all": self.view.graph.relations, "none": ()}[self.layout.attention]
        self.layers = nn.ModuleList(
            HeteroLayer(self.view.graph, config.d, attention, config.residual, config.single_norm)
            for _ in range(config.layers)
        )
        extra = 0 if self.layout.conditioned else config.d_w
        self.readout = Readout(config.d, config.d_graph, config.head, config.d_y, config.dropout, extra=extra)
        self.logger.debug(f"Built {config.variant} on {self.view.graph!r}")

    def _encoder(self, kind: str) -> nn.Module:
        config = self.config
        if kind == "gru":
            return LowFreqEncoder(config.d_w, config.d, config.silu_in_gru, conditioned=self.layout.conditioned)
        return HighFreqEncoder(
            config.d_w,
            config.d,
            config.window,
            small=tuple(config.small_kernel),
            large=tuple(config.large_kernel),
            channels=config.channels,
            conditioned=self.layout.conditioned,
        )

    @property
    def graph(self) -> HeteroTemporalGraph:
        """Return the graph the layers pass messages on."""
        return self.view.graph

    def encode(self, x_l: torch.Tensor, x_h: torch.Tensor, w: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        """Return the encoder states ``(batch, nodes, d)`` in node order and the exogenous embedding."""
        signals = self.router(x_l, x_h, w)
        h_w = self.exogenous(w)
        states = [self.encoders[t](signals[:, start:stop], h_w) for t, start, stop in self.partitions]
        return torch.cat(states, dim=1), h_w

    def node_states(
        self, x_l: torch.Tensor, x_h: torch.Tensor, w: torch.Tensor, h: Optional[torch.Tensor] = None
    ) -> torch.Tensor:
        """Return the node states after message passing, before the readout."""
        if h is None:
            h, _ = self.encode(x_l, x_h, w)
        for layer in self.layers:
            h = layer(h)
        return h

    def forward(self, x_l: torch.Tensor, x_h: torch.Tensor, w: torch.Tensor) -> torch.Tensor:  # noqa: D102
        h, h_w = self.encode(x_l, x_h, w)
        h = self.node_states(x_l, x_h, w, h)
        return self.readout(h, None if self.layout.conditioned else h_w)


def count_parameters(model: nn.Module) -> int:
    """Return the number of trainable scalars of a model."""
    return sum(p.numel() for p in model.parameters() if p.requires_grad)
