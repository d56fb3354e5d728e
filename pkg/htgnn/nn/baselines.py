"""Graph-free baselines consuming the channel-stacked window ``[X_L; X_H; W]``."""

import math

from htgnn.nn.config import ModelConfig
from htgnn.nn.encoders import ExogenousEncoder, GatedConvStack, reset_parameters
from htgnn.nn.errors import ShapeMismatchError
from htgnn.nn.interaction import NEGATIVE_SLOPE
from htgnn.nn.readout import mlp_head

import torch
from torch import nn
from torch.nn import functional as F


class StackedBaseline(nn.Module):
    """Base class of the baselines: checks and stacks the three blocks into ``(batch, channels, L)``."""

    def __init__(self, config: ModelConfig, channels: int):
        super().__init__()
        self.config = config
        self.channels = channels

    def stack(self, x_l: torch.Tensor, x_h: torch.Tensor, w: torch.Tensor) -> torch.Tensor:
        """Return the channel-stacked window."""
        x = torch.cat([x_l, x_h, w], dim=1)
        if x.shape[1] != self.channels or x.shape[2] != self.config.window:
            raise ShapeMismatchError(
                f"Expected {self.channels} channels of {self.config.window} steps, got {tuple(x.shape[1:])}"
            )
        return x


class BiLSTMRegressor(StackedBaseline):
    """A bidirectional LSTM over time steps whose features are all channels."""

    def __init__(self, config: ModelConfig, channels: int):
        super().__init__(config, channels)
        self.lstm = nn.LSTM(channels, config.hidden, batch_first=True, bidirectional=True)
        self.head = mlp_head(2 * config.hidden, config.head, config.d_y, config.dropout)
        reset_parameters(self)

    def sequence(self, x_l: torch.Tensor, x_h: torch.Tensor, w: torch.Tensor) -> torch.Tensor:
        """Return the LSTM input, ``(batch, L, channels)``."""
        return self.stack(x_l, x_h, w).transpose(1, 2)

    def forward(self, x_l: torch.Tensor, x_h: torch.Tensor, w: torch.Tensor) -> torch.Tensor:  # noqa: D102
        _, (final, _) = self.lstm(self.sequence(x_l, x_h, w))
        return self.head(torch.cat([final[0], final[1]], dim=-1))


class CNN1DRegressor(StackedBaseline):
    """Four same-padded convolutions with batch normalisation and SiLU, averaged over time."""

    def __init__(self, config: ModelConfig, channels: int, depth: int = 4):
        super().__init__(config, channels)
        widths = [channels] + [config.hidden] * depth
        kernel = config.baseline_kernel
        self.body = nn.Sequential(
            *(
                module
                for a, b in zip(widths, widths[1:])
                for module in (nn.Conv1d(a, b, kernel, padding=kernel // 2), nn.BatchNorm1d(b), nn.SiLU())
            )
        )
        self.head = mlp_head(config.hidden, config.head, config.d_y, config.dropout)
        reset_parameters(self)

    def forward(self, x_l: torch.Tensor, x_h: torch.Tensor, w: torch.Tensor) -> torch.Tensor:  # noqa: D102
        return self.head(self.body(self.stack(x_l, x_h, w)).mean(dim=-1))


class GCNN1DRegressor(StackedBaseline):
    """Two parallel gated convolution stacks over all channels, gated by the exogenous embedding."""

    def __init__(self, config: ModelConfig, channels: int):
        super().__init__(config, channels)
        hidden = config.hidden
        widths = (hidden, hidden, 1)
        small, large = config.small_kernel, config.large_kernel
        self.exogenous = ExogenousEncoder(config.n_exogenous, config.d_w)
        self.small = GatedConvStack(
            small[0], small[1], config.d_w, config.window, hidden // 2, widths, in_channels=channels
        )
        self.large = GatedConvStack(
            large[0], large[1], config.d_w, config.window, hidden - hidden // 2, widths, in_channels=channels
        )
        self.head = mlp_head(hidden, config.head, config.d_y, config.dropout)

    def forward(self, x_l: torch.Tensor, x_h: torch.Tensor, w: torch.Tensor) -> torch.Tensor:  # noqa: D102
        x = self.stack(x_l, x_h, w)
        h_w = self.exogenous(w)
        return self.head(torch.cat([self.small(x, h_w), self.large(x, h_w)], dim=-1))


class DenseGATv2(nn.Module):
    """Single head GATv2 attention over a fully connected set of nodes, ``sigmoid(Σ_j α_ij x_j)``."""

    def __init__(self, features: int, d_att: int):
        super().__init__()
        self.features = features
        self.target = nn.Linear(features, d_att, bias=False)
        self.source = nn.Linear(features, d_att, bias=False)
        self.vector = nn.Parameter(torch.empty(d_att))
        reset_parameters(self)
        bound = 1.0 / math.sqrt(d_att)
        nn.init.uniform_(self.vector, -bound, bound)

    def weights(self, x: torch.Tensor) -> torch.Tensor:
        """Return α, shape (batch, nodes, nodes), rows summing to one."""
        # W [x_i || x_j] split into its target and source halves
        pairs = self.target(x).unsqueeze(2) + self.source(x).unsqueeze(1)
        return torch.softmax(F.leaky_relu(pairs, NEGATIVE_SLOPE) @ self.vector, dim=-1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:  # noqa: D102
        return torch.sigmoid(self.weights(x) @ x)


class MTGATRegressor(StackedBaseline):
    """MTGAT-style baseline: depthwise convolution, feature and temporal GATv2 attention, a GRU and a head."""

    def __init__(self, config: ModelConfig, channels: int, kernel: int = 7):
        super().__init__(config, channels)
        self.conv = nn.Conv1d(channels, channels, kernel, padding=kernel // 2, groups=channels)
        self.feature_attention = DenseGATv2(config.window, config.attention_dim)
        self.temporal_attention = DenseGATv2(channels, config.attention_dim)
        self.gru = nn.GRU(3 * channels, config.hidden, batch_first=True)
        self.head = mlp_head(config.hidden, config.head, config.d_y, config.dropout)
        reset_parameters(self.conv)
        reset_parameters(self.gru)

    def forward(self, x_l: torch.Tensor, x_h: torch.Tensor, w: torch.Tensor) -> torch.Tensor:  # noqa: D102
        x = F.silu(self.conv(self.stack(x_l, x_h, w)))
        by_feature = self.feature_attention(x).transpose(1, 2)
        by_time = self.temporal_attention(x.transpose(1, 2))
        _, final = self.gru(torch.cat([x.transpose(1, 2), by_feature, by_time], dim=-1))
        return self.head(final[-1])
