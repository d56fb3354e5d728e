"""Context-aware encoders turning per-node windows into fixed-size node states.

Shapes are batch first throughout: windows are ``(batch, nodes, time)``, exogenous windows ``(batch, N_w, time)``
and node states ``(batch, nodes, features)``.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

from htgnn.config.errors import ConfigurationError
from htgnn.nn.errors import NonFiniteInputError, ShapeMismatchError, WindowTooShortError

import torch
from torch import nn
from torch.nn import functional as F

logger = logging.getLogger(__name__)


def reset_parameters(module: nn.Module) -> nn.Module:
    """Initialise every weight uniformly in ±1/√fan_in and every bias to zero.

    Covers linear, convolutional and recurrent layers found anywhere below ``module``.

    :param module: the module to initialise in place
    :returns: the module
    """
    for child in module.modules():
        if isinstance(child, (nn.Linear, nn.Conv1d)):
            bound = 1.0 / math.sqrt(child.weight[0].numel())
            nn.init.uniform_(child.weight, -bound, bound)
            if child.bias is not None:
                nn.init.zeros_(child.bias)
        elif isinstance(child, (nn.GRU, nn.GRUCell, nn.LSTM, nn.LSTMCell)):
            for name, parameter in child.named_parameters():
                if name.startswith("weight"):
                    bound = 1.0 / math.sqrt(parameter.shape[1])
                    nn.init.uniform_(parameter, -bound, bound)
                else:
                    nn.init.zeros_(parameter)
    return module


def check_finite(name: str, tensor: torch.Tensor):
    """Raise if a tensor holds NaN or infinite values.

    :raises: NonFiniteInputError
    """
    if not torch.isfinite(tensor).all():
        raise NonFiniteInputError(f"Input '{name}' contains non-finite values")


class ExogenousEncoder(nn.Module):
    """Embeds the exogenous window: per-variable time mean followed by a two-layer perceptron with SiLU."""

    def __init__(self, n_exogenous: int, d_w: int):
        super().__init__()
        self.n_exogenous = n_exogenous
        self.d_w = d_w
        self.mlp = nn.Sequential(nn.Linear(n_exogenous, d_w), nn.SiLU(), nn.Linear(d_w, d_w))
        reset_parameters(self)

    def forward(self, w: torch.Tensor) -> torch.Tensor:  # noqa: D102
        if w.dim() != 3 or w.shape[1] != self.n_exogenous:
            raise ShapeMismatchError(f"Exogenous window must be (batch, {self.n_exogenous}, L), got {tuple(w.shape)}")
        if w.shape[-1] < 1:
            raise WindowTooShortError("Exogenous window is empty")
        check_finite("W", w)
        return self.mlp(w.mean(dim=-1))


class LowFreqEncoder(nn.Module):
    """A GRU cell run over every low-frequency node window, its hidden state initialised from the exogenous embedding.

    With ``conditioned=False`` the hidden state starts from zeros and ``h_w`` is ignored.
    """

    def __init__(self, d_w: int, d: int, silu_in_gru: bool = True, conditioned: bool = True):
        super().__init__()
        self.d = d
        self.d_w = d_w
        self.silu_in_gru = silu_in_gru
        self.conditioned = conditioned
        self.cell = nn.GRUCell(1, d)
        self.init = nn.Linear(d_w, d) if conditioned and d_w != d else nn.Identity()
        reset_parameters(self)

    def initial_state(self, h_w: Optional[torch.Tensor], batch: int, nodes: int, like: torch.Tensor) -> torch.Tensor:
        """Return the GRU state at the first step, one row per (sample, node)."""
        if not self.conditioned or h_w is None:
            return like.new_zeros(batch * nodes, self.d)
        h0 = self.init(h_w)
        if h0.shape != (batch, self.d):
            raise ShapeMismatchError(f"Exogenous embedding must be ({batch}, {self.d_w}), got {tuple(h_w.shape)}")
        return h0.unsqueeze(1).expand(batch, nodes, self.d).reshape(batch * nodes, self.d)

    def forward(self, x: torch.Tensor, h_w: Optional[torch.Tensor] = None) -> torch.Tensor:  # noqa: D102
        if x.dim() != 3:
            raise ShapeMismatchError(f"Low-frequency window must be (batch, nodes, L), got {tuple(x.shape)}")
        batch, nodes, length = x.shape
        if length < 1:
            raise WindowTooShortError("Low-frequency window is empty")
        check_finite("X_L", x)
        h = self.initial_state(h_w, batch, nodes, x)
        steps = x.reshape(batch * nodes, length, 1)
        for t in range(length):
            h = self.cell(steps[:, t], h)
            if self.silu_in_gru:
                h = F.silu(h)
        return h.reshape(batch, nodes, self.d)


class GatedConvLayer(nn.Module):
    """A same-padded dilated 1D convolution whose output channels are scaled by a sigmoid gate of ``h_w``.

    ``o = Conv1d(x) * sigmoid(W_g h_w + b_g)``, the gate broadcast over time. Without a gate (``gated=False``) the
    layer is a plain convolution.
    """

    def __init__(self, in_channels: int, out_channels: int, kernel: int, dilation: int, d_w: int, gated: bool = True):
        super().__init__()
        if kernel < 1 or kernel % 2 == 0:
            raise ConfigurationError(f"Convolution kernel width must be odd, got {kernel}")
        if dilation < 1:
            raise ConfigurationError(f"Convolution dilation must be >= 1, got {dilation}")
        self.in_channels = in_channels
        self.kernel = kernel
        self.dilation = dilation
        padding = dilation * (kernel - 1) // 2
        self.conv = nn.Conv1d(in_channels, out_channels, kernel, dilation=dilation, padding=padding)
        self.gate = nn.Linear(d_w, out_channels) if gated else None
        reset_parameters(self)

    @property
    def receptive_field(self) -> int:
        """Return the number of input steps seen by one output step."""
        return self.dilation * (self.kernel - 1) + 1

    def gate_values(self, h_w: Optional[torch.Tensor]) -> Optional[torch.Tensor]:
        """Return g = sigmoid(W_g h_w + b_g) with shape (batch, out_channels), None for an ungated layer."""
        if self.gate is None or h_w is None:
            return None
        return torch.sigmoid(self.gate(h_w))

    def forward(self, x: torch.Tensor, h_w: Optional[torch.Tensor] = None) -> torch.Tensor:  # noqa: D102
        if x.dim() != 3 or x.shape[1] != self.in_channels:
            raise ShapeMismatchError(f"Expected (batch, {self.in_channels}, T) input, got {tuple(x.shape)}")
        z = self.conv(x)
        g = self.gate_values(h_w)
        if g is None:
            return z
        if g.shape[0] != z.shape[0]:
            raise ShapeMismatchError(f"Gate batch {g.shape[0]} does not match input batch {z.shape[0]}")
        return z * g.unsqueeze(-1)


class GatedConvStack(nn.Module):
    """A cascade of gated convolutions, each followed by SiLU, reduced over time by a learned linear map."""

    def __init__(
        self,
        kernel: int,
        dilation: int,
        d_w: int,
        length: int,
        out_features: int,
        channels: Sequence[int] = (4, 4, 1),
        gated: bool = True,
        in_channels: int = 1,
    ):
        super().__init__()
        widths = (in_channels,) + tuple(channels)
        self.layers = nn.ModuleList(
            GatedConvLayer(a, b, kernel, dilation, d_w, gated=gated) for a, b in zip(widths, widths[1:])
        )
        self.length = length
        self.reduce = nn.Linear(length * widths[-1], out_features)
        reset_parameters(self.reduce)
        if length < self.receptive_field:
            field = self.receptive_field
            raise WindowTooShortError(f"Window length {length} is shorter than the receptive field {field}")

    @property
    def receptive_field(self) -> int:
        """Return the receptive field of a single layer of the stack."""
        return self.layers[0].receptive_field

    def forward(self, x: torch.Tensor, h_w: Optional[torch.Tensor] = None) -> torch.Tensor:  # noqa: D102
        if x.shape[-1] != self.length:
            if x.shape[-1] < self.receptive_field:
                raise WindowTooShortError(f"Window length {x.shape[-1]} is shorter than {self.receptive_field}")
            raise ShapeMismatchError(f"Stack was built for windows of {self.length} steps, got {x.shape[-1]}")
        for layer in self.layers:
            x = F.silu(layer(x, h_w))
        return self.reduce(x.flatten(1))


class HighFreqEncoder(nn.Module):
    """Two parallel gated convolution stacks, a small and a large scale, whose outputs are concatenated per node."""

    def __init__(
        self,
        d_w: int,
        d: int,
        length: int,
        small: Tuple[int, int] = (3, 1),
        large: Tuple[int, int] = (5, 2),
        channels: Sequence[int] = (4, 4, 1),
        conditioned: bool = True,
    ):
        super().__init__()
        self.d = d
        self.conditioned = conditioned
        self.small = GatedConvStack(small[0], small[1], d_w, length, d // 2, channels, gated=conditioned)
        self.large = GatedConvStack(large[0], large[1], d_w, length, d - d // 2, channels, gated=conditioned)

    def forward(self, x: torch.Tensor, h_w: Optional[torch.Tensor] = None) -> torch.Tensor:  # noqa: D102
        if x.dim() != 3:
            raise ShapeMismatchError(f"High-frequency window must be (batch, nodes, L), got {tuple(x.shape)}")
        batch, nodes, length = x.shape
        check_finite("X_H", x)
        rows = x.reshape(batch * nodes, 1, length)
        context = h_w.repeat_interleave(nodes, dim=0) if self.conditioned and h_w is not None else None
        h = torch.cat([self.small(rows, context), self.large(rows, context)], dim=-1)
        return h.reshape(batch, nodes, self.d)


def encode_exogenous(w_window: torch.Tensor, encoder: ExogenousEncoder) -> torch.Tensor:
    """Embed a single (N_w, L) exogenous window into h_w of length d_w."""
    return encoder(w_window.unsqueeze(0)).squeeze(0)


def encode_low_freq(x_window: torch.Tensor, h_w: torch.Tensor, encoder: LowFreqEncoder) -> torch.Tensor:
    """Encode a single length-L low-frequency window into a state of length d."""
    return encoder(x_window.reshape(1, 1, -1), h_w.unsqueeze(0)).reshape(-1)


def encode_high_freq(x_window: torch.Tensor, h_w: torch.Tensor, encoder: HighFreqEncoder) -> torch.Tensor:
    """Encode a single length-L high-frequency window into a state of length d_small + d_large."""
    return encoder(x_window.reshape(1, 1, -1), h_w.unsqueeze(0)).reshape(-1)
