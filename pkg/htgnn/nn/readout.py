"""Readout stages mapping node states (or baseline features) to the target prediction."""

from typing import Optional

from htgnn.nn.encoders import reset_parameters

import torch
from torch import nn


def mlp_head(in_features: int, hidden: int, out_features: int, dropout: float) -> nn.Sequential:
    """Build the three layer perceptron head with SiLU activations and dropout between layers."""
    return reset_parameters(
        nn.Sequential(
            nn.Linear(in_features, hidden),
            nn.SiLU(),
            nn.Dropout(dropout),
            nn.Linear(hidden, hidden),
            nn.SiLU(),
            nn.Dropout(dropout),
            nn.Linear(hidden, out_features),
        )
    )


class Readout(nn.Module):
    """Projects every node state to ``d_graph``, runs a bidirectional LSTM over the node sequence and regresses.

    The node sequence follows the graph's node order, which is therefore part of the model contract. The final
    hidden states of both directions are concatenated, optionally with extra context, and fed to the head.
    """

    def __init__(self, d: int, d_graph: int, hidden: int, d_y: int, dropout: float, extra: int = 0):
        super().__init__()
        self.extra = extra
        self.project = nn.Linear(d, d_graph)
        self.lstm = nn.LSTM(d_graph, d_graph, batch_first=True, bidirectional=True)
        self.head = mlp_head(2 * d_graph + extra, hidden, d_y, dropout)
        reset_parameters(self)

    def forward(self, h: torch.Tensor, context: Optional[torch.Tensor] = None) -> torch.Tensor:  # noqa: D102
        _, (final, _) = self.lstm(self.project(h))
        z = torch.cat([final[0], final[1]], dim=-1)
        if self.extra:
            z = torch.cat([z, context], dim=-1)
        return self.head(z)
