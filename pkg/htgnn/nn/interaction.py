"""Heterogeneous message passing over the typed relations of a sensor graph.

Same-type relations send degree-normalised messages ``W h_j / sqrt(d̂_i d̂_j)``, relations with attention send
``α_ji W h_j`` with GATv2 scores ``a · LeakyReLU(W_att [h_i || h_j])`` normalised by a softmax over the in-neighbors
of every target. Messages are mean-aggregated per relation, summed over relations and passed through SiLU.
"""

import logging
import math
from typing import Dict, Iterable, Optional, Tuple

from htgnn.graph import HeteroTemporalGraph, RelationType, degree_table
from htgnn.nn.encoders import reset_parameters
from htgnn.nn.errors import EmptyNeighborhoodError, MissingParamsError, ShapeMismatchError

import torch
from torch import nn
from torch.nn import functional as F

logger = logging.getLogger(__name__)

NEGATIVE_SLOPE = 0.2


def intra_message(h_j: torch.Tensor, d_i: float, d_j: float, weight: torch.Tensor) -> torch.Tensor:
    """Compute a degree-normalised same-type message.

    :param h_j: the source state, shape (d,) or (..., d)
    :param d_i: normalised degree of the target, >= 1
    :param d_j: normalised degree of the source, >= 1
    :param weight: the relation weight W, shape (d_out, d)
    :returns: W h_j / sqrt(d_i d_j)
    :raises: ShapeMismatchError, ValueError
    """
    if weight.dim() != 2 or weight.shape[1] != h_j.shape[-1]:
        raise ShapeMismatchError(f"Weight {tuple(weight.shape)} cannot transform a state of size {h_j.shape[-1]}")
    if d_i < 1 or d_j < 1:
        raise ValueError(f"Normalised degrees must be >= 1, got {d_i} and {d_j}")
    return F.linear(h_j, weight) / math.sqrt(d_i * d_j)


def attention_scores(h_i: torch.Tensor, h_j: torch.Tensor, vector: torch.Tensor, weight: torch.Tensor) -> torch.Tensor:
    """Return the unnormalised GATv2 scores a · LeakyReLU(W_att [h_i || h_j]) over the last dimension."""
    return F.leaky_relu(F.linear(torch.cat([h_i, h_j], dim=-1), weight), NEGATIVE_SLOPE) @ vector


def inter_attention(
    h_i: torch.Tensor, neighbors: torch.Tensor, vector: torch.Tensor, attention: torch.Tensor, weight: torch.Tensor
) -> Tuple[torch.Tensor, torch.Tensor]:
    """Attend from one target over its neighbors under a directed relation.

    :param h_i: the target state, shape (d,)
    :param neighbors: the source states, shape (k, d)
    :param vector: the attention vector a, shape (d_att,)
    :param attention: the attention weight W_att, shape (d_att, 2d)
    :param weight: the message weight W, shape (d_out, d)
    :returns: the attention weights α (k,) and the weighted messages (k, d_out)
    :raises: EmptyNeighborhoodError, ShapeMismatchError
    """
    if neighbors.dim() != 2 or neighbors.shape[0] == 0:
        raise EmptyNeighborhoodError("Attention needs at least one neighbor, skip the relation for this node")
    if attention.shape[1] != 2 * h_i.shape[-1] or vector.shape[0] != attention.shape[0]:
        raise ShapeMismatchError(f"Attention parameters {tuple(attention.shape)}, {tuple(vector.shape)} do not fit")
    scores = attention_scores(h_i.expand_as(neighbors), neighbors, vector, attention)
    alpha = torch.softmax(scores, dim=0)
    return alpha, alpha.unsqueeze(-1) * F.linear(neighbors, weight)


class HeteroLayer(nn.Module):
    """One layer of heterogeneous message passing on a fixed graph.

    Node states are dense tensors ``(batch, nodes, d)`` in the graph's node order. Edge indices, normalised degrees
    and in-degree counts are non-persistent buffers, so two layers built on different graphs with the same relations
    share a state dict.
    """

    def __init__(
        self,
        graph: HeteroTemporalGraph,
        d: int,
        attention_relations: Optional[Iterable[RelationType]] = None,
        residual: bool = True,
        single_norm: bool = False,
        d_att: Optional[int] = None,
    ):
        """Construct a layer.

        :param graph: the graph messages are passed on
        :param d: the node state size, kept across the layer
        :param attention_relations: relations using attention, the directed relations of the graph by default
        :param residual: add the input state to the output
        :param single_norm: drop the outer neighborhood mean for relations without attention
        :param d_att: the attention embedding size, d by default
        """
        super().__init__()
        self.logger = logging.getLogger(__name__)
        self.nodes = len(graph)
        self.d = d
        self.residual = residual
        self.single_norm = single_norm
        self.relations = graph.relations
        if attention_relations is None:
            attention_relations = [r for r in self.relations if r.directed]
        self.attention_relations = tuple(r for r in self.relations if r in set(attention_relations))
        d_att = d if d_att is None else d_att
        self.transforms = nn.ModuleDict({r.name: nn.Linear(d, d, bias=False) for r in self.relations})
        self.attention = nn.ModuleDict({r.name: nn.Linear(2 * d, d_att, bias=False) for r in self.attention_relations})
        self.attention_vectors = nn.ParameterDict(
            {r.name: nn.Parameter(torch.empty(d_att)) for r in self.attention_relations}
        )
        degrees = degree_table(graph)
        for relation in self.relations:
            edges = graph.edges_of(relation)
            source = torch.tensor([s for s, _ in edges], dtype=torch.long)
            target = torch.tensor([t for _, t in edges], dtype=torch.long)
            d_hat = torch.tensor(degrees.as_array(relation), dtype=torch.get_default_dtype())
            self.register_buffer(f"source_{relation.name}", source, persistent=False)
            self.register_buffer(f"target_{relation.name}", target, persistent=False)
            self.register_buffer(f"degree_{relation.name}", d_hat, persistent=False)
            self.register_buffer(f"count_{relation.name}", torch.tensor(graph.in_degree(relation)), persistent=False)
        self.reset_parameters()
        self.logger.debug(f"HeteroLayer on {graph!r}, attention on {[r.name for r in self.attention_relations]}")

    def reset_parameters(self):
        """Initialise weights uniformly in ±1/√fan_in, attention vectors included."""
        reset_parameters(self)
        for vector in self.attention_vectors.values():
            bound = 1.0 / math.sqrt(vector.numel())
            nn.init.uniform_(vector, -bound, bound)

    def _edges(self, relation: RelationType) -> Tuple[torch.Tensor, torch.Tensor]:
        return getattr(self, f"source_{relation.name}"), getattr(self, f"target_{relation.name}")

    def _check(self, h: torch.Tensor):
        if h.dim() != 3 or h.shape[1] != self.nodes or h.shape[2] != self.d:
            raise ShapeMismatchError(f"Expected node states (batch, {self.nodes}, {self.d}), got {tuple(h.shape)}")
        for relation in self.relations:
            missing = relation.name not in self.transforms or (
                relation in self.attention_relations and relation.name not in self.attention_vectors
            )
            if missing:
                raise MissingParamsError(f"No parameters for relation {relation}")

    def _alpha(self, relation: RelationType, h: torch.Tensor) -> torch.Tensor:
        source, target = self._edges(relation)
        name = relation.name
        scores = attention_scores(h[:, target], h[:, source], self.attention_vectors[name], self.attention[name].weight)
        index = target.expand(h.shape[0], -1)
        peak = scores.new_full((h.shape[0], self.nodes), -math.inf).scatter_reduce(1, index, scores, "amax")
        weights = torch.exp(scores - peak.gather(1, index))
        total = weights.new_zeros(h.shape[0], self.nodes).index_add(1, target, weights)
        return weights / total.gather(1, index)

    def attention_weights(self, h: torch.Tensor) -> Dict[RelationType, torch.Tensor]:
        """Return α per attention relation, shape (batch, edges) in the relation's edge order."""
        self._check(h)
        return {r: self._alpha(r, h) for r in self.attention_relations}

    def aggregate(self, h: torch.Tensor) -> torch.Tensor:
        """Return the pre-activation update: per-relation aggregated messages summed over relations."""
        self._check(h)
        update = torch.zeros_like(h)
        for relation in self.relations:
            source, target = self._edges(relation)
            if source.numel() == 0:
                continue
            messages = self.transforms[relation.name](h[:, source])
            if relation in self.attention_relations:
                messages = self._alpha(relation, h).unsqueeze(-1) * messages
            else:
                d_hat = getattr(self, f"degree_{relation.name}").to(h.dtype)
                coefficient = (d_hat[target] * d_hat[source]).rsqrt()
                messages = coefficient.view(1, -1, 1) * messages
            summed = torch.zeros_like(h).index_add(1, target, messages)
            if relation in self.attention_relations or not self.single_norm:
                count = getattr(self, f"count_{relation.name}").clamp(min=1).to(h.dtype)
                summed = summed / count.view(1, -1, 1)
            update = update + summed
        return update

    def forward(self, h: torch.Tensor) -> torch.Tensor:  # noqa: D102
        out = F.silu(self.aggregate(h))
        return out + h if self.residual else out
