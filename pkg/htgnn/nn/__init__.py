"""Encoders, heterogeneous message passing, the graph regressor with its ablation variants, and baselines."""

from htgnn.graph import HeteroTemporalGraph, NodeType
from htgnn.nn.baselines import BiLSTMRegressor, CNN1DRegressor, GCNN1DRegressor, MTGATRegressor
from htgnn.nn.config import ABLATION_VARIANTS, BASELINE_VARIANTS, GRAPH_VARIANTS, VARIANTS, ModelConfig
from htgnn.nn.encoders import (
    ExogenousEncoder,
    GatedConvLayer,
    GatedConvStack,
    HighFreqEncoder,
    LowFreqEncoder,
    encode_exogenous,
    encode_high_freq,
    encode_low_freq,
    reset_parameters,
)
from htgnn.nn.errors import InvalidVariantError
from htgnn.nn.interaction import HeteroLayer, inter_attention, intra_message
from htgnn.nn.models import GraphRegressor, count_parameters

from torch import nn

BASELINES = {
    "BiLSTM": BiLSTMRegressor,
    "CNN1D": CNN1DRegressor,
    "GCNN1D": GCNN1DRegressor,
    "MTGAT": MTGATRegressor,
}


def build_variant(config: ModelConfig, graph: HeteroTemporalGraph) -> nn.Module:
    """Create the model of a configured variant.

    Graph variants run on (a view of) the graph, baselines only use its node counts to size the stacked channels.

    :param config: the model configuration
    :param graph: the sensor graph the data was recorded on
    :returns: the model, in training mode
    :raises: InvalidVariantError
    """
    if config.variant in GRAPH_VARIANTS:
        return GraphRegressor(config, graph)
    if config.variant in BASELINES:
        channels = graph.count(NodeType.L) + graph.count(NodeType.H) + config.n_exogenous
        return BASELINES[config.variant](config, channels)
    raise InvalidVariantError(f"Unknown variant '{config.variant}', valid variants: {', '.join(VARIANTS)}")


__all__ = [
    "ABLATION_VARIANTS",
    "BASELINE_VARIANTS",
    "GRAPH_VARIANTS",
    "VARIANTS",
    "ExogenousEncoder",
    "GatedConvLayer",
    "GatedConvStack",
    "GraphRegressor",
    "HeteroLayer",
    "HighFreqEncoder",
    "LowFreqEncoder",
    "ModelConfig",
    "build_variant",
    "count_parameters",
    "encode_exogenous",
    "encode_high_freq",
    "encode_low_freq",
    "inter_attention",
    "intra_message",
    "reset_parameters",
    "errors",
]
