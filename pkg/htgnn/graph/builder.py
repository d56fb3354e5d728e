"""Builds validated heterogeneous graphs from node declarations and edge rules."""

import logging
from typing import Dict, Iterable, List, Union

from htgnn.graph.base import Edge, HeteroTemporalGraph, NodeLike, RelationType, as_node, validate_graph
from htgnn.graph.errors import GraphError
from htgnn.graph.rules import EdgeRule, parse_rule

logger = logging.getLogger(__name__)


def build_graph(
    nodes: Iterable[NodeLike], edge_rules: Iterable[Union[str, EdgeRule]], heterogeneous: bool = True
) -> HeteroTemporalGraph:
    """Construct a heterogeneous temporal graph.

    Nodes are put into node order (type L before H, then subtype, then index) before rules are expanded, so the
    result does not depend on the declaration order of the nodes. Every relation named by a rule is declared on the
    graph, even if the rule expands to no edge.

    Example::

        graph = build_graph(
            [("L", "T", 0, "S:0"), ("L", "T", 1, "S:1"), ("H", "V", 0, "S:0"), ("H", "V", 1, "S:1")],
            ["L-L: chain T", "H-H: chain V", "L-H: bipartite T -> V", "H-L: bipartite V -> T"],
        )

    :param nodes: node declarations, SensorNode instances or (type, subtype, index, position) tuples
    :param edge_rules: rule strings (see :mod:`htgnn.graph.rules`) or parsed rules
    :param heterogeneous: require the heterogeneity condition |A| + |R| > 2
    :returns: the validated graph
    :raises: UnknownSubtypeError, DanglingEdgeError, EmptyTypePartitionError, RuleSyntaxError, HeterogeneityError,
        DuplicateNodeError
    """
    ordered = sorted((as_node(n) for n in nodes), key=lambda n: n.sort_key)
    if not ordered:
        raise GraphError("A graph needs at least one node")
    edges: Dict[RelationType, List[Edge]] = {}
    for rule in edge_rules:
        rule = parse_rule(rule)
        edges.setdefault(rule.relation, []).extend(rule.expand(ordered))
    graph = validate_graph(ordered, edges, heterogeneous=heterogeneous)
    logger.debug(f"Built {graph!r}")
    return graph
