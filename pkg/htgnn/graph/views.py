"""Views re-shaping a heterogeneous graph for the ablation variants, with the routing of sample rows onto nodes."""

from dataclasses import dataclass
from typing import Dict, Iterable, Tuple

from htgnn.graph.base import (
    L_L,
    RELATIONS,
    Edge,
    HeteroTemporalGraph,
    NodeType,
    RelationType,
    SensorNode,
    validate_graph,
)

EXOGENOUS_SUBTYPE = "W"

# A source is the block of a sample ("L", "H" or "W") and the row within that block.
Source = Tuple[str, int]


@dataclass(frozen=True)
class GraphView:
    """A graph together with, for every node in its node order, the sample row feeding that node."""

    graph: HeteroTemporalGraph
    sources: Tuple[Source, ...]

    def block_rows(self, block: str) -> Tuple[int, ...]:
        """Return the rows of a sample block used by the view."""
        return tuple(row for b, row in self.sources if b == block)


def _block_sources(graph: HeteroTemporalGraph) -> Dict[int, Source]:
    sources = {}
    for node_type in NodeType:
        for row, i in enumerate(graph.partition(node_type)):
            sources[i] = (node_type.value, row)
    return sources


def full_view(graph: HeteroTemporalGraph) -> GraphView:
    """Return the identity view: L rows feed L nodes and H rows feed H nodes in partition order."""
    sources = _block_sources(graph)
    return GraphView(graph, tuple(sources[i] for i in range(len(graph))))


def _reindexed(
    nodes: Dict[int, SensorNode], origin: Dict[int, Source], relation: RelationType, pairs: Iterable[Edge]
) -> GraphView:
    """Sort re-labelled nodes into node order and remap the edges of a single relation onto the new order."""
    order = sorted(nodes, key=lambda i: nodes[i].sort_key)
    remap = {old: new for new, old in enumerate(order)}
    edges = {relation: [(remap[s], remap[t]) for s, t in pairs]}
    view = validate_graph([nodes[i] for i in order], edges, heterogeneous=False)
    return GraphView(view, tuple(origin[i] for i in order))


def modality_view(graph: HeteroTemporalGraph, node_type: NodeType) -> GraphView:
    """Keep a single node type and its same-type relation, dropping every other node and relation.

    :param graph: the heterogeneous graph
    :param node_type: the node type to keep
    :returns: the view
    """
    relation = RelationType(node_type, node_type)
    keep = set(graph.partition(node_type))
    origin = _block_sources(graph)
    nodes = {i: graph.nodes[i] for i in keep}
    return _reindexed(nodes, origin, relation, graph.edges_of(relation))


def homogeneous_view(graph: HeteroTemporalGraph, n_exogenous: int = 1) -> GraphView:
    """Collapse every sensor and every exogenous variable into one node type joined by a single relation.

    All edges of all relations are merged and symmetrised, and each exogenous node is linked to every sensor node.

    :param graph: the heterogeneous graph
    :param n_exogenous: the number of exogenous variables, each becoming one node
    :returns: the view, whose nodes are all of type L and whose only relation is L-L
    :raises: DuplicateNodeError if two sensors of different types share subtype and index
    """
    origin = _block_sources(graph)
    nodes = {i: SensorNode(NodeType.L, n.subtype, n.index, n.position) for i, n in enumerate(graph.nodes)}
    for k in range(n_exogenous):
        key = len(graph) + k
        nodes[key] = SensorNode(NodeType.L, EXOGENOUS_SUBTYPE, k, "")
        origin[key] = ("W", k)
    pairs = set()
    for relation in RELATIONS:
        for s, t in graph.edges_of(relation):
            pairs.update({(s, t), (t, s)})
    for k in range(n_exogenous):
        for i in range(len(graph)):
            pairs.update({(len(graph) + k, i), (i, len(graph) + k)})
    return _reindexed(nodes, origin, L_L, sorted(pairs))
