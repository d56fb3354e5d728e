"""Core types of the heterogeneous temporal sensor graph: node types, relations, nodes, graphs and degree tables."""

import enum
import json
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from htgnn.graph.errors import DuplicateNodeError, GraphError, HeterogeneityError

import numpy as np

logger = logging.getLogger(__name__)


class NodeType(str, enum.Enum):
    """The two primary node types: low-frequency (L) and high-frequency (H) sensors."""

    L = "L"
    H = "H"

    @property
    def rank(self) -> int:
        """Return the position of the type in the node order (L before H)."""
        return 0 if self is NodeType.L else 1


@dataclass(frozen=True)
class RelationType:
    """A typed edge relation between a source node type and a target node type.

    Same-type relations (L-L, H-H) are undirected and stored as symmetric directed pairs, cross-type relations
    (L-H, H-L) are directed.
    """

    source: NodeType
    target: NodeType

    @property
    def directed(self) -> bool:
        """Return True for relations between different node types."""
        return self.source is not self.target

    @property
    def name(self) -> str:
        """Return the canonical name of the relation, e.g. "L-H"."""
        return f"{self.source.value}-{self.target.value}"

    @classmethod
    def from_name(cls, name: str) -> "RelationType":
        """Parse a relation from its canonical name.

        :param name: a name such as "L-L" or "H-L"
        :returns: the relation
        :raises: GraphError
        """
        try:
            source, target = name.split("-")
            return cls(NodeType(source), NodeType(target))
        except ValueError as x:
            raise GraphError(f"Unknown relation '{name}'") from x

    def __str__(self) -> str:
        """Return the canonical name of the relation."""
        return self.name


L_L = RelationType(NodeType.L, NodeType.L)
H_H = RelationType(NodeType.H, NodeType.H)
L_H = RelationType(NodeType.L, NodeType.H)
H_L = RelationType(NodeType.H, NodeType.L)
RELATIONS = (L_L, H_H, L_H, H_L)


@dataclass(frozen=True)
class SensorNode:
    """A sensor node: its primary type, subtype label, index within the subtype and position tag.

    Position tags have the form ``<group>:<slot>`` (e.g. ``B1:3`` is slot 3 of bearing 1). A tag without a colon is
    a slot-less group name.
    """

    node_type: NodeType
    subtype: str
    index: int
    position: str = ""

    @property
    def sort_key(self) -> Tuple[int, str, int]:
        """Return the key defining the node order: type, then subtype, then index."""
        return self.node_type.rank, self.subtype, self.index

    @property
    def group(self) -> str:
        """Return the group part of the position tag."""
        return self.position.split(":", 1)[0]

    @property
    def slot(self) -> int:
        """Return the slot part of the position tag, 0 if the tag has none."""
        parts = self.position.split(":", 1)
        return int(parts[1]) if len(parts) == 2 and parts[1].lstrip("-").isdigit() else 0

    @property
    def name(self) -> str:
        """Return a column-friendly name, e.g. "T_OR.3"."""
        return f"{self.subtype}.{self.index}"


NodeLike = Union[SensorNode, Tuple[Union[NodeType, str], str, int, str]]
Edge = Tuple[int, int]


def as_node(node: NodeLike) -> SensorNode:
    """Coerce a tuple of (type, subtype, index, position) to a SensorNode.

    :param node: a SensorNode or a tuple with the same fields in order
    :returns: the node
    """
    if isinstance(node, SensorNode):
        return node
    node_type, subtype, index, *rest = node
    return SensorNode(NodeType(node_type), str(subtype), int(index), str(rest[0]) if rest else "")


class HeteroTemporalGraph:
    """An immutable heterogeneous sensor graph with a fixed node order and time-constant typed edges.

    Edges are stored per relation as (source, target) pairs of indices into the node order, sorted by target then
    source so that message reduction order is stable.
    """

    def __init__(self, nodes: Sequence[SensorNode], edges: Mapping[RelationType, Iterable[Edge]]):
        """Construct a graph from already validated parts, prefer :func:`htgnn.graph.build_graph`.

        :param nodes: the nodes, in node order
        :param edges: the edges per declared relation, as pairs of node order indices
        """
        self._nodes = tuple(nodes)
        self._edges = {
            relation: tuple(sorted(set((int(s), int(t)) for s, t in pairs), key=lambda e: (e[1], e[0])))
            for relation, pairs in sorted(edges.items(), key=lambda item: RELATIONS.index(item[0]))
        }

    @property
    def nodes(self) -> Tuple[SensorNode, ...]:
        """Return the nodes in node order."""
        return self._nodes

    @property
    def edges(self) -> Dict[RelationType, Tuple[Edge, ...]]:
        """Return a copy of the edge lists per declared relation."""
        return dict(self._edges)

    @property
    def relations(self) -> Tuple[RelationType, ...]:
        """Return the declared relations in canonical order."""
        return tuple(self._edges)

    @property
    def node_types(self) -> Tuple[NodeType, ...]:
        """Return the node types that have at least one node, in node order."""
        return tuple(t for t in NodeType if any(n.node_type is t for n in self._nodes))

    def __len__(self) -> int:
        """Return the number of nodes."""
        return len(self._nodes)

    def __eq__(self, other) -> bool:
        """Return True if both graphs serialise identically."""
        if not isinstance(other, HeteroTemporalGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __hash__(self) -> int:
        """Hash the nodes and edges."""
        return hash((self._nodes, tuple(self._edges.items())))

    def __repr__(self) -> str:
        """Return a short summary of the graph."""
        counts = ", ".join(f"{r}={len(e)}" for r, e in self._edges.items())
        return f"HeteroTemporalGraph(nodes={len(self._nodes)}, {counts})"

    def edges_of(self, relation: RelationType) -> Tuple[Edge, ...]:
        """Return the edges of a relation, empty if the relation is not declared."""
        return self._edges.get(relation, ())

    def partition(self, node_type: NodeType) -> Tuple[int, ...]:
        """Return the node order indices of every node of the given type."""
        return tuple(i for i, n in enumerate(self._nodes) if n.node_type is node_type)

    def count(self, node_type: NodeType) -> int:
        """Return the number of nodes of the given type."""
        return len(self.partition(node_type))

    def subtypes(self, node_type: NodeType) -> Tuple[str, ...]:
        """Return the sorted distinct subtypes declared for a node type."""
        return tuple(sorted({n.subtype for n in self._nodes if n.node_type is node_type}))

    def index_of(self, node_type: NodeType, subtype: str, index: int) -> Optional[int]:
        """Return the node order index of a node, None if it does not exist."""
        for i, node in enumerate(self._nodes):
            if node.node_type is node_type and node.subtype == subtype and node.index == index:
                return i
        return None

    def in_degree(self, relation: RelationType) -> np.ndarray:
        """Return the in-degree of every node (node order) under the given relation."""
        degree = np.zeros(len(self._nodes), dtype=np.int64)
        for _, target in self.edges_of(relation):
            degree[target] += 1
        return degree

    def to_json(self) -> str:
        """Serialise the graph to canonical JSON (sorted keys, stable ordering)."""
        document = {
            "nodes": [
                {"type": n.node_type.value, "subtype": n.subtype, "index": n.index, "position": n.position}
                for n in self._nodes
            ],
            "edges": {r.name: [list(e) for e in pairs] for r, pairs in self._edges.items()},
        }
        return json.dumps(document, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "HeteroTemporalGraph":
        """Deserialise a graph written by :meth:`to_json`.

        :param text: the JSON document
        :returns: the graph
        :raises: GraphError
        """
        try:
            document = json.loads(text)
            nodes = [as_node((n["type"], n["subtype"], n["index"], n.get("position", ""))) for n in document["nodes"]]
            edges = {RelationType.from_name(k): [tuple(e) for e in v] for k, v in document["edges"].items()}
        except (KeyError, TypeError, ValueError) as x:
            raise GraphError(f"Invalid graph document: {x}") from x
        return validate_graph(nodes, edges, heterogeneous=False)


@dataclass(frozen=True)
class DegreeTable:
    """Normalised degrees d̂ per relation: for every node, its in-degree under the relation plus one."""

    values: Dict[RelationType, Tuple[float, ...]]

    def get(self, relation: RelationType, node: int) -> float:
        """Return d̂ of a node under a relation (1 for relations without edges)."""
        if relation not in self.values:
            return 1.0
        return self.values[relation][node]

    def as_array(self, relation: RelationType) -> np.ndarray:
        """Return d̂ of every node (node order) under a relation."""
        return np.asarray(self.values[relation], dtype=np.float64)


def degree_table(graph: HeteroTemporalGraph) -> DegreeTable:
    """Compute the normalised degree table of a graph.

    The +1 self contribution keeps isolated nodes at d̂ = 1, no self-loop edge is added to the relation itself.

    :param graph: a valid graph
    :returns: d̂ per relation and node
    """
    return DegreeTable({r: tuple(float(d) + 1.0 for d in graph.in_degree(r)) for r in graph.relations})


def validate_graph(
    nodes: Sequence[NodeLike],
    edges: Mapping[RelationType, Iterable[Edge]],
    heterogeneous: bool = True,
) -> HeteroTemporalGraph:
    """Validate nodes and explicit edges and assemble a graph.

    :param nodes: the nodes, already in node order
    :param edges: the edges per relation as pairs of node order indices
    :param heterogeneous: require |A| + |R| > 2
    :returns: the graph
    :raises: DuplicateNodeError, GraphError, HeterogeneityError
    """
    nodes = [as_node(n) for n in nodes]
    if not nodes:
        raise GraphError("A graph needs at least one node")
    keys = [n.sort_key for n in nodes]
    if len(set(keys)) != len(keys):
        duplicates = sorted({f"{n.node_type.value}:{n.subtype}.{n.index}" for n in nodes if keys.count(n.sort_key) > 1})
        raise DuplicateNodeError(f"Duplicate node(s): {', '.join(duplicates)}")
    if keys != sorted(keys):
        raise GraphError("Nodes are not in node order")
    checked: Dict[RelationType, List[Edge]] = {}
    for relation, pairs in edges.items():
        checked[relation] = []
        for source, target in pairs:
            if not (0 <= source < len(nodes) and 0 <= target < len(nodes)):
                raise GraphError(f"Edge ({source}, {target}) of {relation} is out of range")
            if nodes[source].node_type is not relation.source or nodes[target].node_type is not relation.target:
                raise GraphError(f"Edge ({source}, {target}) does not connect {relation.source} to {relation.target}")
            if source == target:
                raise GraphError(f"Self-loop on node {source} in {relation}")
            checked[relation].append((source, target))
        if not relation.directed:
            present = set(checked[relation])
            missing = [(t, s) for s, t in present if (t, s) not in present]
            if missing:
                raise GraphError(f"Undirected relation {relation} is missing reversed edge(s) {missing[:3]}")
    graph = HeteroTemporalGraph(nodes, checked)
    heterogeneity = len(graph.node_types) + len(graph.relations)
    if heterogeneous and heterogeneity <= 2:
        raise HeterogeneityError(f"Graph is not heterogeneous: |A| + |R| = {heterogeneity}")
    return graph


def graph_to_json(graph: HeteroTemporalGraph) -> str:
    """Serialise a graph to canonical JSON, equal graphs give byte-identical documents."""
    return graph.to_json()


def graph_from_json(text: str) -> HeteroTemporalGraph:
    """Deserialise a graph written by :func:`graph_to_json`.

    :raises: GraphError
    """
    return HeteroTemporalGraph.from_json(text)
