"""Heterogeneous temporal sensor graphs: typed nodes and relations, the edge rule grammar and case study topologies."""

from htgnn.graph.base import (
    H_H,
    H_L,
    L_H,
    L_L,
    RELATIONS,
    DegreeTable,
    HeteroTemporalGraph,
    NodeType,
    RelationType,
    SensorNode,
    degree_table,
    graph_from_json,
    graph_to_json,
    validate_graph,
)
from htgnn.graph.builder import build_graph
from htgnn.graph.rules import EdgeRule, parse_rule
from htgnn.graph.topologies import bearing_topology, bridge_topology, topology_for
from htgnn.graph.views import GraphView, full_view, homogeneous_view, modality_view

__all__ = [
    "H_H",
    "H_L",
    "L_H",
    "L_L",
    "RELATIONS",
    "DegreeTable",
    "EdgeRule",
    "GraphView",
    "HeteroTemporalGraph",
    "NodeType",
    "RelationType",
    "SensorNode",
    "bearing_topology",
    "bridge_topology",
    "build_graph",
    "degree_table",
    "graph_from_json",
    "graph_to_json",
    "full_view",
    "homogeneous_view",
    "modality_view",
    "parse_rule",
    "topology_for",
    "validate_graph",
    "errors",
]
