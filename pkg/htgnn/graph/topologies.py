"""Sensor network topologies of the two case studies: a pair of instrumented bearings and a bridge span."""

from typing import Iterable, List, Optional, Sequence, Union

from htgnn.graph.base import HeteroTemporalGraph, NodeType, SensorNode
from htgnn.graph.builder import build_graph
from htgnn.graph.rules import EdgeRule

# Slots are positions on the outer ring of a bearing, 8 equally spaced, slot 0 is the bottom of the radial load zone.
OR_SLOTS = tuple(range(8))
IR_SLOTS = (0, 4)
RADIAL_VIBRATION_SLOTS = (0, 2, 6)
AXIAL_VIBRATION_SLOTS = (1, 4, 7)

BEARING_RULES = (
    "L-L: ring T_OR within group",
    "L-L: complete T_IR",
    "H-H: ring * within group",
    "H-H: mirror * across group",
    "L-H: colocated T_OR -> *",
    "H-L: colocated * -> T_OR",
)

BRIDGE_RULES = (
    "L-L: chain D",
    "H-H: chain A",
    "L-H: colocated D -> A",
    "H-L: colocated A -> D",
)


def bearing_nodes(bearings: int = 2) -> List[SensorNode]:
    """Declare the sensors of the bearing test rig.

    Per bearing: eight outer ring (T_OR) and two inner ring (T_IR) temperature sensors, three radial (V_RA) and three
    axial (V_AX) vibration sensors. Groups are named B1, B2, ... and indices run across bearings.

    :param bearings: the number of instrumented bearings
    :returns: the node declarations
    """
    nodes = []
    layout = (
        (NodeType.L, "T_OR", OR_SLOTS),
        (NodeType.L, "T_IR", IR_SLOTS),
        (NodeType.H, "V_RA", RADIAL_VIBRATION_SLOTS),
        (NodeType.H, "V_AX", AXIAL_VIBRATION_SLOTS),
    )
    for bearing in range(bearings):
        for node_type, subtype, slots in layout:
            for k, slot in enumerate(slots):
                nodes.append(SensorNode(node_type, subtype, bearing * len(slots) + k, f"B{bearing + 1}:{slot}"))
    return nodes


def bearing_topology(
    rules: Optional[Iterable[Union[str, EdgeRule]]] = None, bearings: int = 2
) -> HeteroTemporalGraph:
    """Build the heterogeneous graph of the bearing sensor network.

    Default wiring: outer ring temperatures form a ring per bearing, all inner ring temperatures are mutually
    connected, vibration sensors form a ring per bearing and are linked to the same-position sensor of the other
    bearing, and directed T-V / V-T edges join sensors sharing a position.

    :param rules: edge rules replacing :data:`BEARING_RULES`
    :param bearings: the number of instrumented bearings
    :returns: the graph (20 L and 12 H nodes with the defaults)
    """
    return build_graph(bearing_nodes(bearings), BEARING_RULES if rules is None else rules)


def bridge_nodes(sensors: int = 4) -> List[SensorNode]:
    """Declare displacement (D, low-frequency) and acceleration (A, high-frequency) sensors, co-located along the span.

    :param sensors: the number of measurement locations
    :returns: the node declarations
    """
    return [SensorNode(t, s, k, f"S:{k}") for t, s in ((NodeType.L, "D"), (NodeType.H, "A")) for k in range(sensors)]


def bridge_topology(
    rules: Optional[Iterable[Union[str, EdgeRule]]] = None, sensors: int = 4
) -> HeteroTemporalGraph:
    """Build the heterogeneous graph of the bridge sensor network.

    :param rules: edge rules replacing :data:`BRIDGE_RULES`
    :param sensors: the number of measurement locations, each with one D and one A sensor
    :returns: the graph
    """
    return build_graph(bridge_nodes(sensors), BRIDGE_RULES if rules is None else rules)


def topology_for(kind: str, rules: Optional[Sequence[str]] = None) -> HeteroTemporalGraph:
    """Return the default topology of a dataset kind.

    :param kind: "bearing-like" or "bridge-like"
    :param rules: optional rules replacing the defaults
    :returns: the graph
    :raises: ValueError
    """
    if kind == "bearing-like":
        return bearing_topology(rules)
    if kind == "bridge-like":
        return bridge_topology(rules)
    raise ValueError(f"Unknown dataset kind '{kind}'")
