"""Defines common errors raised while building heterogeneous sensor graphs."""


class GraphError(Exception):
    """Base exception for errors related to graph construction."""

    pass


class RuleSyntaxError(GraphError):
    """Raised when parsing an edge rule fails."""

    pass


class UnknownSubtypeError(GraphError):
    """Raised when an edge rule references a subtype not declared for the relation's node type."""

    pass


class DanglingEdgeError(GraphError):
    """Raised when an explicit edge references a node that does not exist."""

    pass


class EmptyTypePartitionError(GraphError):
    """Raised when a rule declares a relation whose source or target node type has no nodes."""

    pass


class DuplicateNodeError(GraphError):
    """Raised when two nodes share the same type, subtype and index."""

    pass


class HeterogeneityError(GraphError):
    """Raised when a graph required to be heterogeneous has |A| + |R| <= 2."""

    pass
