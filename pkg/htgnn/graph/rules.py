"""Implements a small rule grammar describing how sensor nodes are wired into typed relations.

A rule reads ``<relation>: <pattern> <selector> [-> <selector>] [within group | across group]``, for example::

    L-L: ring T_OR within group
    L-L: complete T_IR
    H-H: mirror * across group
    L-H: colocated T_OR -> V_RA
    H-L: link V_AX:0 -> "T IR":1

Selectors are subtype labels (bare words or double quoted), ``*`` for every subtype of the node type, or for
``link`` an explicit ``subtype:index`` endpoint.
"""

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from htgnn.graph.base import NodeType, RelationType, SensorNode
from htgnn.graph.errors import DanglingEdgeError, EmptyTypePartitionError, RuleSyntaxError, UnknownSubtypeError

# fmt: off
from pyparsing import (  # noqa: I101
    alphanums, nums,
    Combine, Group, Keyword, Literal, Optional as Maybe, ParseBaseException, QuotedString, Suppress, Word, one_of
)
# fmt: on

SINGLE_SELECTOR_PATTERNS = ("ring", "chain", "complete")
PAIRED_PATTERNS = ("bipartite", "colocated", "mirror", "link")
WILDCARD = "*"

Selector = Union[str, Tuple[str, int]]


@dataclass(frozen=True)
class EdgeRule:
    """A parsed edge rule."""

    relation: RelationType
    pattern: str
    source: Selector
    target: Selector
    scope: Optional[str] = None

    def __str__(self) -> str:
        """Return the rule in its textual form."""

        def fmt(selector: Selector) -> str:
            label, index = (selector, None) if isinstance(selector, str) else selector
            label = label if label == WILDCARD or label.replace("_", "").isalnum() else f'"{label}"'
            return label if index is None else f"{label}:{index}"

        text = f"{self.relation}: {self.pattern} {fmt(self.source)}"
        if self.pattern in PAIRED_PATTERNS or self.source != self.target:
            text += f" -> {fmt(self.target)}"
        return text + (f" {self.scope} group" if self.scope else "")

    def _select(self, nodes: Sequence[SensorNode], node_type: NodeType, selector: str) -> List[int]:
        declared = {n.subtype for n in nodes if n.node_type is node_type}
        if selector != WILDCARD and selector not in declared:
            known = ", ".join(sorted(declared)) or "none"
            raise UnknownSubtypeError(f"Subtype '{selector}' is not declared for {node_type.value} nodes ({known})")
        selected = [i for i, n in enumerate(nodes) if n.node_type is node_type]
        return [i for i in selected if selector == WILDCARD or nodes[i].subtype == selector]

    def _groups(self, nodes: Sequence[SensorNode], indices: List[int]) -> List[List[int]]:
        def ordered(members: List[int]) -> List[int]:
            return sorted(members, key=lambda i: (nodes[i].slot, nodes[i].index, nodes[i].subtype))

        if self.scope != "within":
            return [ordered(indices)]
        buckets: Dict[str, List[int]] = {}
        for i in indices:
            buckets.setdefault(nodes[i].group, []).append(i)
        return [ordered(members) for _, members in sorted(buckets.items())]

    def _scoped(self, nodes: Sequence[SensorNode], i: int, j: int) -> bool:
        if self.scope == "within":
            return nodes[i].group == nodes[j].group
        if self.scope == "across":
            return nodes[i].group != nodes[j].group
        return True

    def expand(self, nodes: Sequence[SensorNode]) -> List[Tuple[int, int]]:
        """Expand the rule into directed (source, target) pairs of node order indices.

        Undirected relations are returned closed under reversal, self-loops are never produced.

        :param nodes: the nodes of the graph in node order
        :returns: the expanded edge list
        :raises: EmptyTypePartitionError, UnknownSubtypeError, DanglingEdgeError
        """
        for node_type in (self.relation.source, self.relation.target):
            if not any(n.node_type is node_type for n in nodes):
                raise EmptyTypePartitionError(f"Relation {self.relation} has no {node_type.value} nodes to connect")
        pairs: List[Tuple[int, int]] = []
        if self.pattern == "link":
            source = self._endpoint(nodes, self.relation.source, self.source)
            pairs.append((source, self._endpoint(nodes, self.relation.target, self.target)))
        elif self.pattern in SINGLE_SELECTOR_PATTERNS:
            for group in self._groups(nodes, self._select(nodes, self.relation.source, self.source)):
                pairs.extend(self._single(group))
        else:
            sources = self._select(nodes, self.relation.source, self.source)
            targets = self._select(nodes, self.relation.target, self.target)
            for i, j in itertools.product(sources, targets):
                if self.pattern == "colocated" and nodes[i].position != nodes[j].position:
                    continue
                if self.pattern == "mirror" and (
                    nodes[i].slot != nodes[j].slot
                    or nodes[i].group == nodes[j].group
                    or (self.source == WILDCARD and nodes[i].subtype != nodes[j].subtype)
                ):
                    continue
                if self._scoped(nodes, i, j):
                    pairs.append((i, j))
        pairs = [(i, j) for i, j in pairs if i != j]
        if not self.relation.directed:
            pairs += [(j, i) for i, j in pairs]
        return pairs

    def _single(self, group: List[int]) -> List[Tuple[int, int]]:
        if self.pattern == "complete":
            return list(itertools.combinations(group, 2))
        pairs = list(zip(group, group[1:]))
        if self.pattern == "ring" and len(group) > 2:
            pairs.append((group[-1], group[0]))
        return pairs

    @staticmethod
    def _endpoint(nodes: Sequence[SensorNode], node_type: NodeType, endpoint: Tuple[str, int]) -> int:
        subtype, index = endpoint
        for i, node in enumerate(nodes):
            if node.node_type is node_type and node.subtype == subtype and node.index == index:
                return i
        raise DanglingEdgeError(f"Edge endpoint {node_type.value}:{subtype}:{index} does not exist")


class RuleParser:
    """Parses textual edge rules into :class:`EdgeRule` objects."""

    # fmt: off
    NODE_TYPE  = one_of("L H")                                                               # noqa: E221
    RELATION   = Combine(NODE_TYPE + "-" + NODE_TYPE)                                        # noqa: E221
    PATTERN    = one_of(" ".join(SINGLE_SELECTOR_PATTERNS + PAIRED_PATTERNS), as_keyword=True)  # noqa: E221
    LABEL      = QuotedString('"') | Word(alphanums + "_")                                   # noqa: E221
    ENDPOINT   = Group(LABEL + Suppress(":") + Word(nums))                                   # noqa: E221
    SELECTOR   = ENDPOINT | Literal(WILDCARD) | LABEL                                        # noqa: E221
    SCOPE      = Group((Keyword("within") | Keyword("across")) + Suppress(Keyword("group")))  # noqa: E221
    GRAMMAR    = (RELATION("relation") + Suppress(":") + PATTERN("pattern") +               # noqa: E221
                  SELECTOR("source") + Maybe(Suppress("->") + SELECTOR("target")) +           # noqa: E221
                  Maybe(SCOPE("scope")))                                                     # noqa: E221
    # fmt: on

    @classmethod
    def parse(cls, text: str) -> EdgeRule:
        """Parse a single rule.

        :param text: the rule text
        :returns: the parsed rule
        :raises: RuleSyntaxError
        """
        try:
            parsed = cls.GRAMMAR.parse_string(text, parse_all=True)
        except ParseBaseException as x:
            raise RuleSyntaxError(f"{x.msg}:\n{x.line}\n{(' ' * (x.col - 1))}^")
        relation = RelationType.from_name(cls._token(parsed["relation"]))
        pattern = cls._token(parsed["pattern"])
        source = cls._selector(parsed["source"])
        target = cls._selector(parsed["target"]) if "target" in parsed else None
        scope = parsed["scope"][0] if "scope" in parsed else None

        is_endpoint = [isinstance(s, tuple) for s in (source, target) if s is not None]
        if pattern == "link" and (target is None or not all(is_endpoint)):
            raise RuleSyntaxError(f"Pattern 'link' needs two subtype:index endpoints:\n{text}")
        if pattern != "link" and any(is_endpoint):
            raise RuleSyntaxError(f"Only 'link' accepts subtype:index endpoints:\n{text}")
        if pattern in SINGLE_SELECTOR_PATTERNS:
            if relation.directed:
                raise RuleSyntaxError(f"Pattern '{pattern}' only applies to same-type relations:\n{text}")
            if target is not None:
                raise RuleSyntaxError(f"Pattern '{pattern}' takes a single selector:\n{text}")
        if target is None:
            if relation.directed:
                raise RuleSyntaxError(f"Relation {relation} needs a '-> target' selector:\n{text}")
            target = source
        return EdgeRule(relation, pattern, source, target, scope)

    @staticmethod
    def _token(token) -> str:
        return token if isinstance(token, str) else str(token[0])

    @staticmethod
    def _selector(token) -> Selector:
        if isinstance(token, str):
            return token
        if len(token) == 1:
            return str(token[0])
        label, index = token
        return str(label), int(index)


def parse_rule(rule: Union[str, EdgeRule]) -> EdgeRule:
    """Parse a rule, passing already parsed rules through.

    :param rule: the rule text or an EdgeRule
    :returns: the parsed rule
    :raises: RuleSyntaxError
    """
    return rule if isinstance(rule, EdgeRule) else RuleParser.parse(rule)
