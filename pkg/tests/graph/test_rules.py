"""Tests for the edge rule grammar and the expansion of rules into edges."""

from htgnn.graph.base import L_L, NodeType, SensorNode
from htgnn.graph.errors import DanglingEdgeError, EmptyTypePartitionError, RuleSyntaxError, UnknownSubtypeError
from htgnn.graph.rules import EdgeRule, parse_rule

import pytest

from tests.graph.rule_cases import GOOD_CASES, INVALID_CASES


def _nodes(*specs):
    return sorted((SensorNode(NodeType(t), s, i, p) for t, s, i, p in specs), key=lambda n: n.sort_key)


@pytest.mark.parametrize("text, expected, canonical", GOOD_CASES)
def test_valid_rules(text: str, expected: tuple, canonical: str):
    """Tests well-formed rules parse into the expected fields and print canonically."""
    rule = parse_rule(text)
    assert (rule.relation, rule.pattern, rule.source, rule.target, rule.scope) == expected
    assert str(rule) == canonical
    assert parse_rule(str(rule)) == rule


@pytest.mark.parametrize("text, error", INVALID_CASES)
def test_invalid_rules(text: str, error: str):
    """Tests malformed rules raise a RuleSyntaxError naming the problem."""
    with pytest.raises(RuleSyntaxError, match=error):
        parse_rule(text)


def test_syntax_error_points_at_column():
    """Tests a syntax error message carries the rule and a caret under the offending column."""
    with pytest.raises(RuleSyntaxError) as x:
        parse_rule("L-L: spiral T")
    lines = str(x.value).splitlines()
    assert lines[1] == "L-L: spiral T"
    assert lines[2] == " " * 5 + "^"


def test_parsed_rules_pass_through():
    """Tests an already parsed rule is returned unchanged."""
    rule = EdgeRule(L_L, "chain", "T", "T")
    assert parse_rule(rule) is rule


def test_ring_and_chain_expansion():
    """Tests ring and chain patterns over 4 nodes, which are closed under reversal and free of self-loops."""
    nodes = _nodes(*[("L", "T", i, f"S:{i}") for i in range(4)])
    chain = set(parse_rule("L-L: chain T").expand(nodes))
    ring = set(parse_rule("L-L: ring T").expand(nodes))
    assert len(chain) == 6
    assert len(ring) == 8
    assert ring - chain == {(3, 0), (0, 3)}
    for pairs in (chain, ring):
        assert all((j, i) in pairs for i, j in pairs)
        assert all(i != j for i, j in pairs)


def test_ring_of_two_is_a_single_edge():
    """Tests a ring over 2 nodes does not double its only edge."""
    nodes = _nodes(("L", "T", 0, ""), ("L", "T", 1, ""))
    assert sorted(parse_rule("L-L: ring T").expand(nodes)) == [(0, 1), (1, 0)]


def test_within_and_across_group():
    """Tests the group scope restricts edges to sensors of the same or of different groups."""
    nodes = _nodes(*[("L", "T", i, f"B{1 + i // 3}:{i % 3}") for i in range(6)])
    within = parse_rule("L-L: complete T within group").expand(nodes)
    assert all(nodes[i].group == nodes[j].group for i, j in within)
    assert len(within) == 2 * 2 * 3
    across = set(parse_rule("L-L: mirror T across group").expand(nodes))
    assert sorted(across) == [(0, 3), (1, 4), (2, 5), (3, 0), (4, 1), (5, 2)]


def test_colocated_and_link():
    """Tests colocated pairs join equal positions and link joins explicit endpoints."""
    nodes = _nodes(("L", "D", 0, "S:0"), ("L", "D", 1, "S:1"), ("H", "A", 0, "S:1"), ("H", "A", 1, "S:0"))
    assert sorted(parse_rule("L-H: colocated D -> A").expand(nodes)) == [(0, 3), (1, 2)]
    assert parse_rule("H-L: link A:1 -> D:1").expand(nodes) == [(3, 1)]


def test_expansion_errors():
    """Tests rules raise when their subtypes, endpoints or node types are missing."""
    nodes = _nodes(("L", "T", 0, ""), ("L", "T", 1, ""))
    with pytest.raises(EmptyTypePartitionError, match="has no H nodes"):
        parse_rule("H-H: chain V").expand(nodes)
    with pytest.raises(UnknownSubtypeError, match="Subtype 'X' is not declared"):
        parse_rule("L-L: chain X").expand(nodes)
    with pytest.raises(DanglingEdgeError, match="L:T:5 does not exist"):
        parse_rule("L-L: link T:0 -> T:5").expand(nodes)
