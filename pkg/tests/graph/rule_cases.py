"""Test cases for the edge rule grammar."""

from htgnn.graph.base import H_H, H_L, L_H, L_L

# A graph of 2 L and 2 H nodes, chained within type and fully bipartite across types
SQUARE_NODES = [("L", "T", 0, "S:0"), ("L", "T", 1, "S:1"), ("H", "V", 0, "S:0"), ("H", "V", 1, "S:1")]
SQUARE_RULES = ["L-L: chain T", "H-H: chain V", "L-H: bipartite T -> V", "H-L: bipartite V -> T"]

# The ordering of these tuples is:
# - The rule text,
# - The expected relation, pattern, source, target and scope of the parsed rule,
# - The expected canonical text of the parsed rule
GOOD_CASES = (
    ("L-L: chain T", (L_L, "chain", "T", "T", None), "L-L: chain T"),
    ("L-L: ring T_OR within group", (L_L, "ring", "T_OR", "T_OR", "within"), "L-L: ring T_OR within group"),
    ("L-L:complete   T_IR", (L_L, "complete", "T_IR", "T_IR", None), "L-L: complete T_IR"),
    ("H-H: mirror * across group", (H_H, "mirror", "*", "*", "across"), "H-H: mirror * -> * across group"),
    ("L-H: bipartite T -> V", (L_H, "bipartite", "T", "V", None), "L-H: bipartite T -> V"),
    ("H-L: colocated * -> T_OR", (H_L, "colocated", "*", "T_OR", None), "H-L: colocated * -> T_OR"),
    (  # Quoted labels may carry spaces
        'H-L: link V_AX:0 -> "T IR":1',
        (H_L, "link", ("V_AX", 0), ("T IR", 1), None),
        'H-L: link V_AX:0 -> "T IR":1',
    ),
)

# The ordering of these tuples is:
# - The rule text,
# - A pattern the error message must match
INVALID_CASES = (
    ("L-X: chain T", "Expected"),
    ("L-L chain T", "Expected"),
    ("L-L: spiral T", "Expected"),
    ("L-L: chain T within", "Expected"),
    ("L-H: chain T", "only applies to same-type relations"),
    ("L-L: ring T -> T", "takes a single selector"),
    ("L-H: bipartite T", "needs a '-> target' selector"),
    ("L-H: link T:0", "needs two subtype:index endpoints"),
    ("L-H: link T -> V", "needs two subtype:index endpoints"),
    ("L-H: bipartite T:0 -> V", "Only 'link' accepts"),
)
