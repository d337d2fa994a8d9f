"""Clique-width expressions and the recursive 6-label construction of G(Gamma, p).

Expressions have a parenthesized prefix text form::

    intro(2)                     one node labeled 2
    union(A, B)                  disjoint union, B's nodes renumbered after A's
    relabel(i, j, A)             every label i becomes j
    join(i, j, A)                connect every i-node with every j-node

for example ``join(2,3,union(intro(2),intro(3)))`` is a single edge.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union as TypingUnion

from .errors import InvalidArgument, MalformedOperand
from .graph import Graph, norm_edge

LABELS = 6


@dataclass(frozen=True)
class LabeledGraph:
    """A k-graph: a graph plus one label in ``1..k`` per node.

    ``coords`` optionally names every node (``("u", level, i)`` for tree
    nodes, ``("v", row, column)`` for row nodes). ``labels_used`` records
    every label touched while building the graph.
    """

    n: int
    edges: frozenset
    labels: tuple
    k: int = LABELS
    coords: tuple | None = None
    labels_used: frozenset = field(default=frozenset())

    @property
    def graph(self) -> Graph:
        return Graph(self.n, self.edges)

    def label_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for lab in self.labels:
            counts[lab] = counts.get(lab, 0) + 1
        return dict(sorted(counts.items()))

    def nodes_with(self, label: int) -> list[int]:
        return [v for v, lab in enumerate(self.labels) if lab == label]

    def coord_edges(self) -> set[frozenset]:
        if self.coords is None:
            raise InvalidArgument("graph carries no coordinates")
        return {frozenset((self.coords[u], self.coords[v])) for u, v in self.edges}


def _check_label(label: int, k: int) -> None:
    if not isinstance(label, int) or not (1 <= label <= k):
        raise InvalidArgument(f"label {label!r} outside 1..{k}")


# --- the four operations ---------------------------------------------------

def introduce(label: int, k: int = LABELS, coord=None) -> LabeledGraph:
    _check_label(label, k)
    coords = (coord,) if coord is not None else None
    return LabeledGraph(1, frozenset(), (label,), k, coords, frozenset({label}))


def union(g: LabeledGraph, h: LabeledGraph) -> LabeledGraph:
    if g.k != h.k:
        raise InvalidArgument("cannot union graphs with different label budgets")
    shift = g.n
    edges = g.edges | {(u + shift, v + shift) for u, v in h.edges}
    coords = g.coords + h.coords if g.coords is not None and h.coords is not None else None
    return LabeledGraph(g.n + h.n, frozenset(edges), g.labels + h.labels, g.k, coords,
                        g.labels_used | h.labels_used)


def relabel(g: LabeledGraph, i: int, j: int) -> LabeledGraph:
    _check_label(i, g.k)
    _check_label(j, g.k)
    labels = tuple(j if lab == i else lab for lab in g.labels)
    return LabeledGraph(g.n, g.edges, labels, g.k, g.coords, g.labels_used | {i, j})


def join(g: LabeledGraph, i: int, j: int) -> LabeledGraph:
    _check_label(i, g.k)
    _check_label(j, g.k)
    if i == j:
        raise InvalidArgument("join needs two distinct labels")
    side_i, side_j = g.nodes_with(i), g.nodes_with(j)
    new = {norm_edge(a, b) for a in side_i for b in side_j}
    return LabeledGraph(g.n, g.edges | new, g.labels, g.k, g.coords, g.labels_used | {i, j})


# --- expression trees ----------------------------------------------------------

@dataclass(frozen=True)
class Introduce:
    label: int
    name: tuple | None = None


@dataclass(frozen=True)
class Union:
    left: "CwExpression"
    right: "CwExpression"


@dataclass(frozen=True)
class Relabel:
    i: int
    j: int
    child: "CwExpression"


@dataclass(frozen=True)
class Join:
    i: int
    j: int
    child: "CwExpression"


CwExpression = TypingUnion[Introduce, Union, Relabel, Join]


def evaluate(expr: CwExpression, k: int = LABELS) -> LabeledGraph:
    if isinstance(expr, Introduce):
        return introduce(expr.label, k, expr.name)
    if isinstance(expr, Union):
        return union(evaluate(expr.left, k), evaluate(expr.right, k))
    if isinstance(expr, Relabel):
        return relabel(evaluate(expr.child, k), expr.i, expr.j)
    if isinstance(expr, Join):
        return join(evaluate(expr.child, k), expr.i, expr.j)
    raise InvalidArgument(f"not a clique-width expression: {expr!r}")


def to_text(expr: CwExpression) -> str:
    if isinstance(expr, Introduce):
        return f"intro({expr.label})"
    if isinstance(expr, Union):
        return f"union({to_text(expr.left)},{to_text(expr.right)})"
    if isinstance(expr, Relabel):
        return f"relabel({expr.i},{expr.j},{to_text(expr.child)})"
    if isinstance(expr, Join):
        return f"join({expr.i},{expr.j},{to_text(expr.child)})"
    raise InvalidArgument(f"not a clique-width expression: {expr!r}")


_TOKEN = re.compile(r"\s*(?:(\d+)|([a-z]+)|(.))")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        tokens.append(m.group(m.lastindex))
        pos = m.end()
    return tokens


def parse_expression(text: str) -> CwExpression:
    tokens = _tokenize(text)
    pos = 0

    def expect(tok):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != tok:
            got = tokens[pos] if pos < len(tokens) else "end of input"
            raise InvalidArgument(f"expected {tok!r}, got {got!r}")
        pos += 1

    def number():
        nonlocal pos
        if pos >= len(tokens) or not tokens[pos].isdigit():
            raise InvalidArgument("expected a label number")
        pos += 1
        return int(tokens[pos - 1])

    def expr():
        nonlocal pos
        if pos >= len(tokens):
            raise InvalidArgument("unexpected end of expression")
        op = tokens[pos]
        pos += 1
        expect("(")
        if op == "intro":
            node = Introduce(number())
        elif op == "union":
            left = expr()
            expect(",")
            node = Union(left, expr())
        elif op in ("relabel", "join"):
            i = number()
            expect(",")
            j = number()
            expect(",")
            child = expr()
            node = Relabel(i, j, child) if op == "relabel" else Join(i, j, child)
        else:
            raise InvalidArgument(f"unknown operation {op!r}")
        expect(")")
        return node

    tree = expr()
    if pos != len(tokens):
        raise InvalidArgument(f"trailing input after expression: {tokens[pos:]}")
    return tree


# --- G(Gamma, p) -----------------------------------------------------------------

def _union_all(items: list) -> LabeledGraph:
    out = items[0]
    for item in items[1:]:
        out = union(out, item)
    return out


def build_base(gamma: int) -> LabeledGraph:
    """G(Gamma, 1): a labeled K_{Gamma,Gamma} plus a root and two tree leaves."""
    if gamma < 1:
        raise InvalidArgument("gamma must be at least 1")
    left = [introduce(2, coord=("v", l, 0)) for l in range(1, gamma + 1)]
    right = [introduce(3, coord=("v", l, 1)) for l in range(1, gamma + 1)]
    g = join(_union_all(left + right), 2, 3)
    g = _union_all([g, introduce(1, coord=("u", 0, 0)), introduce(5, coord=("u", 1, 0)),
                    introduce(6, coord=("u", 1, 1))])
    g = join(join(g, 2, 5), 3, 6)
    g = join(join(g, 1, 5), 1, 6)
    return relabel(relabel(g, 5, 4), 6, 4)


def _check_family_form(g: LabeledGraph) -> int:
    counts = g.label_counts()
    gamma = counts.get(2, 0)
    ok = (counts.get(1, 0) == 1 and gamma >= 1 and counts.get(3, 0) == gamma
          and set(counts) <= {1, 2, 3, 4})
    if not ok:
        raise MalformedOperand(f"operand label multiset {counts} is not of the form 1:1, 2:G, 3:G, 4:rest")
    return gamma


def _columns(g: LabeledGraph) -> int:
    return sum(1 for c in g.coords if c[0] == "v" and c[1] == 1)


def _shift_coords(g: LabeledGraph, side: str, offset_cols: int) -> LabeledGraph:
    """Move g's coords one tree level down, into the left or right subtree."""
    coords = []
    for kind, a, b in g.coords:
        if kind == "u":
            coords.append(("u", a + 1, b + (2 ** a if side == "right" else 0)))
        else:
            coords.append(("v", a, b + offset_cols))
    return LabeledGraph(g.n, g.edges, g.labels, g.k, tuple(coords), g.labels_used)


def oplus(g: LabeledGraph, h: LabeledGraph) -> LabeledGraph:
    """Glue two members of the family: h becomes the left half, g the right."""
    if _check_family_form(g) != _check_family_form(h):
        raise MalformedOperand("operands have different gamma")
    tracked = g.coords is not None and h.coords is not None
    if tracked:
        h = _shift_coords(h, "left", 0)
        g = _shift_coords(g, "right", _columns(h))
    g = relabel(g, 2, 5)
    h = relabel(h, 3, 6)
    out = union(g, h)
    out = join(out, 5, 6)
    out = relabel(relabel(out, 5, 4), 6, 4)
    out = relabel(out, 1, 5)
    out = union(out, introduce(1, coord=("u", 0, 0) if tracked else None))
    out = join(out, 1, 5)
    return relabel(out, 5, 4)


def build_g_gamma_p(gamma: int, p: int) -> LabeledGraph:
    if p < 1:
        raise InvalidArgument("p must be at least 1")
    g = build_base(gamma)
    for _ in range(p - 1):
        g = oplus(g, g)
    return g


def _intros(labels: Iterable[int]) -> CwExpression:
    items = [Introduce(lab) for lab in labels]
    out = items[0]
    for item in items[1:]:
        out = Union(out, item)
    return out


def base_expression(gamma: int) -> CwExpression:
    biclique = Join(2, 3, _intros([2] * gamma + [3] * gamma))
    e: CwExpression = Union(Union(Union(biclique, Introduce(1)), Introduce(5)), Introduce(6))
    e = Join(3, 6, Join(2, 5, e))
    e = Join(1, 6, Join(1, 5, e))
    return Relabel(6, 4, Relabel(5, 4, e))


def oplus_expression(g: CwExpression, h: CwExpression) -> CwExpression:
    e: CwExpression = Union(Relabel(2, 5, g), Relabel(3, 6, h))
    e = Relabel(1, 5, Relabel(6, 4, Relabel(5, 4, Join(5, 6, e))))
    return Relabel(5, 4, Join(1, 5, Union(e, Introduce(1))))


def g_gamma_p_expression(gamma: int, p: int) -> CwExpression:
    """Expression whose evaluation reproduces :func:`build_g_gamma_p` node for node."""
    e = base_expression(gamma)
    for _ in range(p - 1):
        e = oplus_expression(e, e)
    return e


def coord_edges_of(graph: Graph, id_map: dict) -> set[frozenset]:
    """Edges of a named graph, rewritten in terms of node names."""
    name_of = {v: k for k, v in id_map.items()}
    return {frozenset((name_of[u], name_of[v])) for u, v in graph.edges}
