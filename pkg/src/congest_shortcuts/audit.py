"""Shortcut quality measurement, k-chordality checks and lower-bound witnesses.

Lower-bound class ``G(n, b, l, c)``: a witness fixes an ordered partition
``X_1..X_l`` of V with singleton ends ``s`` and ``r`` (C1), a partition of
``V - {s, r}`` into ``b`` connected sets each touching both ends (C2), and cut
bounds on the nested sets ``R_i = X_{i+1} u .. u X_l`` and
``L_i = X_1 u .. u X_{l-1-i}`` for ``2 <= i <= floor(l/2) - 1`` (C3).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidArgument, TooLarge
from .graph import INFINITE, Edge, Graph, induced_edges, is_connected, is_infinite, subgraph_diameter
from .instances import KChordalInstance, Partition, gen_clique_width_direct
from .shortcuts import Shortcut

FORMAT_VERSION = 1


# --- quality -------------------------------------------------------------------

@dataclass(frozen=True)
class QualityReport:
    dilation: object  # int, or INFINITE when some P_i + H_i is disconnected
    congestion: int
    per_part_diameters: tuple
    per_edge_congestion: dict = field(compare=False)

    @property
    def quality(self):
        return INFINITE if is_infinite(self.dilation) else self.dilation + self.congestion

    @property
    def disconnected_parts(self) -> list[int]:
        return [i for i, d in enumerate(self.per_part_diameters) if is_infinite(d)]

    def to_dict(self) -> dict:
        def num(x):
            return "INFINITE" if is_infinite(x) else x
        return {
            "version": FORMAT_VERSION,
            "dilation": num(self.dilation),
            "congestion": self.congestion,
            "quality": num(self.quality),
            "per_part_diameters": [num(d) for d in self.per_part_diameters],
            "disconnected_parts": self.disconnected_parts,
            "per_edge_congestion": [[u, v, c] for (u, v), c in sorted(self.per_edge_congestion.items())],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def part_subgraph(g: Graph, part, h_edges) -> tuple[set[int], set[Edge]]:
    """Node and edge sets of P_i + H_i."""
    edges = set(induced_edges(g, part)) | set(h_edges)
    nodes = set(part)
    for u, v in h_edges:
        nodes.add(u)
        nodes.add(v)
    return nodes, edges


def measure(g: Graph, parts: Partition, sc: Shortcut) -> QualityReport:
    if len(parts) != len(sc):
        raise InvalidArgument(f"{len(parts)} parts but {len(sc)} shortcut sets")
    sc.validate(g)
    diams = []
    counts: dict[Edge, int] = {}
    for part, h in zip(parts, sc.per_part):
        nodes, edges = part_subgraph(g, part, h)
        diams.append(subgraph_diameter(nodes, edges))
        for e in edges:
            counts[e] = counts.get(e, 0) + 1
    dilation = max(diams, default=0)
    return QualityReport(dilation, max(counts.values(), default=0), tuple(diams), counts)


# --- k-chordality ------------------------------------------------------------------

def find_long_induced_cycle(g: Graph, k: int, node_cap: int = 48) -> list[int] | None:
    """An induced cycle with more than ``k`` nodes, or None.

    Each cycle is grown as a chordless path from its smallest vertex, so
    only larger vertices are ever added.
    """
    if g.n > node_cap:
        raise TooLarge(f"chordality search capped at {node_cap} nodes, graph has {g.n}")
    adj = [set(g.adj(v)) for v in range(g.n)]

    def extend(path: list[int], blocked: list[int]) -> list[int] | None:
        # blocked[w] > 0 means w is adjacent to an interior path vertex
        s, last = path[0], path[-1]
        for w in adj[last]:
            if w <= s or blocked[w] or w in path:
                continue
            if s in adj[w]:
                if len(path) >= 2 and len(path) + 1 > k:
                    return path + [w]
                continue
            for z in adj[last]:
                blocked[z] += 1
            found = extend(path + [w], blocked)
            for z in adj[last]:
                blocked[z] -= 1
            if found:
                return found
        return None

    for s in range(g.n):
        for a in adj[s]:
            if a > s:
                found = extend([s, a], [0] * g.n)
                if found:
                    return found
    return None


def verify_chordality(g: Graph, k: int, node_cap: int = 48) -> bool:
    """True iff ``g`` has no induced cycle longer than ``k``."""
    if k < 3:
        raise InvalidArgument("k must be at least 3")
    return find_long_induced_cycle(g, k, node_cap) is None


# --- lower-bound class -----------------------------------------------------------

@dataclass(frozen=True)
class LbWitness:
    X: tuple[frozenset, ...]
    Q: tuple[frozenset, ...]
    b: int
    l: int
    c: int

    @property
    def s(self) -> int:
        return next(iter(self.X[0]))

    @property
    def r(self) -> int:
        return next(iter(self.X[-1]))

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "b": self.b, "l": self.l, "c": self.c,
            "X": [sorted(x) for x in self.X],
            "Q": [sorted(q) for q in self.Q],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LbWitness":
        try:
            return cls(tuple(frozenset(x) for x in doc["X"]), tuple(frozenset(q) for q in doc["Q"]),
                       int(doc["b"]), int(doc["l"]), int(doc["c"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgument(f"malformed witness: {exc}") from None


@dataclass(frozen=True)
class LbCheck:
    ok: bool
    condition: str | None = None   # "C1", "C2" or "C3" on failure
    index: int | None = None       # offending (1-based) set index
    detail: str = ""
    cut_sizes: dict = field(default_factory=dict)  # i -> (R-side, L-side)

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "ok": self.ok,
            "condition": self.condition,
            "index": self.index,
            "detail": self.detail,
            "cut_sizes": {str(i): list(v) for i, v in sorted(self.cut_sizes.items())},
        }


def _cut(g: Graph, inner: set[int], outer: set[int]) -> int:
    """|E(inner, N(inner) - outer)| for inner a subset of outer."""
    return sum(1 for u in inner for v in g.adj(u) if v not in outer)


def c3_indices(l: int) -> range:
    return range(2, l // 2)


def verify_lb_class(g: Graph, w: LbWitness) -> LbCheck:
    if w.l < 3 or w.b < 0 or w.c < 0:
        raise InvalidArgument("witness needs l >= 3 and non-negative b, c")
    if len(w.X) != w.l:
        raise InvalidArgument(f"witness declares l={w.l} but lists {len(w.X)} X-sets")
    for x in list(w.X) + list(w.Q):
        if any(not (0 <= v < g.n) for v in x):
            raise InvalidArgument("witness mentions a node outside the graph")

    seen: set[int] = set()
    for i, x in enumerate(w.X, 1):
        if seen & x:
            return LbCheck(False, "C1", i, "X-sets overlap")
        seen |= x
    if len(seen) != g.n:
        return LbCheck(False, "C1", None, f"X-sets cover {len(seen)} of {g.n} nodes")
    for i in (1, w.l):
        if len(w.X[i - 1]) != 1:
            return LbCheck(False, "C1", i, f"X_{i} has {len(w.X[i - 1])} nodes, expected 1")

    s, r = w.s, w.r
    if len(w.Q) != w.b:
        return LbCheck(False, "C2", None, f"{len(w.Q)} Q-sets, expected b={w.b}")
    seen = set()
    for i, q in enumerate(w.Q, 1):
        if not q:
            return LbCheck(False, "C2", i, "empty Q-set")
        if seen & q or s in q or r in q:
            return LbCheck(False, "C2", i, "Q-sets overlap or contain s/r")
        seen |= q
        if not is_connected(g, q):
            return LbCheck(False, "C2", i, f"Q_{i} is not connected")
        if not any(v in q for v in g.adj(s)):
            return LbCheck(False, "C2", i, f"no edge between X_1 and Q_{i}")
        if not any(v in q for v in g.adj(r)):
            return LbCheck(False, "C2", i, f"no edge between X_l and Q_{i}")
    if len(seen) != g.n - 2:
        return LbCheck(False, "C2", None, "Q-sets do not cover V - {s, r}")

    cuts = {}
    for i in c3_indices(w.l):
        r_i = set().union(*w.X[i:])
        r_prev = r_i | w.X[i - 1]
        l_i = set().union(*w.X[: w.l - 1 - i])
        l_prev = l_i | w.X[w.l - 1 - i]
        cr, cl = _cut(g, r_i, r_prev), _cut(g, l_i, l_prev)
        cuts[i] = (cr, cl)
        if cr > w.c or cl > w.c:
            return LbCheck(False, "C3", i, f"cut sizes R={cr}, L={cl} exceed c={w.c}", cuts)
    return LbCheck(True, cut_sizes=cuts)


def predicted_lb_rounds(b: int, l: int, c: int) -> Fraction:
    """min(b/c, l/2 - 1), exactly."""
    if b < 1 or l < 3 or c < 1:
        raise InvalidArgument("need b >= 1, c >= 1 and l >= 3")
    return min(Fraction(b, c), Fraction(l, 2) - 1)


def build_lb_witness_kchordal(inst: KChordalInstance, D: int) -> LbWitness:
    K, x, N = inst.K, inst.x, inst.N
    if x != D - K:
        raise InvalidArgument(f"instance has x={x}, expected D-K={D - K}")
    if D <= 2 * K:
        raise InvalidArgument(f"need D > 2K, got D={D}, K={K}")
    width = x * K
    l = width + 3

    def column(j):
        return {inst.vid(i, j) for i in range(2, N + 1)}

    X = [{inst.vid(1, 0)}, column(0)]
    for i in range(3, width + 2):
        xi = column(i - 2)
        if (i - 2) % K == 0:
            xi.add(inst.vid(1, (i - 2) // K))
        X.append(xi)
    X.append(column(width))
    X.append({inst.vid(1, x)})
    Q = [{inst.vid(1, j) for j in range(1, x)}] + [set(inst.row(i)) for i in range(2, N + 1)]
    return LbWitness(tuple(frozenset(s) for s in X), tuple(frozenset(q) for q in Q), N, l, 1)


def build_lb_witness_cw(gamma: int, p: int) -> LbWitness:
    """Witness for the direct construction of ``G(gamma, p)`` (its id layout).

    ``b`` is gamma, except for ``p = 1`` where the root forms its own Q-set.
    """
    ng = gen_clique_width_direct(gamma, p)
    ids = ng.id_map
    cols = 2 ** p
    l = cols + 2
    X: list[set[int]] = [set() for _ in range(l)]
    X[0].add(ids[("u", p, 0)])
    X[-1].add(ids[("u", p, cols - 1)])
    for c in range(cols):
        X[c + 1].update(ids[("v", row, c)] for row in range(1, gamma + 1))
        if 1 <= c <= cols - 2:
            X[c + 1].add(ids[("u", p, c)])
    for j in range(p):
        for i in range(2 ** j):
            rightmost = (i + 1) * 2 ** (p - j) - 1
            X[min(rightmost, cols - 2) + 1].add(ids[("u", j, i)])
    s, r = ids[("u", p, 0)], ids[("u", p, cols - 1)]
    tree = {v for name, v in ids.items() if name[0] == "u"}
    Q = [{ids[("v", 1, c)] for c in range(cols)} | (tree - {s, r})]
    Q += [{ids[("v", row, c)] for c in range(cols)} for row in range(2, gamma + 1)]
    if p == 1:
        # the root's only neighbors are s and r, so it cannot join row 1
        root = ids[("u", 0, 0)]
        Q[0].discard(root)
        Q.append({root})
    return LbWitness(tuple(frozenset(x) for x in X), tuple(frozenset(q) for q in Q), len(Q), l, 3 * p)
