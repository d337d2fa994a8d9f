"""Hard-instance families, random test graphs and partitions.

Id layout of ``G(k, x, N)`` (row-major): row 1 holds ``v(1,0)..v(1,x)`` at ids
``0..x``; row ``i >= 2`` holds ``v(i,0)..v(i,xK)`` at ids starting from
``(x+1) + (i-2)(xK+1)``.

Id layout of the clique-width family ``G(Gamma, p)``: tree nodes ``u(j,i)``
level by level (level ``j`` has ``2**j`` nodes), then the rows
``v(l,i)`` for ``l = 1..Gamma``, each row listing its ``2**p`` columns.

Partition text format: one ``node part_index`` pair per line; nodes that do
not appear belong to no part.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .errors import GenerationFailed, InvalidArgument, UnsupportedParameter
from .graph import Graph, diameter, is_connected, is_infinite

Name = tuple  # ("v", i, j) for G(k,x,N); ("u", level, idx) / ("v", row, col) for G(Gamma,p)


def format_name(name: Name) -> str:
    kind, a, b = name
    return f"{kind}({a},{b})"


def parse_name(text: str) -> Name:
    kind, rest = text.split("(", 1)
    a, b = rest.rstrip(")").split(",")
    return (kind, int(a), int(b))


@dataclass(frozen=True)
class Partition:
    """Ordered, pairwise-disjoint node sets. Need not cover the graph."""

    parts: tuple[frozenset[int], ...]
    n: int

    def __post_init__(self):
        seen: set[int] = set()
        for idx, p in enumerate(self.parts):
            if not p:
                raise InvalidArgument(f"part {idx} is empty")
            for v in p:
                if not (0 <= v < self.n):
                    raise InvalidArgument(f"part {idx} has node {v} outside 0..{self.n - 1}")
                if v in seen:
                    raise InvalidArgument(f"node {v} appears in more than one part")
                seen.add(v)

    @classmethod
    def from_sets(cls, n: int, parts: Iterable[Iterable[int]]) -> "Partition":
        return cls(tuple(frozenset(p) for p in parts), n)

    @property
    def part_of(self) -> list[int | None]:
        owner: list[int | None] = [None] * self.n
        for idx, p in enumerate(self.parts):
            for v in p:
                owner[v] = idx
        return owner

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i: int) -> frozenset[int]:
        return self.parts[i]

    def covers(self) -> bool:
        return sum(len(p) for p in self.parts) == self.n

    def validate(self, g: Graph) -> None:
        """Raise unless every part is connected in ``g``."""
        if g.n != self.n:
            raise InvalidArgument(f"partition is for n={self.n}, graph has n={g.n}")
        for idx, p in enumerate(self.parts):
            if not is_connected(g, p):
                raise InvalidArgument(f"part {idx} is not connected")


def singleton_partition(n: int) -> Partition:
    return Partition.from_sets(n, ([v] for v in range(n)))


def read_partition(fh: TextIO, n: int) -> Partition:
    groups: dict[int, set[int]] = {}
    for lineno, raw in enumerate(fh, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise InvalidArgument(f"line {lineno}: expected 'node part_index'")
        try:
            v, idx = int(fields[0]), int(fields[1])
        except ValueError:
            raise InvalidArgument(f"line {lineno}: non-integer field") from None
        if idx < 0:
            raise InvalidArgument(f"line {lineno}: negative part index")
        groups.setdefault(idx, set()).add(v)
    if groups and sorted(groups) != list(range(len(groups))):
        raise InvalidArgument("part indices must be 0..N-1 without gaps")
    return Partition.from_sets(n, (groups[i] for i in range(len(groups))))


def write_partition(parts: Partition, fh: TextIO) -> None:
    owner = parts.part_of
    for v in range(parts.n):
        if owner[v] is not None:
            fh.write(f"{v} {owner[v]}\n")


# --- k-chordal family G(k, x, N) --------------------------------------------

@dataclass(frozen=True)
class KChordalInstance:
    graph: Graph
    k: int
    x: int
    N: int
    id_map: dict = field(compare=False, hash=False, repr=False)

    @property
    def K(self) -> int:
        return self.k // 2 - 1

    def vid(self, i: int, j: int) -> int:
        return self.id_map[("v", i, j)]

    def row(self, i: int) -> list[int]:
        width = self.x if i == 1 else self.x * self.K
        return [self.vid(i, j) for j in range(width + 1)]

    def id_map_json(self) -> str:
        return json.dumps({"version": 1, "ids": {format_name(k): v for k, v in sorted(self.id_map.items(), key=lambda kv: kv[1])}})


def k_chordal_node_count(k: int, x: int, N: int) -> int:
    K = k // 2 - 1
    return (x + 1) + (N - 1) * (x * K + 1)


def gen_k_chordal(k: int, x: int, N: int) -> KChordalInstance:
    """Build ``G(k, x, N)`` with its four edge families."""
    if k < 4 or k % 2:
        raise UnsupportedParameter(f"k must be even and at least 4, got {k}")
    if x < 0:
        raise InvalidArgument(f"x must be non-negative, got {x}")
    if N < 2:
        raise InvalidArgument(f"N must be at least 2, got {N}")
    K = k // 2 - 1
    width = x * K
    ids: dict[Name, int] = {}
    for j in range(x + 1):
        ids[("v", 1, j)] = len(ids)
    for i in range(2, N + 1):
        for j in range(width + 1):
            ids[("v", i, j)] = len(ids)

    def v(i, j):
        return ids[("v", i, j)]

    edges = []
    edges += [(v(1, j), v(1, j + 1)) for j in range(x)]                                   # E1
    edges += [(v(i, j), v(i, j + 1)) for i in range(2, N + 1) for j in range(width)]     # E2
    edges += [(v(1, j), v(i, j * K)) for i in range(2, N + 1) for j in range(x + 1)]     # E3
    for h in range(0, width + 1, K):                                                      # E4
        col = [v(i, h) for i in range(2, N + 1)]
        edges += [(a, b) for ai, a in enumerate(col) for b in col[ai + 1:]]
    return KChordalInstance(Graph(len(ids), edges), k, x, N, ids)


# --- clique-width family, direct construction ---------------------------------

@dataclass(frozen=True)
class NamedGraph:
    graph: Graph
    id_map: dict = field(compare=False, hash=False, repr=False)

    def vid(self, name: Name) -> int:
        return self.id_map[name]

    def id_map_json(self) -> str:
        return json.dumps({"version": 1, "ids": {format_name(k): v for k, v in sorted(self.id_map.items(), key=lambda kv: kv[1])}})


def gen_clique_width_direct(gamma: int, p: int) -> NamedGraph:
    """``G(Gamma, p)`` written out from its vertex and edge lists."""
    if gamma < 1 or p < 1:
        raise InvalidArgument("gamma and p must be at least 1")
    cols = 2 ** p
    ids: dict[Name, int] = {}
    for j in range(p + 1):
        for i in range(2 ** j):
            ids[("u", j, i)] = len(ids)
    for l in range(1, gamma + 1):
        for i in range(cols):
            ids[("v", l, i)] = len(ids)
    edges = []
    for j in range(1, p + 1):                                                   # E1: tree
        for i in range(2 ** j):
            edges.append((ids[("u", j, i)], ids[("u", j - 1, i // 2)]))
    for i in range(cols):                                                        # E2: leaf to column
        for l in range(1, gamma + 1):
            edges.append((ids[("u", p, i)], ids[("v", l, i)]))
    for i in range(cols - 1):                                                    # E3: column bicliques
        for a in range(1, gamma + 1):
            for b in range(1, gamma + 1):
                edges.append((ids[("v", a, i)], ids[("v", b, i + 1)]))
    return NamedGraph(Graph(len(ids), edges), ids)


# --- random graphs and partitions -------------------------------------------

def gen_random_connected_partition(g: Graph, num_parts: int, seed) -> Partition:
    """Grow ``num_parts`` parts by randomized multi-source BFS. Covers V."""
    if not (1 <= num_parts <= g.n):
        raise InvalidArgument(f"num_parts must lie in 1..{g.n}, got {num_parts}")
    rng = random.Random(seed)
    owner = [-1] * g.n
    sources = rng.sample(range(g.n), num_parts)
    frontier: list[tuple[int, int]] = []
    for idx, s in enumerate(sources):
        owner[s] = idx
        frontier.extend((w, idx) for w in g.adj(s))
    while frontier:
        pick = rng.randrange(len(frontier))
        frontier[pick], frontier[-1] = frontier[-1], frontier[pick]
        v, idx = frontier.pop()
        if owner[v] != -1:
            continue
        owner[v] = idx
        frontier.extend((w, idx) for w in g.adj(v) if owner[w] == -1)
    if -1 in owner:
        raise InvalidArgument("graph is disconnected; cannot cover it with grown parts")
    groups: list[list[int]] = [[] for _ in range(num_parts)]
    for v, idx in enumerate(owner):
        groups[idx].append(v)
    return Partition.from_sets(g.n, groups)


def _erdos_renyi(n: int, prob: float, rng: np.random.Generator) -> Graph:
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < prob
    return Graph(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def gen_diameter_d_graph(n: int, d: int, edge_prob: float | None = None, seed=0,
                         max_tries: int = 200) -> Graph:
    """Rejection-sample an Erdos-Renyi graph whose diameter is exactly ``d``.

    Without ``edge_prob`` the probability starts at the connectivity
    threshold ``ln n / n`` and is nudged up when samples come out too wide
    and down when they come out too narrow.
    """
    if d not in (3, 4):
        raise InvalidArgument(f"d must be 3 or 4, got {d}")
    if n < d + 1:
        raise InvalidArgument(f"need n >= d+1, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    prob = edge_prob if edge_prob is not None else min(1.0, math.log(n) / n)
    for _ in range(max_tries):
        g = _erdos_renyi(n, prob, rng)
        diam = diameter(g)
        if diam == d:
            return g
        if edge_prob is None:
            if is_infinite(diam) or diam > d:
                prob = min(1.0, prob * 1.15)
            else:
                prob *= 0.93
    raise GenerationFailed(f"no diameter-{d} graph on {n} nodes after {max_tries} tries")


def partition_into_path_parts(instance: KChordalInstance, rows_per_part: int) -> Partition:
    """Group consecutive rows of ``G(k, x, N)`` into parts."""
    if rows_per_part < 1:
        raise InvalidArgument("rows_per_part must be at least 1")
    rows = [instance.row(i) for i in range(1, instance.N + 1)]
    parts = []
    for start in range(0, len(rows), rows_per_part):
        chunk = rows[start:start + rows_per_part]
        parts.append([v for r in chunk for v in r])
    return Partition.from_sets(instance.graph.n, parts)
