"""Immutable simple undirected graphs and the distance/connectivity primitives.

Nodes are the dense integers ``0..n-1``. Edges are stored as normalized
pairs ``(u, v)`` with ``u < v``. Distances into unreachable territory are
reported with the :data:`INFINITE` sentinel rather than a number.

Edge-list text format::

    # comment lines are ignored
    n m
    u v          (m lines, u < v)

The weighted variant appends a third column ``w`` to every edge line.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator, Mapping, TextIO

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import InvalidArgument

Edge = tuple[int, int]

# below this many nodes plain BFS beats building a sparse matrix
_SMALL = 48
_BATCH = 256


class _Infinite:
    """Sentinel for the distance/diameter of a disconnected vertex set.

    Compares greater than every integer so ``max`` still works, but it is
    not a number and refuses arithmetic.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    __str__ = __repr__

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("INFINITE")

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


def is_infinite(value) -> bool:
    return value is INFINITE


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """A simple undirected graph on nodes ``0..n-1``. Immutable."""

    __slots__ = ("_n", "_edges", "_adj", "_csr", "_diam")

    def __init__(self, n: int, edges: Iterable[Iterable[int]] = ()):
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InvalidArgument(f"node count must be a positive integer, got {n!r}")
        n = int(n)
        es: set[Edge] = set()
        for e in edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise InvalidArgument(f"self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidArgument(f"edge ({u}, {v}) out of range for n={n}")
            es.add(norm_edge(u, v))
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in es:
            adj[u].append(v)
            adj[v].append(u)
        self._n = n
        self._edges = frozenset(es)
        self._adj = tuple(tuple(sorted(a)) for a in adj)
        self._csr = None
        self._diam = None

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> frozenset[Edge]:
        return self._edges

    def edge_list(self) -> list[Edge]:
        return sorted(self._edges)

    def adj(self, u: int) -> tuple[int, ...]:
        return self._adj[u]

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def has_edge(self, u: int, v: int) -> bool:
        return norm_edge(u, v) in self._edges

    def nodes(self) -> range:
        return range(self._n)

    def csr(self) -> csr_matrix:
        """Symmetric 0/1 adjacency matrix, built once and cached."""
        if self._csr is None:
            self._csr = _csr_from_edges(self._n, self._edges)
        return self._csr

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._n, self._edges))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.m})"

    def __iter__(self) -> Iterator[int]:
        return iter(range(self._n))


def _csr_from_edges(n: int, edges: Iterable[Edge]) -> csr_matrix:
    arr = np.array(list(edges), dtype=np.int64).reshape(-1, 2)
    rows = np.concatenate([arr[:, 0], arr[:, 1]])
    cols = np.concatenate([arr[:, 1], arr[:, 0]])
    data = np.ones(len(rows), dtype=np.int8)
    return csr_matrix((data, (rows, cols)), shape=(n, n))


def _check_node(g: Graph, v: int) -> None:
    if not (0 <= v < g.n):
        raise InvalidArgument(f"node {v} out of range for n={g.n}")


def bfs_distances(g: Graph, source: int, allowed: Iterable[int] | None = None) -> dict[int, int]:
    """Hop distances from ``source``; unreachable nodes are absent.

    With ``allowed`` the search stays inside the induced subgraph on that set.
    """
    _check_node(g, source)
    allow = None
    if allowed is not None:
        allow = allowed if isinstance(allowed, (set, frozenset)) else set(allowed)
        if source not in allow:
            raise InvalidArgument(f"source {source} not in the allowed set")
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in g.adj(u):
            if w not in dist and (allow is None or w in allow):
                dist[w] = du
                queue.append(w)
    return dist


def _adjacency_of(nodes: list[int], edges: Iterable[Edge]) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {v: [] for v in nodes}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def _bfs_ecc(adj: Mapping[int, list[int]], src: int) -> tuple[int, int]:
    """(eccentricity, number of reached nodes) from ``src``."""
    dist = {src: 0}
    queue = deque([src])
    far = 0
    while queue:
        u = queue.popleft()
        du = dist[u]
        far = du
        for w in adj[u]:
            if w not in dist:
                dist[w] = du + 1
                queue.append(w)
    return far, len(dist)


def subgraph_diameter(nodes: Iterable[int], edges: Iterable[Edge]):
    """Diameter of the graph with exactly these nodes and edges.

    Every edge endpoint must be listed in ``nodes``. Returns :data:`INFINITE`
    when the graph is disconnected.
    """
    nodes = sorted(set(nodes))
    edges = list(edges)
    k = len(nodes)
    if k <= 1:
        return 0
    if k <= _SMALL:
        adj = _adjacency_of(nodes, edges)
        best = 0
        for v in nodes:
            ecc, reached = _bfs_ecc(adj, v)
            if reached < k:
                return INFINITE
            best = max(best, ecc)
        return best
    index = {v: i for i, v in enumerate(nodes)}
    local = [(index[u], index[v]) for u, v in edges]
    return _csr_diameter(_csr_from_edges(k, local) if local else csr_matrix((k, k), dtype=np.int8))


def _csr_diameter(mat: csr_matrix):
    k = mat.shape[0]
    reach = shortest_path(mat, method="D", directed=False, unweighted=True, indices=[0])
    if not np.isfinite(reach).all():
        return INFINITE
    best = int(reach.max())
    for start in range(1, k, _BATCH):
        idx = np.arange(start, min(k, start + _BATCH))
        d = shortest_path(mat, method="D", directed=False, unweighted=True, indices=idx)
        best = max(best, int(d.max()))
    return best


def induced_edges(g: Graph, s: Iterable[int]) -> list[Edge]:
    members = s if isinstance(s, (set, frozenset)) else set(s)
    return [(u, v) for u in members for v in g.adj(u) if u < v and v in members]


def diameter(g: Graph, restrict: Iterable[int] | None = None):
    """Diameter of ``g`` (or of the subgraph induced by ``restrict``).

    Returns :data:`INFINITE` if that (sub)graph is disconnected.
    """
    if restrict is None:
        if g._diam is None:
            if g.n <= _SMALL:
                g._diam = subgraph_diameter(range(g.n), g.edges)
            else:
                g._diam = _csr_diameter(g.csr())
        return g._diam
    members = set(restrict)
    for v in members:
        _check_node(g, v)
    return subgraph_diameter(members, induced_edges(g, members))


def is_connected(g: Graph, s: Iterable[int]) -> bool:
    members = set(s)
    if not members:
        raise InvalidArgument("connectivity of an empty node set is undefined")
    start = next(iter(members))
    return len(bfs_distances(g, start, members)) == len(members)


def edge_set_between(g: Graph, x: Iterable[int], y: Iterable[int]) -> set[Edge]:
    """E(X, Y): edges with one endpoint in X and the other in Y (normalized)."""
    xs, ys = set(x), set(y)
    out = set()
    for u in xs:
        for v in g.adj(u):
            if v in ys:
                out.add(norm_edge(u, v))
    return out


def neighborhood(g: Graph, s: Iterable[int]) -> set[int]:
    """N(S), the union of the neighbor sets of S (may intersect S)."""
    out: set[int] = set()
    for u in s:
        out.update(g.adj(u))
    return out


def closed_neighborhood(g: Graph, s: Iterable[int]) -> set[int]:
    members = set(s)
    return members | neighborhood(g, members)


def components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp = list(bfs_distances(g, s))
        for v in comp:
            seen[v] = True
        comps.append(sorted(comp))
    return comps


# --- edge-list I/O ---------------------------------------------------------

def _data_lines(fh: TextIO) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(fh, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def read_edge_list(fh: TextIO, weighted: bool = False):
    """Parse the edge-list format. Returns ``Graph`` or ``(Graph, weights)``."""
    lines = _data_lines(fh)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise InvalidArgument("empty edge-list file") from None
    if len(head) != 2:
        raise InvalidArgument(f"line {lineno}: header must be 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise InvalidArgument(f"line {lineno}: header must be two integers") from None
    edges: list[Edge] = []
    weights: dict[Edge, int] = {}
    width = 3 if weighted else 2
    for lineno, parts in lines:
        if len(parts) != width:
            raise InvalidArgument(f"line {lineno}: expected {width} fields, got {len(parts)}")
        try:
            vals = [int(p) for p in parts]
        except ValueError:
            raise InvalidArgument(f"line {lineno}: non-integer field") from None
        u, v = vals[0], vals[1]
        if u >= v:
            raise InvalidArgument(f"line {lineno}: edges must be written with u < v")
        edges.append((u, v))
        if weighted:
            weights[(u, v)] = vals[2]
    if len(edges) != m:
        raise InvalidArgument(f"header announces {m} edges, found {len(edges)}")
    if len(set(edges)) != m:
        raise InvalidArgument("duplicate edge in edge list")
    g = Graph(n, edges)
    return (g, weights) if weighted else g


def write_edge_list(g: Graph, fh: TextIO, weights: Mapping[Edge, int] | None = None) -> None:
    fh.write(f"{g.n} {g.m}\n")
    for u, v in g.edge_list():
        if weights is None:
            fh.write(f"{u} {v}\n")
        else:
            fh.write(f"{u} {v} {weights[(u, v)]}\n")
