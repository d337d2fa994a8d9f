"""Minimum spanning trees: a Kruskal oracle and Boruvka over partwise aggregation.

Each Boruvka phase treats the current fragments as the parts, builds a
shortcut for them on the simulator, and aggregates every fragment's
minimum-weight outgoing edge with the ``id-of-min`` fold over
``(weight, edge index)`` pairs. Fragments are then merged along the chosen
edges; a merged fragment is named by its smallest node id.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Mapping

from .congest.aggregation import AGG_OPS, min_bandwidth_factor, partwise_aggregate
from .congest.construction import dist_build_shortcut
from .congest.programs import AnnounceParts, SendIdOnce
from .congest.sim import SimConfig, SimTrace, run
from .errors import InvalidArgument, NoSpanningTree
from .graph import Edge, Graph, norm_edge
from .instances import Partition
from .shortcuts import Shortcut, ShortcutConfig

CHORDAL = "CHORDAL"
SCHEMES = (3, 4, CHORDAL)


@dataclass(frozen=True)
class WeightedGraph:
    graph: Graph
    weights: Mapping[Edge, int] = field(hash=False)

    def __post_init__(self):
        if set(self.weights) != set(self.graph.edges):
            raise InvalidArgument("weights must be given for exactly the graph's edges")
        vals = list(self.weights.values())
        if any(not isinstance(w, int) or w < 1 for w in vals):
            raise InvalidArgument("weights must be positive integers")
        if len(set(vals)) != len(vals):
            raise InvalidArgument("weights must be distinct")

    def weight(self, u: int, v: int) -> int:
        return self.weights[norm_edge(u, v)]


@dataclass
class MstResult:
    edges: frozenset
    weight: int
    phases: int = 0
    traces: list[SimTrace] = field(default_factory=list)
    fragments: list[Partition] = field(default_factory=list)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra > rb:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def assign_random_weights(g: Graph, seed) -> WeightedGraph:
    """Weights 1..m in a seeded random order over the sorted edge list."""
    ws = list(range(1, g.m + 1))
    random.Random(seed).shuffle(ws)
    return WeightedGraph(g, dict(zip(g.edge_list(), ws)))


def kruskal_oracle(wg: WeightedGraph) -> MstResult:
    g = wg.graph
    uf = _UnionFind(g.n)
    chosen = []
    for e in sorted(g.edges, key=lambda e: wg.weights[e]):
        if uf.union(*e):
            chosen.append(e)
    if len(chosen) != g.n - 1:
        raise NoSpanningTree("graph is disconnected")
    return MstResult(frozenset(chosen), sum(wg.weights[e] for e in chosen))


def mst_bandwidth_factor(wg: WeightedGraph) -> int:
    """Smallest bandwidth factor that fits one (weight, edge index) aggregation message."""
    top = max(wg.weights.values(), default=1) + 1
    sample = [(top, max(wg.graph.m, 1))]
    return min_bandwidth_factor(wg.graph.n, AGG_OPS["id-of-min"].value_bits(sample))


def _fragments(uf: _UnionFind, n: int) -> Partition:
    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(uf.find(v), []).append(v)
    return Partition.from_sets(n, (groups[r] for r in sorted(groups)))


def mwoe_oracle(wg: WeightedGraph, parts: Partition) -> list[Edge | None]:
    """Per fragment, its lightest edge to another fragment."""
    owner = parts.part_of
    best: list[Edge | None] = [None] * len(parts)
    for e in wg.graph.edges:
        a, b = owner[e[0]], owner[e[1]]
        if a == b:
            continue
        for f in (a, b):
            if best[f] is None or wg.weights[e] < wg.weights[best[f]]:
                best[f] = e
    return best


def boruvka_distributed(wg: WeightedGraph, scheme, cfg: SimConfig = SimConfig(),
                        sc_cfg: ShortcutConfig = ShortcutConfig(), check_phases: bool = True) -> MstResult:
    """Boruvka where every fragment finds its lightest outgoing edge by
    partwise aggregation over a shortcut built with ``scheme`` (3, 4 or CHORDAL).
    """
    if scheme not in SCHEMES:
        raise InvalidArgument(f"scheme must be one of {SCHEMES}")
    g = wg.graph
    need = mst_bandwidth_factor(wg)
    if cfg.bandwidth_factor < need:
        raise InvalidArgument(f"bandwidth factor {cfg.bandwidth_factor} too small; need {need}")
    kruskal_oracle(wg)  # connectivity check
    edges = g.edge_list()
    index = {e: k for k, e in enumerate(edges)}
    sentinel = (max(wg.weights.values(), default=0) + 1, len(edges))
    uf = _UnionFind(g.n)
    chosen: set[Edge] = set()
    traces, history = [], []
    phase = 0
    while True:
        parts = _fragments(uf, g.n)
        if len(parts) == 1:
            break
        phase += 1
        history.append(parts)
        owner = parts.part_of
        phase_cfg = cfg.with_(seed=cfg.seed * 1_000_003 + phase)

        # nodes learn their neighbors' fragments
        trace = run(_SendFragment, g, parts, phase_cfg, inputs=owner, phase="fragments")
        inputs = []
        for v in range(g.n):
            best = sentinel
            for u, f in trace.outputs[v]:
                if f != owner[v]:
                    best = min(best, (wg.weight(u, v), index[norm_edge(u, v)]))
            inputs.append(best)

        if scheme == CHORDAL:
            st = run(AnnounceParts, g, parts, phase_cfg, inputs=[True] * g.n, phase="step1")
            claimed: list[set] = [set() for _ in parts]
            for v, (es, _) in enumerate(st.outputs):
                claimed[owner[v]].update(es)
            sc = Shortcut.from_edge_sets(claimed)
            trace.extend(st)
        else:
            sc, st = dist_build_shortcut(g, parts, scheme, phase_cfg,
                                         ShortcutConfig(seed=phase_cfg.seed,
                                                        large_threshold_override=sc_cfg.large_threshold_override,
                                                        hash_degree_cap=sc_cfg.hash_degree_cap,
                                                        hash_range_override=sc_cfg.hash_range_override,
                                                        strict_diameter=sc_cfg.strict_diameter))
            trace.extend(st)

        agg = partwise_aggregate(g, parts, sc, "id-of-min", inputs, phase_cfg)
        if agg.failed_parts:
            raise InvalidArgument(f"aggregation impossible for parts {agg.failed_parts}")
        trace.extend(agg.trace)
        traces.append(trace)

        picks = []
        for i, p in enumerate(parts):
            res = {agg.outputs[v] for v in p}
            if len(res) != 1:
                raise InvalidArgument(f"fragment {i} nodes disagree on its outgoing edge")
            val = res.pop()
            picks.append(None if val == sentinel else edges[val[1]])
        if check_phases and picks != mwoe_oracle(wg, parts):
            raise InvalidArgument(f"phase {phase}: aggregated outgoing edges differ from the oracle")
        for e in picks:
            if e is not None and uf.union(*e):
                chosen.add(e)
    return MstResult(frozenset(chosen), sum(wg.weights[e] for e in chosen), phase, traces, history)


class _SendFragment(SendIdOnce):
    """One round: tell every neighbor the own fragment id."""

    def send(self, rnd):
        v = self.view
        return [(u, v.local, v.idbits) for u in v.neighbors]

    def receive(self, rnd, inbox):
        self.heard = inbox
        self.halted = True


def phase_bound(n: int) -> int:
    return max(1, math.ceil(math.log2(n))) if n > 1 else 0
