"""Synchronous lock-step CONGEST simulator.

A node program is an object with

* ``init(view)``: called once before round 1;
* ``send(round) -> list of (neighbor, payload, bits)``;
* ``receive(round, inbox)`` with ``inbox`` a list of ``(sender, payload)``
  sorted by sender;
* a boolean attribute ``halted``, checked after every round;
* ``output()``, the node's final answer.

In each round every live node first sends, then the simulator adds up the
declared bits per directed edge and refuses any edge over budget, then every
live node receives. Messages addressed to halted nodes are dropped.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from ..errors import InvalidArgument, SimulationFault, TimeoutFault
from ..graph import Graph, diameter, is_infinite
from ..instances import Partition
from ..rng import NODE, stream

FORMAT_VERSION = 1


def id_bits(n: int) -> int:
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


@dataclass(frozen=True)
class SimConfig:
    bandwidth_factor: int = 1
    max_rounds: int = 100_000
    seed: int = 0
    record_edge_bits: bool = True
    globals: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.bandwidth_factor < 1:
            raise InvalidArgument("bandwidth_factor must be at least 1")
        if self.max_rounds < 0:
            raise InvalidArgument("max_rounds must be non-negative")

    def bandwidth(self, n: int) -> int:
        return self.bandwidth_factor * id_bits(n)

    def with_(self, **changes) -> "SimConfig":
        fields = dict(bandwidth_factor=self.bandwidth_factor, max_rounds=self.max_rounds, seed=self.seed,
                      record_edge_bits=self.record_edge_bits, globals=self.globals)
        fields.update(changes)
        return SimConfig(**fields)


@dataclass(frozen=True)
class NodeView:
    id: int
    neighbors: tuple[int, ...]
    part: int | None
    part_neighbors: tuple[int, ...]
    B: int
    idbits: int
    globals: Mapping[str, Any]
    local: Any = None
    seed: int = 0
    phase_key: int = 0

    def rng(self, *key: int) -> np.random.Generator:
        """The node's private random stream for this phase."""
        return stream(self.seed, NODE, self.id, self.phase_key, *key)


@dataclass
class RoundRecord:
    round: int
    phase: str
    messages: int
    bits: int
    max_edge_bits: int
    edge_bits: dict | None = None

    def to_dict(self) -> dict:
        d = {"round": self.round, "phase": self.phase, "messages": self.messages,
             "bits": self.bits, "max_edge_bits": self.max_edge_bits}
        if self.edge_bits is not None:
            d["edges"] = [[u, v, b] for (u, v), b in sorted(self.edge_bits.items())]
        return d


def _jsonable(x):
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (np.integer,)):
        return int(x)
    if is_infinite(x):
        return "INFINITE"
    return x


@dataclass
class SimTrace:
    B: int
    rounds: list[RoundRecord] = field(default_factory=list)
    phases: dict[str, int] = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    @property
    def rounds_used(self) -> int:
        return len(self.rounds)

    @property
    def max_edge_bits(self) -> int:
        return max((r.max_edge_bits for r in self.rounds), default=0)

    def bandwidth_ok(self) -> bool:
        return all(r.max_edge_bits <= self.B for r in self.rounds) and all(
            b <= self.B for r in self.rounds if r.edge_bits for b in r.edge_bits.values())

    def extend(self, other: "SimTrace") -> "SimTrace":
        """Append ``other`` as later phases of the same execution."""
        if other.B != self.B:
            raise InvalidArgument("cannot join traces with different bandwidths")
        offset = len(self.rounds)
        for r in other.rounds:
            self.rounds.append(RoundRecord(r.round + offset, r.phase, r.messages, r.bits,
                                           r.max_edge_bits, r.edge_bits))
        for name, count in other.phases.items():
            self.phases[name] = self.phases.get(name, 0) + count
        self.outputs = other.outputs
        return self

    def summary(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "B": self.B,
            "rounds_used": self.rounds_used,
            "phases": dict(self.phases),
            "max_edge_bits": self.max_edge_bits,
            "total_bits": sum(r.bits for r in self.rounds),
            "outputs": _jsonable(self.outputs),
        }

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.to_dict()) + "\n" for r in self.rounds)

    def to_json(self) -> str:
        return json.dumps(self.summary())


ProgramFactory = Callable[[], Any]


def _views(g: Graph, parts: Partition | None, cfg: SimConfig, inputs, extra_globals, phase_key):
    owner = parts.part_of if parts is not None else [None] * g.n
    glob = {"n": g.n}
    glob.update(cfg.globals)
    if extra_globals:
        glob.update(extra_globals)
    if "D" not in glob:
        d = diameter(g)
        glob["D"] = None if is_infinite(d) else d
    glob = MappingProxyType(glob)
    B, ib = cfg.bandwidth(g.n), id_bits(g.n)
    out = []
    for v in range(g.n):
        nb = g.adj(v)
        pn = tuple(u for u in nb if owner[v] is not None and owner[u] == owner[v])
        local = inputs[v] if inputs is not None else None
        out.append(NodeView(v, nb, owner[v], pn, B, ib, glob, local, cfg.seed, phase_key))
    return out


def run(program: ProgramFactory | str, g: Graph, parts: Partition | None = None,
        cfg: SimConfig = SimConfig(), inputs: Sequence | None = None, phase: str = "main",
        extra_globals: Mapping[str, Any] | None = None, phase_key: int = 0) -> SimTrace:
    """Execute ``program`` on every node of ``g`` until all nodes halt."""
    if isinstance(program, str):
        from .programs import get_program
        program = get_program(program)
    if inputs is not None and len(inputs) != g.n:
        raise InvalidArgument(f"need one input per node, got {len(inputs)} for n={g.n}")
    views = _views(g, parts, cfg, inputs, extra_globals, phase_key)
    B = views[0].B
    nodes = []
    for view in views:
        p = program()
        p.init(view)
        nodes.append(p)
    adj = [set(g.adj(v)) for v in range(g.n)]
    trace = SimTrace(B)
    live = [v for v in range(g.n) if not nodes[v].halted]
    rnd = 0
    while live:
        if rnd >= cfg.max_rounds:
            raise TimeoutFault(f"{len(live)} nodes still running after {cfg.max_rounds} rounds",
                               round=rnd)
        rnd += 1
        alive = set(live)
        inbox: dict[int, list] = {}
        edge_bits: dict[tuple[int, int], int] = {}
        count = 0
        for v in live:
            for dest, payload, bits in nodes[v].send(rnd) or ():
                if dest not in adj[v]:
                    raise SimulationFault(f"node {v} sent to non-neighbor {dest}", round=rnd, edge=(v, dest))
                if bits < 0:
                    raise SimulationFault("negative message size", round=rnd, edge=(v, dest))
                total = edge_bits.get((v, dest), 0) + bits
                if total > B:
                    raise SimulationFault(f"{total} bits on edge {v}->{dest} exceed B={B}",
                                          round=rnd, edge=(v, dest))
                edge_bits[(v, dest)] = total
                count += 1
                if dest in alive:
                    inbox.setdefault(dest, []).append((v, payload))
        for v in live:
            msgs = inbox.get(v, [])
            msgs.sort(key=lambda m: m[0])
            nodes[v].receive(rnd, msgs)
        trace.rounds.append(RoundRecord(rnd, phase, count, sum(edge_bits.values()),
                                        max(edge_bits.values(), default=0),
                                        edge_bits if cfg.record_edge_bits else None))
        live = [v for v in live if not nodes[v].halted]
    trace.phases[phase] = rnd
    trace.outputs = [p.output() for p in nodes]
    return trace
