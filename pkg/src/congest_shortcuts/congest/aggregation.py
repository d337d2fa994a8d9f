"""Partwise aggregation over a shortcut.

Every part ``i`` runs an echo wave with extinction on ``G_i = P_i + H_i``:
each part node starts a wave named by its id after the part's start delay,
a node joins the smallest wave it has seen, and only the wave of the part's
minimum id can collect echoes from the whole of ``G_i``. Its root then
knows the fold and sends it back down the wave's tree.

Messages carry the part id, a 2-bit kind, and (by kind) a wave id and/or a
value with a presence bit. Every directed edge has a FIFO of pending
part-messages and packs as many as fit into ``B`` bits per round. A queued
wave or echo that belongs to a superseded (larger) wave of the same part is
dropped when the newer one is queued.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import reduce
from typing import Any, Callable, Sequence

from ..errors import InvalidArgument
from ..graph import is_infinite, subgraph_diameter
from ..instances import Partition
from ..rng import PART, stream
from ..shortcuts import Shortcut
from .programs import NodeProgram
from .sim import SimConfig, SimTrace, id_bits, run

WAVE, ECHO, RESULT = 0, 1, 2
KIND_BITS = 2
SUM_MODULUS = 2 ** 64


@dataclass(frozen=True)
class AggOp:
    name: str
    fn: Callable[[Any, Any], Any]
    value_bits: Callable[[Sequence], int]

    def fold(self, a, b):
        if a is None:
            return b
        if b is None:
            return a
        return self.fn(a, b)


def _int_bits(values) -> int:
    return max([1] + [int(v).bit_length() for v in values])


def _pair_bits(values) -> int:
    return _int_bits([v[0] for v in values]) + _int_bits([v[1] for v in values])


AGG_OPS = {
    "min": AggOp("min", min, _int_bits),
    "max": AggOp("max", max, _int_bits),
    "sum": AggOp("sum", lambda a, b: (a + b) % SUM_MODULUS, lambda values: 64),
    # lexicographic minimum of (key, id) pairs
    "id-of-min": AggOp("id-of-min", min, _pair_bits),
}


def get_op(op) -> AggOp:
    if isinstance(op, AggOp):
        return op
    try:
        return AGG_OPS[op]
    except KeyError:
        raise InvalidArgument(f"unknown aggregation {op!r}; known: {', '.join(AGG_OPS)}") from None


def aggregation_fold_oracle(parts: Partition, op, inputs: Sequence) -> list:
    """Centralized answer: every part node gets the fold of its part's inputs."""
    op = get_op(op)
    out: list = [None] * parts.n
    for p in parts:
        total = reduce(op.fold, (inputs[v] for v in sorted(p)), None)
        for v in p:
            out[v] = total
    return out


def message_bits(kind: int, idbits: int, value_bits: int) -> int:
    bits = idbits + KIND_BITS
    if kind in (WAVE, ECHO):
        bits += idbits
    if kind in (ECHO, RESULT):
        bits += value_bits + 1
    return bits


def min_bandwidth_factor(n: int, value_bits: int) -> int:
    """Smallest factor whose ``B`` fits the largest aggregation message."""
    ib = id_bits(n)
    need = max(message_bits(k, ib, value_bits) for k in (WAVE, ECHO, RESULT))
    return -(-need // ib)


class AggregateNode(NodeProgram):
    """Local input: ``(input value or None, {part: (G_i neighbors, start delay or None)})``."""

    def init(self, view):
        self.view = view
        self.op: AggOp = view.globals["op"]
        self.vbits = view.globals["value_bits"]
        value, parts = view.local or (None, {})
        self.value = value
        self.nbrs = {i: nb for i, (nb, _) in parts.items()}
        self.delay = {i: d for i, (_, d) in parts.items() if d is not None}
        self.wave: dict[int, int | None] = {i: None for i in parts}
        self.parent: dict[int, int | None] = {}
        self.pending: dict[int, int] = {}
        self.agg: dict[int, Any] = {}
        self.children: dict[int, list[int]] = {i: [] for i in parts}
        self.result: dict[int, Any] = {}
        self.queues: dict[int, deque] = {}
        for i, nb in self.nbrs.items():
            if not nb and i in self.delay:
                self.result[i] = value
        self._check_halt()

    # queueing
    def _enqueue(self, u, msg):
        q = self.queues.setdefault(u, deque())
        part, kind, wave = msg[0], msg[1], msg[2]
        if kind != RESULT and any(m[0] == part and m[1] != RESULT and m[2] > wave for m in q):
            self.queues[u] = q = deque(m for m in q if not (m[0] == part and m[1] != RESULT and m[2] > wave))
        q.append(msg)

    def _bits(self, msg):
        return message_bits(msg[1], self.view.idbits, self.vbits)

    # the wave protocol
    def _join(self, i, wave, parent):
        self.wave[i] = wave
        self.parent[i] = parent
        self.children[i] = []
        self.agg[i] = self.value if i in self.delay else None
        targets = [u for u in self.nbrs[i] if u != parent]
        self.pending[i] = len(targets)
        for u in targets:
            self._enqueue(u, (i, WAVE, wave, None))
        if not targets:
            self._complete(i)

    def _complete(self, i):
        parent = self.parent[i]
        if parent is None:
            self._deliver(i, self.agg[i])
        else:
            self._enqueue(parent, (i, ECHO, self.wave[i], self.agg[i]))

    def _deliver(self, i, value):
        self.result[i] = value
        for c in self.children[i]:
            self._enqueue(c, (i, RESULT, -1, value))

    def _reply(self, i):
        self.pending[i] -= 1
        if self.pending[i] == 0:
            self._complete(i)

    def send(self, rnd):
        v = self.view
        for i, d in self.delay.items():
            if rnd > d and i not in self.result and (self.wave[i] is None or self.wave[i] > v.id):
                self._join(i, v.id, None)
        out = []
        for u in sorted(self.queues):
            q = self.queues[u]
            batch, used = [], 0
            while q:
                size = self._bits(q[0])
                if batch and used + size > v.B:
                    break
                batch.append(q.popleft())
                used += size
            if batch:
                out.append((u, batch, used))
        return out

    def receive(self, rnd, inbox):
        me = self.view.id
        for src, batch in inbox:
            for i, kind, wave, value in batch:
                if i in self.result and kind != RESULT:
                    continue
                if kind == WAVE:
                    cur = self.wave[i]
                    if cur is None or wave < cur:
                        if i in self.delay and wave > me:
                            # an initiator meeting a larger wave starts its own
                            self._join(i, me, None)
                            continue
                        self._join(i, wave, src)
                    elif wave == cur:
                        self._reply(i)
                elif kind == ECHO:
                    if wave == self.wave[i]:
                        self.agg[i] = self.op.fold(self.agg[i], value)
                        self.children[i].append(src)
                        self._reply(i)
                elif i not in self.result:
                    self._deliver(i, value)
        self._check_halt()

    def _check_halt(self):
        if len(self.result) == len(self.nbrs) and not any(
                m[1] == RESULT for q in self.queues.values() for m in q):
            self.halted = True

    def output(self):
        part = self.view.part
        return self.result.get(part) if part is not None else None


@dataclass
class AggregationResult:
    outputs: list
    trace: SimTrace
    failed_parts: list[int]
    delays: list[int]


def partwise_aggregate(g, parts: Partition, sc: Shortcut, op, inputs: Sequence,
                       cfg: SimConfig = SimConfig(), random_delays: bool = True) -> AggregationResult:
    """Fold ``inputs`` inside every part over the shortcut ``sc``.

    Parts whose ``P_i + H_i`` is disconnected cannot be aggregated; they are
    listed in ``failed_parts`` and their nodes output None.
    """
    op = get_op(op)
    if len(sc) != len(parts):
        raise InvalidArgument(f"{len(parts)} parts but {len(sc)} shortcut sets")
    if len(inputs) != g.n:
        raise InvalidArgument("need one input slot per node")
    for p in parts:
        for v in p:
            if inputs[v] is None:
                raise InvalidArgument(f"part node {v} has no input")
    from ..audit import part_subgraph

    sc.validate(g)
    members = [v for p in parts for v in p]
    vbits = op.value_bits([inputs[v] for v in members]) if members else 1
    local_parts: list[dict] = [dict() for _ in range(g.n)]
    failed = []
    congestion: dict = {}
    subgraphs = []
    for i, (p, h) in enumerate(zip(parts, sc.per_part)):
        nodes, edges = part_subgraph(g, p, h)
        if is_infinite(subgraph_diameter(nodes, edges)):
            failed.append(i)
            subgraphs.append(None)
            continue
        subgraphs.append((nodes, edges))
        for e in edges:
            congestion[e] = congestion.get(e, 0) + 1
    c = max(congestion.values(), default=0)
    delays = []
    for i, sub in enumerate(subgraphs):
        delay = int(stream(cfg.seed, PART, i).integers(0, c + 1)) if random_delays else 0
        delays.append(delay)
        if sub is None:
            continue
        nodes, edges = sub
        nb: dict[int, list[int]] = {v: [] for v in nodes}
        for a, b in edges:
            nb[a].append(b)
            nb[b].append(a)
        for v in nodes:
            local_parts[v][i] = (tuple(sorted(nb[v])), delay if v in parts[i] else None)
    local = [(inputs[v], local_parts[v]) for v in range(g.n)]
    trace = run(AggregateNode, g, parts, cfg, inputs=local, phase="aggregate",
                extra_globals={"op": op, "value_bits": vbits})
    outputs = list(trace.outputs)
    owner = parts.part_of
    for v in range(g.n):
        if owner[v] in failed:
            outputs[v] = None
    return AggregationResult(outputs, trace, failed, delays)
