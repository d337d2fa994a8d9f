"""Node programs for the simulator, plus a name registry for the CLI."""

from __future__ import annotations

import math
from collections import deque

from ..errors import InvalidArgument
from ..rng import node_rng


class NodeProgram:
    """Base class: does nothing and halts at once."""

    halted = False

    def init(self, view):
        self.view = view

    def send(self, rnd):
        return ()

    def receive(self, rnd, inbox):
        pass

    def output(self):
        return None


class SendIdOnce(NodeProgram):
    """Send the own id to every neighbor in round 1, then halt."""

    def send(self, rnd):
        v = self.view
        return [(u, v.id, v.idbits) for u in v.neighbors]

    def receive(self, rnd, inbox):
        self.heard = [src for src, _ in inbox]
        self.halted = True

    def output(self):
        return self.heard


class FloodMin(NodeProgram):
    """Global min-id flooding for ``D`` rounds.

    Output is ``(min id, parent)``; the parent is the smallest-id neighbor
    that delivered the final minimum first, so the parents form a BFS tree
    rooted at node 0.
    """

    def init(self, view):
        self.view = view
        self.best = view.id
        self.parent = None
        self.changed = True
        self.rounds = view.globals["D"]
        if self.rounds is None:
            raise InvalidArgument("flooding needs a connected graph")
        self.halted = self.rounds == 0

    def send(self, rnd):
        if not self.changed:
            return ()
        self.changed = False
        v = self.view
        return [(u, self.best, v.idbits) for u in v.neighbors]

    def receive(self, rnd, inbox):
        for src, val in inbox:
            if val < self.best:
                self.best, self.parent, self.changed = val, src, True
        if rnd >= self.rounds:
            self.halted = True

    def output(self):
        return (self.best, self.parent)


class IdentifyLarge(NodeProgram):
    """Loose large-part detection inside each part.

    ``R`` rounds of min-id flooding over part edges, one round comparing
    minima across part edges, then ``R`` rounds spreading a 1-bit "large"
    signal. Globals: ``radius`` (R).
    """

    def init(self, view):
        self.view = view
        self.R = view.globals["radius"]
        self.best = view.id
        self.changed = True
        self.large = False
        self.signalled = False
        self.halted = view.part is None or not view.part_neighbors

    def send(self, rnd):
        v = self.view
        if rnd <= self.R:
            if not self.changed:
                return ()
            self.changed = False
            return [(u, self.best, v.idbits) for u in v.part_neighbors]
        if rnd == self.R + 1:
            return [(u, self.best, v.idbits) for u in v.part_neighbors]
        if self.large and not self.signalled:
            self.signalled = True
            return [(u, 1, 1) for u in v.part_neighbors]
        return ()

    def receive(self, rnd, inbox):
        if rnd <= self.R:
            for _, val in inbox:
                if val < self.best:
                    self.best, self.changed = val, True
        elif rnd == self.R + 1:
            if any(val != self.best for _, val in inbox):
                self.large = True
        elif inbox:
            self.large = True
        if rnd >= 2 * self.R + 1:
            self.halted = True

    def output(self):
        return self.large


class AnnounceParts(NodeProgram):
    """One round: nodes of flagged parts claim their incident edges and tell
    every neighbor their part id.

    Local input: True when the node's part is flagged. Output:
    ``(claimed edges, {part: [neighbors in that part]})``.
    """

    def init(self, view):
        self.view = view
        self.active = bool(view.local) and view.part is not None
        self.heard: dict[int, list[int]] = {}

    def send(self, rnd):
        v = self.view
        if not self.active:
            return ()
        return [(u, v.part, v.idbits) for u in v.neighbors]

    def receive(self, rnd, inbox):
        for src, part in inbox:
            self.heard.setdefault(part, []).append(src)
        self.halted = True

    def output(self):
        v = self.view
        claimed = [(min(v.id, u), max(v.id, u)) for u in v.neighbors] if self.active else []
        return (claimed, self.heard)


def chunk_bits(total_bits: int, B: int) -> list[int]:
    """Sizes of the ``B``-bit chunks carrying a ``total_bits`` payload."""
    full, rest = divmod(total_bits, B)
    return [B] * full + ([rest] if rest else [])


class SeedBroadcast(NodeProgram):
    """Elect node 0 by ``D`` rounds of min-id flooding, then pipeline the
    leader's hash seed down the flooding tree in ``B``-bit chunks.

    Globals: ``seed_bits`` and ``draw_seed``, a function mapping the
    leader's random stream to the seed integer.
    """

    def init(self, view):
        self.view = view
        self.D = view.globals["D"]
        if self.D is None:
            raise InvalidArgument("seed broadcast needs a connected graph")
        self.best = view.id
        self.parent = None
        self.changed = True
        self.sizes = chunk_bits(view.globals["seed_bits"], view.B)
        self.chunks: list[int] = []
        self.outbox: deque = deque()
        self.value = None
        self.is_leader = False
        if self.D == 0:
            self._finish_flood()

    def _finish_flood(self):
        v = self.view
        if self.best == v.id:
            self.is_leader = True
            self.value = v.globals["draw_seed"](node_rng(v.seed, v.id))
            rest = self.value
            for size in self.sizes:
                self.outbox.append((rest & ((1 << size) - 1), size))
                rest >>= size
        if not self.sizes:
            self.halted = True

    def send(self, rnd):
        v = self.view
        if rnd <= self.D:
            if not self.changed:
                return ()
            self.changed = False
            return [(u, self.best, v.idbits) for u in v.neighbors]
        if not self.outbox:
            return ()
        chunk, size = self.outbox.popleft()
        out = [(u, chunk, size) for u in v.neighbors if u != self.parent]
        if self.is_leader and not self.outbox:
            self.halted = True
        return out

    def receive(self, rnd, inbox):
        if rnd <= self.D:
            for src, val in inbox:
                if val < self.best:
                    self.best, self.parent, self.changed = val, src, True
            if rnd == self.D:
                self._finish_flood()
            return
        if self.is_leader:
            return
        for src, chunk in inbox:
            if src == self.parent:
                self.chunks.append(chunk)
                self.outbox.append((chunk, self.sizes[len(self.chunks) - 1]))
        if len(self.chunks) == len(self.sizes) and self.value is None:
            value, shift = 0, 0
            for chunk, size in zip(self.chunks, self.sizes):
                value |= chunk << shift
                shift += size
            self.value = value
        # halt once the last chunk has been forwarded
        if self.value is not None and not self.outbox:
            self.halted = True

    def output(self):
        return (self.value, self.best, self.parent)


class SampleAndNotify(NodeProgram):
    """Local step-2 sampling, then tell each chosen edge's other endpoint.

    Local input: ``{part: True}`` for every flagged part whose closed
    neighborhood contains the node. Globals: ``d``, ``n``, ``hash`` (the
    shared hash for d=4, else None).

    Round 1 carries, on every edge with picks, how many part ids follow;
    the ids themselves follow one per ``idbits`` in later rounds.
    """

    def init(self, view):
        self.view = view
        g = view.globals
        rng = view.rng()
        self.picks: list[tuple[int, int]] = []  # (part, neighbor)
        nbrs = view.neighbors
        if g["d"] == 3:
            q = 1.0 / math.sqrt(g["n"])
        for part in sorted(view.local or ()):
            if not nbrs:
                break
            coins = rng.random(len(nbrs))
            if g["d"] == 3:
                probs = [q] * len(nbrs)
            else:
                h = g["hash"]
                probs = [1.0 / v for v in h.eval_many([part * g["n"] + u for u in nbrs]).tolist()]
            for u, c, p in zip(nbrs, coins.tolist(), probs):
                if c < p:
                    self.picks.append((part, u))
        self.queues: dict[int, deque] = {}
        for part, u in self.picks:
            self.queues.setdefault(u, deque()).append(part)
        if any(len(q) >= 2 ** view.idbits for q in self.queues.values()):
            raise InvalidArgument("too many picks on one edge to announce in one id-sized count")
        self.expect: dict[int, int] = {}
        self.got: list[tuple[int, int]] = []  # (part, neighbor) learned from neighbors
        self.per_round = max(1, view.B // view.idbits)

    def send(self, rnd):
        v = self.view
        if rnd == 1:
            return [(u, len(q), v.idbits) for u, q in self.queues.items()]
        out = []
        for u, q in self.queues.items():
            for _ in range(min(self.per_round, len(q))):
                out.append((u, q.popleft(), v.idbits))
        return out

    def receive(self, rnd, inbox):
        if rnd == 1:
            for src, count in inbox:
                self.expect[src] = count
        else:
            for src, part in inbox:
                self.got.append((part, src))
                self.expect[src] -= 1
        done_in = all(c == 0 for c in self.expect.values())
        done_out = all(not q for q in self.queues.values())
        if done_in and done_out:
            self.halted = True

    def output(self):
        return (self.picks, self.got)


PROGRAMS = {
    "send-id-once": SendIdOnce,
    "flood-min": FloodMin,
    "identify-large": IdentifyLarge,
    "announce-parts": AnnounceParts,
    "seed-broadcast": SeedBroadcast,
    "sample-and-notify": SampleAndNotify,
}


def register(name: str, factory) -> None:
    PROGRAMS[name] = factory


def get_program(name: str):
    try:
        return PROGRAMS[name]
    except KeyError:
        raise InvalidArgument(f"unknown program {name!r}; known: {', '.join(sorted(PROGRAMS))}") from None
