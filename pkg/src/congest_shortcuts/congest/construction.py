"""Distributed shortcut construction, run phase by phase on the simulator.

Phases:

* ``identify`` finds the large parts (loosely, by bounded flooding);
* ``step1`` is one round in which large-part nodes claim their incident
  edges and announce their part id to all neighbors;
* ``seed`` (d=4 only) elects node 0 and broadcasts the hash seed;
* ``sample`` makes the step-2 coin flips locally and informs the other
  endpoint of each chosen edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InvalidArgument
from ..graph import Graph, norm_edge
from ..instances import Partition
from ..shortcuts import (KwiseHash, Shortcut, ShortcutConfig, _check_diameter, default_prime, hash_degree,
                         hash_range, kappa)
from .programs import AnnounceParts, IdentifyLarge, SampleAndNotify, SeedBroadcast
from .sim import SimConfig, SimTrace, run

# stream keys that keep node randomness of different phases apart
SAMPLE_KEY = 1


def identify_radius(d: int, n: int, sc_cfg: ShortcutConfig) -> int:
    """Flooding radius: ceil(kappa_d), or the large-threshold override."""
    if sc_cfg.large_threshold_override is not None:
        return sc_cfg.large_threshold_override
    return math.ceil(kappa(d, n))


def dist_identify_large(g: Graph, parts: Partition, d: int, cfg: SimConfig = SimConfig(),
                        sc_cfg: ShortcutConfig = ShortcutConfig()) -> tuple[list[bool], SimTrace]:
    """Per-node flags "my part is large". Uses at most ``2R + 1`` rounds."""
    R = identify_radius(d, g.n, sc_cfg)
    trace = run(IdentifyLarge, g, parts, cfg, phase="identify", extra_globals={"radius": R})
    return [bool(x) for x in trace.outputs], trace


def large_parts_from_flags(parts: Partition, flags: list[bool]) -> set[int]:
    owner = parts.part_of
    return {owner[v] for v, f in enumerate(flags) if f and owner[v] is not None}


@dataclass(frozen=True)
class HashParams:
    t: int
    domain_size: int
    range_size: int
    prime: int

    @property
    def seed_bits(self) -> int:
        return max(1, (self.prime ** self.t - 1).bit_length())

    def draw_seed(self, rng) -> int:
        """Seed integer whose base-prime digits match the centralized draw."""
        coeffs = rng.integers(0, self.prime, size=self.t).tolist()
        return KwiseHash.from_coefficients(coeffs, self.domain_size, self.range_size, self.prime).seed

    def build(self, seed: int) -> KwiseHash:
        return KwiseHash.from_seed(seed, self.t, self.domain_size, self.range_size, self.prime)


def hash_params(n: int, num_parts: int, sc_cfg: ShortcutConfig) -> HashParams:
    domain = max(1, num_parts) * n
    rng_size = hash_range(n, sc_cfg)
    return HashParams(hash_degree(n, sc_cfg), domain, rng_size, default_prime(domain, rng_size))


def dist_build_shortcut(g: Graph, parts: Partition, d: int, cfg: SimConfig = SimConfig(),
                        sc_cfg: ShortcutConfig = ShortcutConfig()) -> tuple[Shortcut, SimTrace]:
    if d not in (3, 4):
        raise InvalidArgument(f"d must be 3 or 4, got {d}")
    _check_diameter(g, d, sc_cfg)
    cfg = cfg.with_(seed=sc_cfg.seed)
    flags, trace = dist_identify_large(g, parts, d, cfg, sc_cfg)
    owner = parts.part_of

    step1 = run(AnnounceParts, g, parts, cfg, inputs=flags, phase="step1")
    trace.extend(step1)
    claims = [frozenset() for _ in parts]
    claimed: list[set] = [set() for _ in parts]
    closed: list[set[int]] = []
    for v, (edges, heard) in enumerate(step1.outputs):
        if edges:
            claimed[owner[v]].update(edges)
        mine = set(heard)
        if flags[v]:
            mine.add(owner[v])
        closed.append(mine)
    claims = tuple(frozenset(c) for c in claimed)

    h = None
    if d == 4:
        params = hash_params(g.n, len(parts), sc_cfg)
        seed_trace = run(SeedBroadcast, g, parts, cfg, phase="seed",
                         extra_globals={"seed_bits": params.seed_bits, "draw_seed": params.draw_seed})
        trace.extend(seed_trace)
        seeds = {out[0] for out in seed_trace.outputs}
        if len(seeds) != 1:
            raise InvalidArgument("seed broadcast left nodes disagreeing")
        h = params.build(seeds.pop())

    sample = run(SampleAndNotify, g, parts, cfg, inputs=closed, phase="sample",
                 extra_globals={"d": d, "hash": h}, phase_key=SAMPLE_KEY)
    trace.extend(sample)
    picked: list[set] = [set() for _ in parts]
    for v, (picks, _) in enumerate(sample.outputs):
        for part, u in picks:
            picked[part].add(norm_edge(v, u))
    trace.outputs = [{"large": flags[v], "closed_parts": sorted(closed[v]),
                      "step2": sorted(sample.outputs[v][0]), "told": sorted(sample.outputs[v][1])}
                     for v in range(g.n)]
    return Shortcut(claims, tuple(frozenset(p) for p in picked)), trace
