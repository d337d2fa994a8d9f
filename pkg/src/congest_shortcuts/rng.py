"""Seeded random streams. Every stream is a pure function of (seed, key)."""

from __future__ import annotations

import numpy as np

CENTRAL = 0
NODE = 1
PART = 2


def stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def node_rng(seed: int, node: int) -> np.random.Generator:
    return stream(seed, NODE, node)


def central_rng(seed: int) -> np.random.Generator:
    return stream(seed, CENTRAL)
