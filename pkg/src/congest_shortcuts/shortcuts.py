"""Centralized shortcut constructions.

* :func:`one_hop_extension` gives every part all edges incident to it.
* :func:`build_shortcut_d3` / :func:`build_shortcut_d4` act on large parts
  only: the one-hop edges (step 1) plus randomly sampled edges around the
  part's closed neighborhood (step 2). For ``d = 4`` the sampling
  probabilities come from a shared k-wise independent polynomial hash.

Logarithms are base 2 throughout. Shortcut JSON layout::

    {"version": 1, "parts": [[[u, v, "STEP1"], [u, v, "STEP2"], ...], ...]}

where the tag names the first step that added the edge to that part.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgument, PreconditionViolated
from .graph import Edge, Graph, diameter, norm_edge
from .instances import Partition
from .rng import central_rng, node_rng

STEP1 = "STEP1"
STEP2 = "STEP2"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Shortcut:
    """Per-part shortcut edge sets H_i, split by the step that produced them.

    ``step2`` keeps the full sampled set, so an edge can sit in both.
    """

    step1: tuple[frozenset, ...]
    step2: tuple[frozenset, ...]

    @classmethod
    def empty(cls, num_parts: int) -> "Shortcut":
        e = tuple(frozenset() for _ in range(num_parts))
        return cls(e, e)

    @classmethod
    def from_edge_sets(cls, sets: Sequence[Iterable[Edge]]) -> "Shortcut":
        s1 = tuple(frozenset(norm_edge(*e) for e in s) for s in sets)
        return cls(s1, tuple(frozenset() for _ in s1))

    @property
    def per_part(self) -> tuple[frozenset, ...]:
        return tuple(a | b for a, b in zip(self.step1, self.step2))

    def __len__(self) -> int:
        return len(self.step1)

    def provenance(self, i: int, e: Edge) -> str:
        e = norm_edge(*e)
        if e in self.step1[i]:
            return STEP1
        if e in self.step2[i]:
            return STEP2
        raise KeyError(f"edge {e} is not in H_{i}")

    def to_json(self) -> str:
        parts = []
        for i, edges in enumerate(self.per_part):
            parts.append([[u, v, self.provenance(i, (u, v))] for u, v in sorted(edges)])
        return json.dumps({"version": FORMAT_VERSION, "parts": parts})

    @classmethod
    def from_json(cls, text: str) -> "Shortcut":
        """Inverse of ``to_json`` up to edges sampled by both steps, which come back as STEP1 only."""
        try:
            doc = json.loads(text)
            if doc.get("version") != FORMAT_VERSION:
                raise InvalidArgument(f"unsupported shortcut format version {doc.get('version')!r}")
            s1, s2 = [], []
            for part in doc["parts"]:
                a, b = set(), set()
                for u, v, tag in part:
                    if tag not in (STEP1, STEP2):
                        raise InvalidArgument(f"unknown provenance tag {tag!r}")
                    (a if tag == STEP1 else b).add(norm_edge(int(u), int(v)))
                s1.append(frozenset(a))
                s2.append(frozenset(b))
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise InvalidArgument(f"malformed shortcut document: {exc}") from None
        return cls(tuple(s1), tuple(s2))

    def validate(self, g: Graph) -> None:
        for i, edges in enumerate(self.per_part):
            for e in edges:
                if e not in g.edges:
                    raise InvalidArgument(f"H_{i} contains {e}, which is not an edge of the graph")


@dataclass(frozen=True)
class ShortcutConfig:
    seed: int = 0
    large_threshold_override: int | None = None
    hash_degree_cap: int = 512
    hash_range_override: int | None = None
    strict_diameter: bool = True
    log_base: int = field(default=2, init=False)

    def __post_init__(self):
        if self.large_threshold_override is not None and self.large_threshold_override < 0:
            raise InvalidArgument("large_threshold_override must be non-negative")
        if self.hash_degree_cap < 1:
            raise InvalidArgument("hash_degree_cap must be positive")
        if self.hash_range_override is not None and self.hash_range_override < 1:
            raise InvalidArgument("hash_range_override must be positive")


def kappa(d: int, n: int) -> float:
    """n ** ((d - 2) / (2d - 2)); n**(1/4) for d=3 and n**(1/3) for d=4."""
    if d not in (3, 4):
        raise InvalidArgument(f"d must be 3 or 4, got {d}")
    if n < 1:
        raise InvalidArgument("n must be positive")
    return n ** ((d - 2) / (2 * d - 2))


def _log2(n: int) -> float:
    return math.log2(n) if n > 1 else 0.0


def large_threshold(d: int, n: int, cfg: ShortcutConfig) -> int:
    if cfg.large_threshold_override is not None:
        return cfg.large_threshold_override
    return math.ceil(12 * kappa(d, n) * _log2(n) ** 3)


def hash_range(n: int, cfg: ShortcutConfig) -> int:
    if cfg.hash_range_override is not None:
        return cfg.hash_range_override
    if n < 2:
        return 2
    return max(2, math.floor(n ** (1 / 3) / _log2(n)))


def hash_degree(n: int, cfg: ShortcutConfig) -> int:
    return max(1, min(math.ceil(n ** (1 / 3) * _log2(n) ** 3), cfg.hash_degree_cap))


# --- k-wise independent hashing -----------------------------------------------

def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def next_prime(q: int) -> int:
    """Smallest prime >= q."""
    q = max(q, 2)
    while not is_prime(q):
        q += 1
    return q


@dataclass(frozen=True)
class KwiseHash:
    """Degree-(t-1) polynomial over GF(prime), reduced into ``1..range_size``.

    The seed is an integer in ``[0, prime**t)``; its base-``prime`` digits
    are the coefficients (constant term first), so a uniform seed gives
    uniform coefficients.
    """

    t: int
    domain_size: int
    range_size: int
    prime: int
    coefficients: tuple[int, ...]

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[int], domain_size: int, range_size: int,
                          prime: int) -> "KwiseHash":
        if not is_prime(prime):
            raise InvalidArgument(f"{prime} is not prime")
        if domain_size > prime:
            raise InvalidArgument("domain does not fit in the field")
        if range_size < 1:
            raise InvalidArgument("range must be nonempty")
        coeffs = tuple(int(c) % prime for c in coefficients)
        if not coeffs:
            raise InvalidArgument("need at least one coefficient")
        return cls(len(coeffs), domain_size, range_size, prime, coeffs)

    @classmethod
    def from_seed(cls, seed: int, t: int, domain_size: int, range_size: int,
                  prime: int | None = None) -> "KwiseHash":
        if prime is None:
            prime = default_prime(domain_size, range_size)
        if not (0 <= seed < prime ** t):
            raise InvalidArgument(f"seed must lie in [0, prime**t) = [0, {prime}**{t})")
        coeffs = []
        for _ in range(t):
            seed, c = divmod(seed, prime)
            coeffs.append(c)
        return cls.from_coefficients(coeffs, domain_size, range_size, prime)

    @property
    def seed(self) -> int:
        s = 0
        for c in reversed(self.coefficients):
            s = s * self.prime + c
        return s

    @property
    def seed_bits(self) -> int:
        return max(1, (self.prime ** self.t - 1).bit_length())

    def __call__(self, key: int) -> int:
        return kwise_hash_eval(self, key)

    def eval_many(self, keys) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.int64)
        if keys.size and (keys.min() < 0 or keys.max() >= self.domain_size):
            raise InvalidArgument("key outside the hash domain")
        if self.prime < 2 ** 31:
            acc = np.zeros(keys.shape, dtype=np.int64)
            for c in reversed(self.coefficients):
                acc = (acc * keys + c) % self.prime
        else:
            acc = np.array([self._poly(int(k)) for k in keys.ravel()], dtype=np.int64).reshape(keys.shape)
        return acc % self.range_size + 1

    def _poly(self, key: int) -> int:
        acc = 0
        for c in reversed(self.coefficients):
            acc = (acc * key + c) % self.prime
        return acc


def default_prime(domain_size: int, range_size: int) -> int:
    return next_prime(max(domain_size, range_size) + 1)


def kwise_hash_eval(h: KwiseHash, key: int) -> int:
    if not (0 <= key < h.domain_size):
        raise InvalidArgument(f"key {key} outside the hash domain 0..{h.domain_size - 1}")
    return h._poly(key) % h.range_size + 1


def draw_hash(rng: np.random.Generator, t: int, domain_size: int, range_size: int) -> KwiseHash:
    """Draw a uniformly random member of the family from ``rng``."""
    prime = default_prime(domain_size, range_size)
    coeffs = rng.integers(0, prime, size=t)
    return KwiseHash.from_coefficients(coeffs.tolist(), domain_size, range_size, prime)


def d4_hash_for(g: Graph, num_parts: int, cfg: ShortcutConfig) -> KwiseHash:
    """The shared hash h: [0, N-1] x V -> [1, |Y|], keyed by ``i * n + u``.

    Drawn from the random stream of node 0 (the min-id node) so the
    distributed leader reproduces the same function from the same seed.
    """
    return draw_hash(node_rng(cfg.seed, 0), hash_degree(g.n, cfg), max(1, num_parts) * g.n,
                     hash_range(g.n, cfg))


# --- constructions -------------------------------------------------------------

def incident_edges(g: Graph, nodes: Iterable[int]) -> frozenset:
    return frozenset(norm_edge(v, u) for v in nodes for u in g.adj(v))


def one_hop_extension(g: Graph, parts: Partition) -> Shortcut:
    """H_i = every edge with at least one endpoint in P_i."""
    return Shortcut.from_edge_sets([incident_edges(g, p) for p in parts])


def identify_large_parts(g: Graph, parts: Partition, d: int, cfg: ShortcutConfig) -> set[int]:
    """Indices of parts whose induced diameter exceeds the large-part threshold."""
    tau = large_threshold(d, g.n, cfg)
    if tau >= g.n:
        return set()
    out = set()
    for i, p in enumerate(parts):
        if len(p) > tau + 1 and diameter(g, p) > tau:
            out.add(i)
    return out


def _check_diameter(g: Graph, d: int, cfg: ShortcutConfig) -> None:
    actual = diameter(g)
    if actual != d:
        msg = f"construction for diameter {d} applied to a graph of diameter {actual}"
        if cfg.strict_diameter:
            raise PreconditionViolated(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=3)


def _directed_arrays(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Both orientations of every edge: (u,v) for sorted edges, then (v,u)."""
    arr = np.array(g.edge_list(), dtype=np.int64).reshape(-1, 2)
    return np.concatenate([arr[:, 0], arr[:, 1]]), np.concatenate([arr[:, 1], arr[:, 0]])


def _closed_mask(g: Graph, part: Iterable[int]) -> np.ndarray:
    mask = np.zeros(g.n, dtype=bool)
    for v in part:
        mask[v] = True
        mask[list(g.adj(v))] = True
    return mask


def _as_edges(src: np.ndarray, dst: np.ndarray) -> frozenset:
    lo = np.minimum(src, dst).tolist()
    hi = np.maximum(src, dst).tolist()
    return frozenset(zip(lo, hi))


def _resolve_large(g, parts, d, cfg, large):
    return identify_large_parts(g, parts, d, cfg) if large is None else set(large)


def build_shortcut_d3(g: Graph, parts: Partition, cfg: ShortcutConfig = ShortcutConfig(),
                      large: Iterable[int] | None = None) -> Shortcut:
    """Diameter-3 construction.

    Every node of N+(P_i) keeps each incident edge with probability
    ``1/sqrt(n)``, independently per (part, node, edge).
    """
    _check_diameter(g, 3, cfg)
    large = _resolve_large(g, parts, 3, cfg, large)
    rng = central_rng(cfg.seed)
    q = 1.0 / math.sqrt(g.n)
    src, dst = _directed_arrays(g)
    s1, s2 = [], []
    for i, p in enumerate(parts):
        if i not in large:
            s1.append(frozenset())
            s2.append(frozenset())
            continue
        s1.append(incident_edges(g, p))
        eligible = np.flatnonzero(_closed_mask(g, p)[src])
        keep = eligible[rng.random(len(eligible)) < q]
        s2.append(_as_edges(src[keep], dst[keep]))
    return Shortcut(tuple(s1), tuple(s2))


def build_shortcut_d4(g: Graph, parts: Partition, cfg: ShortcutConfig = ShortcutConfig(),
                      large: Iterable[int] | None = None, h: KwiseHash | None = None) -> Shortcut:
    """Diameter-4 construction.

    A node u keeps its edge (u, v) for part i with probability ``1/h(u, i)``
    whenever v is in N+(P_i).
    """
    _check_diameter(g, 4, cfg)
    large = _resolve_large(g, parts, 4, cfg, large)
    if h is None:
        h = d4_hash_for(g, len(parts), cfg)
    rng = central_rng(cfg.seed)
    src, dst = _directed_arrays(g)
    nodes = np.arange(g.n, dtype=np.int64)
    s1, s2 = [], []
    for i, p in enumerate(parts):
        if i not in large:
            s1.append(frozenset())
            s2.append(frozenset())
            continue
        s1.append(incident_edges(g, p))
        eligible = np.flatnonzero(_closed_mask(g, p)[dst])
        hv = h.eval_many(i * g.n + nodes)
        prob = 1.0 / hv[src[eligible]]
        keep = eligible[rng.random(len(eligible)) < prob]
        s2.append(_as_edges(src[keep], dst[keep]))
    return Shortcut(tuple(s1), tuple(s2))


def step2_congestion(sc: Shortcut) -> dict[Edge, int]:
    counts: dict[Edge, int] = {}
    for edges in sc.step2:
        for e in edges:
            counts[e] = counts.get(e, 0) + 1
    return counts


def harmonic(x: int) -> float:
    return sum(1.0 / i for i in range(1, x + 1))
