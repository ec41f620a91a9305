"""Seeded random pools of marked gafs for the property suites.

Pools only use :class:`random.Random` seeded with an integer, whose output is
the same on every platform.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Sequence

from .graph_core import Gaf, MarkedGaf, gaf_to_dict

__all__ = ["Bounds", "Pool", "random_morphism", "pool_generate", "composable_pairs", "composable_triples"]


@dataclass(frozen=True)
class Bounds:
    v_max: int = 2
    """Maximum number of inner vertices."""
    e_max: int = 3
    a_max: int = 2
    b_max: int = 2


@dataclass(frozen=True)
class Pool:
    seed: int
    size: int
    bounds: Bounds
    items: tuple[MarkedGaf, ...]

    def dumps(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "size": self.size,
                "bounds": vars(self.bounds),
                "items": [gaf_to_dict(g) for g in self.items],
            },
            sort_keys=True,
        )


def random_morphism(rng: random.Random, source: Sequence[str], target: Sequence[str], v_max: int, e_max: int) -> MarkedGaf:
    """A random marked gaf ``source -> target`` with at most the given sizes."""
    nv = rng.randint(0, v_max)
    vertices = tuple(f"v{i}" for i in range(nv))
    nodes = tuple(target) + vertices
    half, edges = [], []
    if nodes:
        for k in range(rng.randint(0, e_max)):
            x = rng.choice(nodes)
            # bias towards loops and parallel edges so they actually show up
            r = rng.random()
            if r < 0.15:
                y = x
            elif r < 0.3 and half:
                y = rng.choice(half)[1]
            else:
                y = rng.choice(nodes)
            half += [(f"h{2 * k}", x), (f"h{2 * k + 1}", y)]
            edges.append((f"h{2 * k}", f"h{2 * k + 1}"))
    marking = tuple((b, rng.choice(nodes)) for b in source) if nodes else ()
    if source and not nodes:
        if v_max < 1:
            raise ValueError("sources need a vertex to land on")
        # nowhere to mark: add a vertex
        vertices = ("v0",)
        marking = tuple((b, "v0") for b in source)
    return MarkedGaf(Gaf(tuple(target), vertices, tuple(half), tuple(edges)), marking)


def _labels(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(n))


def _sources(rng: random.Random, prefix: str, target: Sequence[str], bounds: Bounds) -> tuple[str, ...]:
    n = rng.randint(0, bounds.b_max)
    # with no attach points and no room for a vertex, only the empty source fits
    return _labels(prefix, n) if target or bounds.v_max else ()


def pool_generate(seed: int, size: int, bounds: Bounds = Bounds()) -> Pool:
    rng = random.Random(seed)
    items = []
    for _ in range(size):
        A = _labels("a", rng.randint(0, bounds.a_max))
        B = _sources(rng, "b", A, bounds)
        items.append(random_morphism(rng, B, A, bounds.v_max, bounds.e_max))
    return Pool(seed, size, bounds, tuple(items))


def composable_pairs(seed: int, n: int, bounds: Bounds = Bounds()) -> list[tuple[MarkedGaf, MarkedGaf]]:
    """``n`` pairs ``(g, h)`` with ``h.target == g.source``."""
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        A = _labels("a", rng.randint(0, bounds.a_max))
        B = _sources(rng, "b", A, bounds)
        C = _sources(rng, "c", B, bounds)
        g = random_morphism(rng, B, A, bounds.v_max, bounds.e_max)
        h = random_morphism(rng, C, B, bounds.v_max, bounds.e_max)
        out.append((g, h))
    return out


def composable_triples(seed: int, n: int, bounds: Bounds = Bounds()) -> list[tuple[MarkedGaf, MarkedGaf, MarkedGaf]]:
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        A = _labels("a", rng.randint(0, bounds.a_max))
        B = _sources(rng, "b", A, bounds)
        C = _sources(rng, "c", B, bounds)
        D = _sources(rng, "d", C, bounds)
        g = random_morphism(rng, B, A, bounds.v_max, bounds.e_max)
        h = random_morphism(rng, C, B, bounds.v_max, bounds.e_max)
        k = random_morphism(rng, D, C, bounds.v_max, bounds.e_max)
        out.append((g, h, k))
    return out
