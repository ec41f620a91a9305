"""Small graph builders shared by the tests."""
from __future__ import annotations

from typing import Sequence

from grcob.graph_core import Gaf, GafIso, MarkedGaf


def build(attach: Sequence[str], vertices: Sequence[str], edges: Sequence[tuple[str, str]], marking=None):
    """Gaf whose ``k``-th edge is ``(h{2k}, h{2k+1})`` from ``edges[k][0]`` to ``edges[k][1]``."""
    half, pairs = [], []
    for k, (x, y) in enumerate(edges):
        half += [(f"h{2 * k}", x), (f"h{2 * k + 1}", y)]
        pairs.append((f"h{2 * k}", f"h{2 * k + 1}"))
    g = Gaf(tuple(attach), tuple(vertices), tuple(half), tuple(pairs))
    return g if marking is None else MarkedGaf(g, tuple(marking))


def theta() -> Gaf:
    return build((), ("x", "y"), [("x", "y")] * 3)


def rose(n: int) -> Gaf:
    return build((), ("x",), [("x", "x")] * n)


def dumbbell() -> Gaf:
    return build((), ("x", "y"), [("x", "x"), ("x", "y"), ("y", "y")])


def circle() -> MarkedGaf:
    return build((), ("x",), [("x", "x")], marking=())


def half_edge_swap(g: Gaf, pairs: dict[str, str]) -> GafIso:
    """Automorphism fixing all vertices and permuting half-edges by ``pairs``."""
    hm = {h: pairs.get(h, h) for h, _ in g.half_edges}
    return GafIso({v: v for v in g.nodes}, hm)
