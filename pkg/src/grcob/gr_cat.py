"""The category Gr of graph cobordisms between finite sets.

A morphism ``B -> A`` is represented by a :class:`~grcob.graph_core.MarkedGaf`
whose attach set is ``A`` and whose marking has domain ``B``.  Equality of
morphisms in tests is isomorphism (equal canonical forms), never homotopy.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .graph_core import Gaf, MarkedGaf, components, ensure_valid

__all__ = [
    "GrMorphism",
    "SourceTargetMismatch",
    "UnknownLabel",
    "Gluing",
    "identity",
    "compose",
    "compose_with_maps",
    "tensor",
    "op1",
    "op2",
    "op3",
    "homotopy_invariants",
]

GrMorphism = MarkedGaf


class SourceTargetMismatch(ValueError):
    pass


class UnknownLabel(KeyError):
    pass


def _fresh(prefix: str, n: int, avoid: Iterable[str]) -> list[str]:
    avoid = set(avoid)
    p = prefix
    while any(f"{p}{i}" in avoid for i in range(n)):
        p = p + "_"
    return [f"{p}{i}" for i in range(n)]


def identity(A: Sequence[str]) -> GrMorphism:
    A = tuple(A)
    return MarkedGaf(Gaf(A, (), (), ()), tuple((a, a) for a in A))


@dataclass(frozen=True)
class Gluing:
    """Where the pieces of ``g`` and ``h`` went inside ``compose(g, h)``.

    ``g_map`` sends every vertex and half-edge label of ``g`` to the composite;
    ``h_map`` does the same for ``h`` (its attach points land on the images of
    ``g``'s marked vertices).
    """

    composite: GrMorphism
    g_map: Mapping[str, str]
    h_map: Mapping[str, str]


def compose_with_maps(g: GrMorphism, h: GrMorphism) -> Gluing:
    ensure_valid(g)
    ensure_valid(h)
    if tuple(h.target) != tuple(g.source):
        raise SourceTargetMismatch(f"target of h {list(h.target)} != source of g {list(g.source)}")
    G, H = g.gaf, h.gaf
    A = G.attach
    vnames = _fresh("v", len(G.vertices) + len(H.vertices), A)
    hnames = _fresh("h", len(G.half_edges) + len(H.half_edges), ())
    g_map: dict[str, str] = {a: a for a in A}
    g_map.update(zip(G.vertices, vnames))
    g_map.update(zip((x for x, _ in G.half_edges), hnames))
    h_map: dict[str, str] = {b: g_map[g.mark[b]] for b in H.attach}
    h_map.update(zip(H.vertices, vnames[len(G.vertices) :]))
    h_map.update(zip((x for x, _ in H.half_edges), hnames[len(G.half_edges) :]))
    half = [(g_map[x], g_map[v]) for x, v in G.half_edges] + [(h_map[x], h_map[v]) for x, v in H.half_edges]
    edges = [(g_map[a], g_map[b]) for a, b in G.edges] + [(h_map[a], h_map[b]) for a, b in H.edges]
    out = Gaf(A, tuple(vnames), tuple(half), tuple(edges))
    marking = tuple((c, h_map[v]) for c, v in h.marking)
    return Gluing(MarkedGaf(out, marking), g_map, h_map)


def compose(g: GrMorphism, h: GrMorphism) -> GrMorphism:
    """``g o h`` for ``h: C -> B`` and ``g: B -> A``, glued along ``B``."""
    return compose_with_maps(g, h).composite


def tensor(g: GrMorphism, h: GrMorphism) -> GrMorphism:
    """Disjoint union.

    If the attach sets collide, attach labels get ``L.``/``R.`` prefixes; the
    same rule applies independently to the source labels.
    """
    G, H = g.gaf, h.gaf
    lp, rp = ("L.", "R.") if set(G.attach) & set(H.attach) else ("", "")
    ls, rs = ("L.", "R.") if set(g.sources) & set(h.sources) else ("", "")
    la = {a: lp + a for a in G.attach}
    ra = {a: rp + a for a in H.attach}
    A = tuple(la.values()) + tuple(ra.values())
    vnames = _fresh("v", len(G.vertices) + len(H.vertices), A)
    hnames = _fresh("h", len(G.half_edges) + len(H.half_edges), ())
    lm = {**la, **dict(zip(G.vertices, vnames)), **dict(zip((x for x, _ in G.half_edges), hnames))}
    rm = {
        **ra,
        **dict(zip(H.vertices, vnames[len(G.vertices) :])),
        **dict(zip((x for x, _ in H.half_edges), hnames[len(G.half_edges) :])),
    }
    half = [(lm[x], lm[v]) for x, v in G.half_edges] + [(rm[x], rm[v]) for x, v in H.half_edges]
    edges = [(lm[a], lm[b]) for a, b in G.edges] + [(rm[a], rm[b]) for a, b in H.edges]
    marking = tuple((ls + b, lm[v]) for b, v in g.marking) + tuple((rs + b, rm[v]) for b, v in h.marking)
    return MarkedGaf(Gaf(A, tuple(vnames), tuple(half), tuple(edges)), marking)


def op1(f: Mapping[str, str], target: Sequence[str] | None = None) -> GrMorphism:
    """The morphism induced by a map of finite sets ``f: B -> A``."""
    if target is None:
        target = tuple(dict.fromkeys(f.values()))
    target = tuple(target)
    missing = [a for a in f.values() if a not in target]
    if missing:
        raise UnknownLabel(f"map values not in target: {missing}")
    return MarkedGaf(Gaf(target, (), (), ()), tuple(f.items()))


def op2(A: Sequence[str], new: str = "*") -> GrMorphism:
    """``A u {new} -> A``: one new inner vertex, marked by ``new``."""
    A = tuple(A)
    if new in A:
        raise ValueError(f"new label {new!r} already in A")
    (v,) = _fresh("v", 1, A)
    return MarkedGaf(Gaf(A, (v,), (), ()), tuple((a, a) for a in A) + ((new, v),))


def op3(A: Sequence[str], a1: str, a2: str) -> GrMorphism:
    """``A -> A``: one new edge from ``a1`` to ``a2`` (a loop when equal)."""
    A = tuple(A)
    for a in (a1, a2):
        if a not in A:
            raise UnknownLabel(a)
    g = Gaf(A, (), (("h0", a1), ("h1", a2)), (("h0", "h1"),))
    return MarkedGaf(g, tuple((a, a) for a in A))


def homotopy_invariants(g: GrMorphism) -> dict:
    """Sound (not complete) invariants of the homotopy class of ``g``.

    Per component: first Betti number, attach points it contains, and the
    source labels marked inside it.
    """
    ensure_valid(g)
    comps = []
    for c in components(g.gaf):
        nodes = c.attach | c.vertices
        marks = tuple(sorted(b for b, v in g.marking if v in nodes))
        comps.append((c.rank_h1, tuple(sorted(c.attach)), marks))
    return {
        "source": list(g.source),
        "target": list(g.target),
        "components": sorted(comps),
    }
