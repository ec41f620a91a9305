"""Half-edge graphs attached to finite sets ("gafs").

A gaf has attaching vertices ``A``, inner vertices ``V`` and half-edges ``H``;
each half-edge sits at a vertex and is paired with exactly one other half-edge.
A :class:`MarkedGaf` additionally carries a marking ``B -> A u V`` and is the
representative of a graph cobordism ``B -> A``.

Orderings are positional: the index of a label in its list, assigned on
ingestion.  An edge ``{h, h'}`` is oriented from the half-edge with the smaller
index (tail) to the one with the larger index (head), and edges are listed in
order of their tails.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Iterator, Mapping, Sequence

from .exact_linalg import IntMatrix

__all__ = [
    "Gaf",
    "MarkedGaf",
    "Violation",
    "InvalidGaf",
    "Component",
    "GafIso",
    "RelChainComplex",
    "validate",
    "ensure_valid",
    "euler_char_rel",
    "components",
    "based_tree_components",
    "canonical_form",
    "certificate",
    "isomorphisms",
    "automorphisms",
    "is_isomorphic",
    "rel_chain_complex",
    "gaf_from_dict",
    "gaf_to_dict",
]


class InvalidGaf(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str
    locus: str = ""

    def __str__(self) -> str:
        return f"{self.kind} ({self.locus})" if self.locus else self.kind


@dataclass(frozen=True)
class Gaf:
    attach: tuple[str, ...]
    vertices: tuple[str, ...]
    half_edges: tuple[tuple[str, str], ...]
    """Pairs ``(half_edge_id, vertex)``; this is the incidence map sigma."""
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "attach", tuple(self.attach))
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "half_edges", tuple((str(h), str(v)) for h, v in self.half_edges))
        object.__setattr__(self, "edges", tuple((str(a), str(b)) for a, b in self.edges))

    # -- lookups (assume validity) --------------------------------------
    @cached_property
    def sigma(self) -> dict[str, str]:
        return dict(self.half_edges)

    @cached_property
    def h_index(self) -> dict[str, int]:
        return {h: i for i, (h, _) in enumerate(self.half_edges)}

    @cached_property
    def partner(self) -> dict[str, str]:
        p = {}
        for a, b in self.edges:
            p[a] = b
            p[b] = a
        return p

    @cached_property
    def nodes(self) -> tuple[str, ...]:
        return self.attach + self.vertices

    @cached_property
    def node_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.nodes)}

    @cached_property
    def attach_set(self) -> frozenset[str]:
        return frozenset(self.attach)

    @cached_property
    def edge_list(self) -> tuple[tuple[str, str], ...]:
        """Edges as ``(tail, head)`` half-edge pairs, ordered by tail index."""
        idx = self.h_index
        es = [(a, b) if idx[a] < idx[b] else (b, a) for a, b in self.edges]
        es.sort(key=lambda e: idx[e[0]])
        return tuple(es)

    @cached_property
    def edge_of(self) -> dict[str, int]:
        """Half-edge id -> position of its edge in :attr:`edge_list`."""
        out = {}
        for k, (t, h) in enumerate(self.edge_list):
            out[t] = k
            out[h] = k
        return out

    def endpoints(self, k: int) -> tuple[str, str]:
        t, h = self.edge_list[k]
        return self.sigma[t], self.sigma[h]

    def valence(self, v: str) -> int:
        return sum(1 for _, w in self.half_edges if w == v)

    def half_edges_at(self, v: str) -> list[str]:
        return [h for h, w in self.half_edges if w == v]

    @property
    def num_edges(self) -> int:
        return len(self.half_edges) // 2

    def is_attach(self, v: str) -> bool:
        return v in self.attach_set


@dataclass(frozen=True)
class MarkedGaf:
    gaf: Gaf
    marking: tuple[tuple[str, str], ...] = ()
    """Pairs ``(source_label, vertex)``; the sources in order form ``B``."""

    def __post_init__(self):
        m = self.marking
        if isinstance(m, Mapping):
            m = m.items()
        object.__setattr__(self, "marking", tuple((str(b), str(v)) for b, v in m))

    @property
    def sources(self) -> tuple[str, ...]:
        return tuple(b for b, _ in self.marking)

    @cached_property
    def mark(self) -> dict[str, str]:
        return dict(self.marking)

    # A MarkedGaf represents a morphism B -> A in Gr.
    @property
    def source(self) -> tuple[str, ...]:
        return self.sources

    @property
    def target(self) -> tuple[str, ...]:
        return self.gaf.attach

    def fiber(self, v: str) -> list[str]:
        return [b for b, w in self.marking if w == v]


# -- validation -------------------------------------------------------------


def _dupes(xs: Iterable[str]) -> list[str]:
    seen, out = set(), []
    for x in xs:
        if x in seen and x not in out:
            out.append(x)
        seen.add(x)
    return out


def validate(g: Gaf | MarkedGaf) -> list[Violation]:
    """Every invariant violation of a gaf or marked gaf; empty means valid."""
    out: list[Violation] = []
    mg = g if isinstance(g, MarkedGaf) else None
    gaf = mg.gaf if mg else g
    for name, labels in (("attach", gaf.attach), ("vertices", gaf.vertices)):
        for x in _dupes(labels):
            out.append(Violation(f"duplicate {name} label", x))
    for x in sorted(set(gaf.attach) & set(gaf.vertices)):
        out.append(Violation("label is both attach and inner vertex", x))
    hs = [h for h, _ in gaf.half_edges]
    for x in _dupes(hs):
        out.append(Violation("duplicate half-edge label", x))
    nodes = set(gaf.attach) | set(gaf.vertices)
    for h, v in gaf.half_edges:
        if v not in nodes:
            out.append(Violation("dangling incidence", f"{h} -> {v}"))
    hset = set(hs)
    count: dict[str, int] = {}
    for a, b in gaf.edges:
        if a == b:
            out.append(Violation("fixpoint in edge involution", a))
        for x in (a, b) if a != b else (a,):
            if x not in hset:
                out.append(Violation("edge references unknown half-edge", x))
            count[x] = count.get(x, 0) + 1
    for h in hs:
        c = count.get(h, 0)
        if c == 0:
            out.append(Violation("unpaired half-edge", h))
        elif c > 1:
            out.append(Violation("half-edge in several edges", h))
    if mg is not None:
        for x in _dupes(mg.sources):
            out.append(Violation("duplicate source label", x))
        for b, v in mg.marking:
            if v not in nodes:
                out.append(Violation("dangling marking", f"{b} -> {v}"))
    return out


def ensure_valid(g: Gaf | MarkedGaf) -> None:
    vs = validate(g)
    if vs:
        raise InvalidGaf("; ".join(map(str, vs)))


def euler_char_rel(g: Gaf | MarkedGaf) -> int:
    """chi(G, A) = |V| - |E|."""
    gaf = g.gaf if isinstance(g, MarkedGaf) else g
    ensure_valid(gaf)
    return len(gaf.vertices) - len(gaf.half_edges) // 2


# -- components ------------------------------------------------------------


@dataclass(frozen=True)
class Component:
    attach: frozenset[str]
    vertices: frozenset[str]
    edges: frozenset[int]
    """Positions in :attr:`Gaf.edge_list`."""

    @property
    def rank_h1(self) -> int:
        return len(self.edges) - len(self.attach) - len(self.vertices) + 1

    @property
    def is_tree(self) -> bool:
        return self.rank_h1 == 0


class _DSU:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def components(g: Gaf) -> list[Component]:
    """Connected components, in order of their first vertex."""
    dsu = _DSU(g.nodes)
    for k in range(len(g.edge_list)):
        dsu.union(*g.endpoints(k))
    groups: dict[str, list[str]] = {}
    for v in g.nodes:
        groups.setdefault(dsu.find(v), []).append(v)
    edges: dict[str, set[int]] = {r: set() for r in groups}
    for k in range(len(g.edge_list)):
        edges[dsu.find(g.endpoints(k)[0])].add(k)
    out = []
    for r, vs in groups.items():
        out.append(
            Component(
                frozenset(v for v in vs if g.is_attach(v)),
                frozenset(v for v in vs if not g.is_attach(v)),
                frozenset(edges[r]),
            )
        )
    return out


def based_tree_components(g: Gaf) -> list[Component]:
    """Components that are trees meeting ``A`` in exactly one point."""
    return [c for c in components(g) if len(c.attach) == 1 and c.is_tree]


# -- canonical labelling ---------------------------------------------------
#
# Individualisation-refinement over inner vertices; attach vertices are fixed
# points with code (0, index).  Edge colours and vertex colours are optional
# extra invariants (used for markings and for chains of forest collapses).


@dataclass
class _Skel:
    n_attach: int
    n_inner: int
    edges: list[tuple[int, int, Any]]
    """Node indices (attach first) plus a comparable edge colour."""
    vcolor: list[Any]
    """One comparable colour per inner vertex."""
    extra: Any = None
    """Part of the certificate that only depends on attach data."""

    @cached_property
    def incident(self) -> list[list[tuple[int, Any]]]:
        inc: list[list[tuple[int, Any]]] = [[] for _ in range(self.n_attach + self.n_inner)]
        for u, v, c in self.edges:
            inc[u].append((v, c))
            inc[v].append((u, c))
        return inc


def _refine(sk: _Skel, colors: list) -> list:
    na = sk.n_attach
    inc = sk.incident
    while True:
        sigs = []
        for i in range(sk.n_inner):
            nb = sorted(
                ((0, w, c) if w < na else (1, colors[w - na], c)) for w, c in inc[na + i]
            )
            sigs.append((colors[i], tuple(nb)))
        ranks = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _initial_colors(sk: _Skel) -> list:
    sigs = [(sk.vcolor[i],) for i in range(sk.n_inner)]
    ranks = {s: r for r, s in enumerate(sorted(set(sigs)))}
    return [ranks[s] for s in sigs]


def _certificate(sk: _Skel, pos: list[int]):
    na = sk.n_attach

    def code(x):
        return (0, x) if x < na else (1, pos[x - na])

    es = sorted(tuple(sorted((code(u), code(v)))) + (c,) for u, v, c in sk.edges)
    inv = [0] * sk.n_inner
    for i, p in enumerate(pos):
        inv[p] = i
    return (sk.n_inner, tuple(sk.vcolor[i] for i in inv), tuple(es), sk.extra)


def _canon_search(sk: _Skel):
    """Return ``(certificate, pos)`` minimising the certificate."""
    best: list = [None, None]

    def rec(colors):
        colors = _refine(sk, colors)
        n = sk.n_inner
        if len(set(colors)) == n:
            cert = _certificate(sk, colors)
            if best[0] is None or cert < best[0]:
                best[0], best[1] = cert, list(colors)
            return
        counts: dict[int, int] = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        target = min(c for c, k in counts.items() if k > 1)
        for v in range(n):
            if colors[v] != target:
                continue
            sigs = [(colors[i], 0 if i == v else 1) for i in range(n)]
            ranks = {s: r for r, s in enumerate(sorted(set(sigs)))}
            rec([ranks[s] for s in sigs])

    rec(_initial_colors(sk))
    if sk.n_inner == 0:
        return _certificate(sk, []), []
    return best[0], best[1]


def _marked_skel(mg: MarkedGaf, edge_colors: Sequence[Any] | None = None, vertex_colors: Mapping[str, Any] | None = None) -> _Skel:
    g = mg.gaf
    na = len(g.attach)
    idx = g.node_index
    bpos = {b: i for i, b in enumerate(mg.sources)}
    vcol = []
    for v in g.vertices:
        marks = tuple(sorted(bpos[b] for b in mg.fiber(v)))
        vcol.append(((vertex_colors or {}).get(v, 0), marks))
    edges = []
    for k in range(len(g.edge_list)):
        u, v = g.endpoints(k)
        c = edge_colors[k] if edge_colors is not None else 0
        edges.append((idx[u], idx[v], c))
    attach_marks = tuple(tuple(sorted(bpos[b] for b in mg.fiber(a))) for a in g.attach)
    extra = (attach_marks, tuple(bpos[b] for b in mg.sources))
    return _Skel(na, len(g.vertices), edges, vcol, extra)


def _as_marked(g: Gaf | MarkedGaf) -> MarkedGaf:
    return g if isinstance(g, MarkedGaf) else MarkedGaf(g, ())


def certificate(g: Gaf | MarkedGaf, edge_colors: Sequence[Any] | None = None):
    """Hashable isomorphism invariant (complete for fixed A and B)."""
    return _canon_search(_marked_skel(_as_marked(g), edge_colors))[0]


def canonical_form(g: Gaf | MarkedGaf, edge_colors: Sequence[Any] | None = None):
    """Canonically relabelled copy of ``g`` and the relabelling used.

    Returns ``(canonical, relabel)`` where ``relabel`` maps old inner-vertex
    and half-edge labels to new ones.  Attach and source labels are kept.
    Inner vertices become ``v0, v1, ...`` and the ``k``-th edge becomes
    ``(h{2k}, h{2k+1})`` with the tail at the endpoint of smaller code.
    """
    mg = _as_marked(g)
    ensure_valid(mg)
    gaf = mg.gaf
    sk = _marked_skel(mg, edge_colors)
    cert, pos = _canon_search(sk)
    na = len(gaf.attach)
    width = len(str(max(len(gaf.vertices), len(gaf.half_edges), 1)))
    vname = {v: f"v{pos[i]:0{width}d}" for i, v in enumerate(gaf.vertices)}
    idx = gaf.node_index

    def code(x: str):
        i = idx[x]
        return (0, i) if i < na else (1, pos[i - na])

    keyed = []
    for k, (t, h) in enumerate(gaf.edge_list):
        ct, ch = code(gaf.sigma[t]), code(gaf.sigma[h])
        c = edge_colors[k] if edge_colors is not None else 0
        if ct > ch:
            t, h, ct, ch = h, t, ch, ct
        keyed.append(((ct, ch, c), k, t, h))
    keyed.sort(key=lambda x: (x[0], x[1]))
    hname = {}
    new_half = []
    new_edges = []
    newname = {v: v for v in gaf.attach}
    newname.update(vname)
    new_colors = []
    for j, (_, k, t, h) in enumerate(keyed):
        a, b = f"h{2 * j:0{width}d}", f"h{2 * j + 1:0{width}d}"
        hname[t], hname[h] = a, b
        new_half += [(a, newname[gaf.sigma[t]]), (b, newname[gaf.sigma[h]])]
        new_edges.append((a, b))
        if edge_colors is not None:
            new_colors.append(edge_colors[k])
    inner = sorted(vname.values())
    out = Gaf(gaf.attach, tuple(inner), tuple(new_half), tuple(new_edges))
    marked = MarkedGaf(out, tuple((b, newname[v]) for b, v in mg.marking))
    relabel = {**vname, **hname}
    result = marked if isinstance(g, MarkedGaf) else out
    return result, relabel


# -- isomorphisms ------------------------------------------------------------


@dataclass(frozen=True)
class GafIso:
    """An isomorphism of gafs, identity on attach points."""

    vertex_map: Mapping[str, str]
    half_edge_map: Mapping[str, str]

    def compose(self, first: "GafIso") -> "GafIso":
        """``self`` after ``first``."""
        return GafIso(
            {v: self.vertex_map[w] for v, w in first.vertex_map.items()},
            {h: self.half_edge_map[k] for h, k in first.half_edge_map.items()},
        )

    def inverse(self) -> "GafIso":
        return GafIso(
            {w: v for v, w in self.vertex_map.items()},
            {k: h for h, k in self.half_edge_map.items()},
        )


def _joint_colors(s1: _Skel, s2: _Skel) -> tuple[list, list]:
    na = s1.n_attach
    shift = lambda e: (e[0] if e[0] < na else e[0] + s1.n_inner, e[1] if e[1] < na else e[1] + s1.n_inner, e[2])
    union = _Skel(na, s1.n_inner + s2.n_inner, s1.edges + [shift(e) for e in s2.edges], s1.vcolor + s2.vcolor)
    cols = _refine(union, _initial_colors(union))
    return cols[: s1.n_inner], cols[s1.n_inner :]


def isomorphisms(
    g1: Gaf | MarkedGaf,
    g2: Gaf | MarkedGaf,
    edge_colors1: Sequence[Any] | None = None,
    edge_colors2: Sequence[Any] | None = None,
) -> Iterator[GafIso]:
    """All isomorphisms ``g1 -> g2`` fixing attach points (and sources if marked)."""
    m1, m2 = _as_marked(g1), _as_marked(g2)
    a, b = m1.gaf, m2.gaf
    if a.attach != b.attach or m1.sources != m2.sources:
        return
    if len(a.vertices) != len(b.vertices) or len(a.half_edges) != len(b.half_edges):
        return
    s1 = _marked_skel(m1, edge_colors1)
    s2 = _marked_skel(m2, edge_colors2)
    if s1.extra != s2.extra:
        return
    c1, c2 = _joint_colors(s1, s2)
    na = len(a.attach)
    n = len(a.vertices)

    def multiset(sk: _Skel):
        out: dict[tuple, int] = {}
        for u, v, c in sk.edges:
            key = (min(u, v), max(u, v), c)
            out[key] = out.get(key, 0) + 1
        return out

    mult2 = multiset(s2)
    # adjacency counts keyed by node pair for incremental checking
    adj1: dict[tuple, int] = multiset(s1)

    assign = [-1] * n
    used = [False] * n

    def img(x):
        return x if x < na else na + assign[x - na]

    def consistent(i: int) -> bool:
        # compare all edge classes among already-assigned nodes touching inner i
        node = na + i
        for (u, v, c), k in adj1.items():
            if node not in (u, v):
                continue
            ou = u if u < na else assign[u - na]
            ov = v if v < na else assign[v - na]
            if (u >= na and ou < 0) or (v >= na and ov < 0):
                continue
            iu, iv = img(u), img(v)
            if mult2.get((min(iu, iv), max(iu, iv), c), 0) != k:
                return False
        return True

    def vertex_maps(i: int) -> Iterator[list[int]]:
        if i == n:
            yield list(assign)
            return
        for j in range(n):
            if used[j] or c1[i] != c2[j]:
                continue
            assign[i] = j
            used[j] = True
            if consistent(i):
                yield from vertex_maps(i + 1)
            used[j] = False
            assign[i] = -1

    nodes1, nodes2 = a.nodes, b.nodes
    for vm in vertex_maps(0):
        to2 = lambda x: x if x < na else na + vm[x - na]
        vmap = {nodes1[x]: nodes2[to2(x)] for x in range(na + n)}
        groups1: dict[tuple, list[int]] = {}
        groups2: dict[tuple, list[int]] = {}
        for k, (u, v, c) in enumerate(s1.edges):
            iu, iv = to2(u), to2(v)
            groups1.setdefault((min(iu, iv), max(iu, iv), c), []).append(k)
        for k, (u, v, c) in enumerate(s2.edges):
            groups2.setdefault((min(u, v), max(u, v), c), []).append(k)
        if {k: len(x) for k, x in groups1.items()} != {k: len(x) for k, x in groups2.items()}:
            continue
        keys = sorted(groups1)
        choices = []
        for key in keys:
            e1, e2 = groups1[key], groups2[key]
            loop = key[0] == key[1]
            opts = []
            for perm in itertools.permutations(e2):
                if loop:
                    for flips in itertools.product((False, True), repeat=len(e1)):
                        opts.append(list(zip(e1, perm, flips)))
                else:
                    opts.append([(x, y, None) for x, y in zip(e1, perm)])
            choices.append(opts)
        for combo in itertools.product(*choices):
            hmap = {}
            for part in combo:
                for k1, k2, flip in part:
                    t1, h1 = a.edge_list[k1]
                    t2, h2 = b.edge_list[k2]
                    if flip is None:
                        if vmap[a.sigma[t1]] == b.sigma[t2]:
                            hmap[t1], hmap[h1] = t2, h2
                        else:
                            hmap[t1], hmap[h1] = h2, t2
                    elif flip:
                        hmap[t1], hmap[h1] = h2, t2
                    else:
                        hmap[t1], hmap[h1] = t2, h2
            yield GafIso(vmap, hmap)


def automorphisms(g: Gaf | MarkedGaf, edge_colors: Sequence[Any] | None = None) -> list[GafIso]:
    return list(isomorphisms(g, g, edge_colors, edge_colors))


def is_isomorphic(g1: Gaf | MarkedGaf, g2: Gaf | MarkedGaf) -> bool:
    m1, m2 = _as_marked(g1), _as_marked(g2)
    if m1.gaf.attach != m2.gaf.attach or m1.sources != m2.sources:
        return False
    return certificate(m1) == certificate(m2)


# -- chain complex ----------------------------------------------------------


@dataclass(frozen=True)
class RelChainComplex:
    """``boundary: Z^E -> Z^V`` with attach-vertex entries dropped."""

    boundary: IntMatrix
    row_labels: tuple[str, ...]
    col_labels: tuple[tuple[str, str], ...]


def rel_chain_complex(g: Gaf) -> RelChainComplex:
    ensure_valid(g)
    vidx = {v: i for i, v in enumerate(g.vertices)}
    rows = [[0] * len(g.edge_list) for _ in g.vertices]
    for k, (t, h) in enumerate(g.edge_list):
        vt, vh = g.sigma[t], g.sigma[h]
        if vh in vidx:
            rows[vidx[vh]][k] += 1
        if vt in vidx:
            rows[vidx[vt]][k] -= 1
    return RelChainComplex(IntMatrix.from_rows(rows, len(g.edge_list)), g.vertices, g.edge_list)


# -- JSON --------------------------------------------------------------------


def gaf_from_dict(d: Mapping[str, Any]) -> Gaf | MarkedGaf:
    """Parse the JSON object form; returns a :class:`MarkedGaf` iff ``marking`` is present."""
    try:
        half = tuple((str(x["id"]), str(x["at"])) for x in d.get("half_edges", []))
        g = Gaf(
            tuple(str(a) for a in d.get("attach", [])),
            tuple(str(v) for v in d.get("vertices", [])),
            half,
            tuple((str(e[0]), str(e[1])) for e in d.get("edges", [])),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise InvalidGaf(f"malformed gaf object: {exc!r}") from exc
    if "marking" in d:
        if not isinstance(d["marking"], Mapping):
            raise InvalidGaf("marking must be an object")
        return MarkedGaf(g, tuple((str(b), str(v)) for b, v in d["marking"].items()))
    return g


def gaf_to_dict(g: Gaf | MarkedGaf) -> dict[str, Any]:
    gaf = g.gaf if isinstance(g, MarkedGaf) else g
    out: dict[str, Any] = {
        "attach": list(gaf.attach),
        "vertices": list(gaf.vertices),
        "half_edges": [{"id": h, "at": v} for h, v in gaf.half_edges],
        "edges": [list(e) for e in gaf.edges],
    }
    if isinstance(g, MarkedGaf):
        out["marking"] = dict(g.marking)
    return out
