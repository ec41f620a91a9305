"""Tree collapses, reduction, leaf minimisation and the spine at small rank.

A :class:`GafMorphism` ``src -> dst`` is a vertex map together with the
assignment of a source half-edge to every half-edge of ``dst``; half-edges of
``src`` outside its image belong to collapsed edges.

The spine complex in rank ``n`` is the quotient of the barycentric spine by
the automorphism action.  A ``k``-simplex orbit is a spine object ``G0`` with
a strictly increasing chain of nonempty forests ``F1 < ... < Fk``, taken up to
isomorphism of the whole diagram.  It is encoded as an edge-coloured gaf where
an edge's colour is the first ``i`` with ``e`` in ``Fi`` (``0`` if none).
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .det_coeff import transport_sign, xi_iso_action
from .exact_linalg import rank_q
from .graph_core import (
    Gaf,
    MarkedGaf,
    Violation,
    automorphisms,
    canonical_form,
    certificate,
    components,
    ensure_valid,
)

__all__ = [
    "GafMorphism",
    "NotAForest",
    "TwoAttachPointsInOneTree",
    "DegenerateCircle",
    "RankTooLarge",
    "SpineComplex",
    "identity_morphism",
    "compose_morphisms",
    "validate_morphism",
    "collapse_forest",
    "reduce",
    "minimize",
    "forget_valence2",
    "enumerate_spine_objects",
    "spine_chain_complex",
    "twisted_homology",
    "zigzag_equivalent",
    "legal_forests",
]


class NotAForest(ValueError):
    pass


class TwoAttachPointsInOneTree(ValueError):
    pass


class DegenerateCircle(ValueError):
    pass


class RankTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class GafMorphism:
    src: Gaf
    dst: Gaf
    vertex_map: Mapping[str, str]
    """Nodes of ``src`` to nodes of ``dst``."""
    half_edge_map: Mapping[str, str]
    """Half-edges of ``dst`` to the half-edge of ``src`` they come from."""

    def surviving(self) -> dict[str, str]:
        """Inverse of :attr:`half_edge_map`: surviving ``src`` half-edges to ``dst``."""
        return {s: t for t, s in self.half_edge_map.items()}


def identity_morphism(g: Gaf) -> GafMorphism:
    return GafMorphism(g, g, {v: v for v in g.nodes}, {h: h for h, _ in g.half_edges})


def compose_morphisms(second: GafMorphism, first: GafMorphism) -> GafMorphism:
    """``second`` after ``first``."""
    return GafMorphism(
        first.src,
        second.dst,
        {v: second.vertex_map[w] for v, w in first.vertex_map.items()},
        {h: first.half_edge_map[x] for h, x in second.half_edge_map.items()},
    )


def _is_tree(nodes: set[str], edges: list[tuple[str, str]]) -> bool:
    if len(edges) != len(nodes) - 1:
        return False
    parent = {v: v for v in nodes}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for x, y in edges:
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        parent[rx] = ry
    return True


def validate_morphism(f: GafMorphism) -> list[Violation]:
    """Check each morphism condition separately; empty means valid."""
    out: list[Violation] = []
    src, dst = f.src, f.dst
    vm, hm = f.vertex_map, f.half_edge_map
    for v in src.nodes:
        if v not in vm:
            out.append(Violation("vertex map not total", v))
        elif vm[v] not in dst.node_index:
            out.append(Violation("vertex map leaves the target", f"{v} -> {vm[v]}"))
    for a in src.attach:
        if a in vm and not dst.is_attach(vm[a]):
            out.append(Violation("attach point sent to inner vertex", f"{a} -> {vm[a]}"))
    for h, _ in dst.half_edges:
        if h not in hm:
            out.append(Violation("half-edge without preimage", h))
        elif hm[h] not in src.sigma:
            out.append(Violation("preimage is not a half-edge", f"{h} <- {hm[h]}"))
    used = [x for x in hm.values()]
    if len(set(used)) != len(used):
        out.append(Violation("half-edge preimages not distinct"))
    if out:
        return out
    for h, _ in dst.half_edges:
        x = hm[h]
        if vm[src.sigma[x]] != dst.sigma[h]:
            out.append(Violation("incidence not preserved", h))
        if hm[dst.partner[h]] != src.partner[x]:
            out.append(Violation("edge involution not preserved", h))
    image = set(used)
    collapsed = [(src.sigma[t], src.sigma[hh]) for t, hh in src.edge_list if t not in image]
    for t, hh in src.edge_list:
        if (t in image) != (hh in image):
            out.append(Violation("edge only half collapsed", f"{t}/{hh}"))
        elif t not in image and vm[src.sigma[t]] != vm[src.sigma[hh]]:
            out.append(Violation("collapsed edge endpoints not identified", f"{t}/{hh}"))
    for w in dst.nodes:
        pre = {v for v in src.nodes if vm[v] == w}
        es = [(x, y) for x, y in collapsed if x in pre and y in pre]
        if dst.is_attach(w):
            pts = [v for v in pre if src.is_attach(v)]
            if not pts:
                out.append(Violation("attach point has no attach preimage", w))
                continue
            sub = Gaf(tuple(sorted(pts)), tuple(sorted(pre - set(pts))), (), ())
            trees = [c for c in components(_subgraph(sub, es))]
            if any(len(c.attach) != 1 or not c.is_tree for c in trees):
                out.append(Violation("preimage not a union of based trees", w))
        else:
            if not pre:
                out.append(Violation("vertex without preimage", w))
            elif any(src.is_attach(v) for v in pre):
                out.append(Violation("attach point in preimage of inner vertex", w))
            elif not _is_tree(pre, es):
                out.append(Violation("preimage not a tree", w))
    return out


def _subgraph(skeleton: Gaf, edges: list[tuple[str, str]]) -> Gaf:
    half, pairs = [], []
    for i, (x, y) in enumerate(edges):
        half += [(f"s{2 * i}", x), (f"s{2 * i + 1}", y)]
        pairs.append((f"s{2 * i}", f"s{2 * i + 1}"))
    return Gaf(skeleton.attach, skeleton.vertices, tuple(half), tuple(pairs))


def _edge_index(g: Gaf, e) -> int:
    if isinstance(e, int):
        if not 0 <= e < len(g.edge_list):
            raise KeyError(f"no edge {e}")
        return e
    return g.edge_of[e]


def collapse_forest(g: Gaf | MarkedGaf, forest: Iterable[int | str]):
    """Collapse each tree of ``forest`` to one vertex.

    ``forest`` holds edge positions (in ``edge_list``) or half-edge labels.
    A tree containing an attach point collapses onto it, otherwise onto its
    first inner vertex.  Returns ``(quotient, morphism)``; for a marked input
    the quotient carries the transported marking.
    """
    mg = g if isinstance(g, MarkedGaf) else None
    gaf = mg.gaf if mg else g
    ensure_valid(gaf)
    F = sorted({_edge_index(gaf, e) for e in forest})
    parent = {v: v for v in gaf.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in F:
        x, y = gaf.endpoints(k)
        rx, ry = find(x), find(y)
        if rx == ry:
            raise NotAForest(f"edge {gaf.edge_list[k]} closes a cycle")
        if gaf.is_attach(rx) and gaf.is_attach(ry):
            raise TwoAttachPointsInOneTree(f"edge {gaf.edge_list[k]} joins {rx} and {ry}")
        # keep an attach point as root, else the earlier node
        if gaf.is_attach(ry) or (not gaf.is_attach(rx) and gaf.node_index[ry] < gaf.node_index[rx]):
            rx, ry = ry, rx
        parent[ry] = rx
    vm = {v: find(v) for v in gaf.nodes}
    dead = set()
    for k in F:
        dead.update(gaf.edge_list[k])
    half = tuple((h, vm[v]) for h, v in gaf.half_edges if h not in dead)
    edges = tuple(e for e in gaf.edges if e[0] not in dead)
    verts = tuple(v for v in gaf.vertices if vm[v] == v)
    out = Gaf(gaf.attach, verts, half, edges)
    f = GafMorphism(gaf, out, vm, {h: h for h, _ in half})
    if mg is None:
        return out, f
    return MarkedGaf(out, tuple((b, vm[v]) for b, v in mg.marking)), f


def legal_forests(g: Gaf, max_size: int | None = None) -> list[tuple[int, ...]]:
    """All nonempty edge sets of ``g`` that :func:`collapse_forest` accepts."""
    E = len(g.edge_list)
    top = E if max_size is None else min(E, max_size)
    out = []
    for r in range(1, top + 1):
        for F in itertools.combinations(range(E), r):
            if _legal(g, F):
                out.append(F)
    return out


def _legal(g: Gaf, F: Sequence[int]) -> bool:
    parent = {v: v for v in g.nodes}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for k in F:
        rx, ry = (find(v) for v in g.endpoints(k))
        if rx == ry or (g.is_attach(rx) and g.is_attach(ry)):
            return False
        if g.is_attach(ry):
            rx, ry = ry, rx
        parent[ry] = rx
    return True


# -- reduction and normal forms ------------------------------------------------


def reduce(g: MarkedGaf) -> MarkedGaf:
    """Make every based-tree component carry exactly one mark.

    An unmarked based tree is discarded together with its attach point.  A
    based tree on ``a`` marked by ``b1..bk`` with ``k >= 2`` is replaced by
    attach points ``a[b1] .. a[bk]``, each marked once.
    """
    ensure_valid(g)
    gaf = g.gaf
    drop_nodes: set[str] = set()
    replace: dict[str, list[str]] = {}
    remark: dict[str, str] = {}
    for c in components(gaf):
        if len(c.attach) != 1 or not c.is_tree:
            continue
        (a,) = c.attach
        nodes = c.attach | c.vertices
        marks = [b for b, v in g.marking if v in nodes]
        if len(marks) == 1:
            continue
        drop_nodes |= nodes
        fresh = [f"{a}[{b}]" for b in marks]
        replace[a] = fresh
        remark.update(zip(marks, fresh))
    if not drop_nodes:
        return g
    A = []
    for a in gaf.attach:
        A.extend(replace.get(a, [a]) if a in drop_nodes else [a])
    half = tuple((h, v) for h, v in gaf.half_edges if v not in drop_nodes)
    keep = {h for h, _ in half}
    edges = tuple(e for e in gaf.edges if e[0] in keep)
    verts = tuple(v for v in gaf.vertices if v not in drop_nodes)
    marking = tuple((b, remark.get(b, v)) for b, v in g.marking)
    return MarkedGaf(Gaf(tuple(A), verts, half, edges), marking)


def minimize(g: Gaf | MarkedGaf):
    """Collapse leaves (inner vertices of valence 1) until none remain.

    Returns ``(minimal, morphism)`` with the composite collapse.
    """
    mg = g if isinstance(g, MarkedGaf) else None
    cur = mg if mg else g
    gaf0 = mg.gaf if mg else g
    ensure_valid(gaf0)
    total = identity_morphism(gaf0)
    while True:
        gaf = cur.gaf if mg else cur
        leaves = [h for h, v in gaf.half_edges if not gaf.is_attach(v) and gaf.valence(v) == 1]
        if not leaves:
            return cur, total
        # leaf edges form stars around their centres, hence a legal forest
        cur, f = collapse_forest(cur, {gaf.edge_of[h] for h in leaves})
        total = compose_morphisms(f, total)


def forget_valence2(g: Gaf) -> Gaf:
    """Erase inner vertices of valence 2, concatenating their two edges.

    A vertex carrying a single loop (a petal) is kept.  A component made only
    of valence-2 inner vertices forming a polygon with two or more corners
    raises :class:`DegenerateCircle`.
    """
    ensure_valid(g)
    for c in components(g):
        if c.attach or len(c.vertices) < 2:
            continue
        if all(g.valence(v) == 2 for v in c.vertices):
            raise DegenerateCircle(f"polygon on {sorted(c.vertices)} has no anchor")
    for v in g.vertices:
        if g.valence(v) == 1:
            raise ValueError(f"inner vertex {v} has valence 1; minimize first")
    half = list(g.half_edges)
    partner = dict(g.partner)
    verts = list(g.vertices)
    changed = True
    while changed:
        changed = False
        for v in verts:
            hs = [h for h, w in half if w == v]
            if len(hs) != 2 or partner[hs[0]] == hs[1]:
                continue
            p, q = partner[hs[0]], partner[hs[1]]
            half = [(h, w) for h, w in half if w != v]
            for h in hs:
                del partner[h]
            partner[p], partner[q] = q, p
            verts.remove(v)
            changed = True
            break
    idx = {h: i for i, (h, _) in enumerate(half)}
    edges = sorted({tuple(sorted((h, partner[h]), key=idx.__getitem__)) for h, _ in half}, key=lambda e: idx[e[0]])
    return Gaf(g.attach, tuple(verts), tuple(half), tuple(edges))


# -- spine objects ---------------------------------------------------------------

_MAX_RANK = 4


def _multigraph_gaf(nv: int, edges: Sequence[tuple[int, int]]) -> Gaf:
    half, pairs = [], []
    for k, (i, j) in enumerate(edges):
        half += [(f"h{2 * k}", f"v{i}"), (f"h{2 * k + 1}", f"v{j}")]
        pairs.append((f"h{2 * k}", f"h{2 * k + 1}"))
    return Gaf((), tuple(f"v{i}" for i in range(nv)), tuple(half), tuple(pairs))


def _connected(nv: int, edges: Sequence[tuple[int, int]]) -> bool:
    adj: dict[int, set[int]] = {i: set() for i in range(nv)}
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    seen, todo = {0}, [0]
    while todo:
        for j in adj[todo.pop()]:
            if j not in seen:
                seen.add(j)
                todo.append(j)
    return len(seen) == nv


def _bump(deg: list[int], i: int, j: int, m: int) -> None:
    # a loop contributes 2 to the valence of its vertex
    deg[i] += m
    deg[j] += m


def _degree_bounded_graphs(nv: int, ne: int):
    """Multiplicity matrices with all degrees >= 3 and nonincreasing, row by row."""
    deg = [0] * nv
    chosen: list[tuple[int, int]] = []

    def row(i: int, left: int):
        if i == nv:
            if left == 0:
                yield list(chosen)
            return
        yield from cell(i, i, left)

    def cell(i: int, j: int, left: int):
        if j == nv:
            if deg[i] < 3 or (i and deg[i] > deg[i - 1]):
                return
            yield from row(i + 1, left)
            return
        for m in range(left + 1):
            _bump(deg, i, j, m)
            chosen.extend([(i, j)] * m)
            yield from cell(i, j + 1, left - m)
            del chosen[len(chosen) - m :]
            _bump(deg, i, j, -m)

    yield from row(0, ne)


def enumerate_spine_objects(n: int) -> list[Gaf]:
    """Connected closed gafs of rank ``n`` with all valences at least 3, one per iso class."""
    if n > _MAX_RANK:
        raise RankTooLarge(f"rank {n} > {_MAX_RANK}")
    if n < 2:
        raise ValueError("spine objects need rank >= 2")
    seen: dict = {}
    for nv in range(1, 2 * n - 1):
        ne = nv + n - 1
        for edges in _degree_bounded_graphs(nv, ne):
            if not _connected(nv, edges):
                continue
            g = _multigraph_gaf(nv, edges)
            cert = certificate(g)
            if cert not in seen:
                seen[cert] = canonical_form(g)[0]
    return sorted(seen.values(), key=lambda g: (len(g.vertices), certificate(g)))


# -- the quotient spine complex ------------------------------------------------------


def _forest_chains(g: Gaf):
    """Strictly increasing chains of nonempty forests, as tuples of frozensets."""
    forests = [frozenset(F) for F in legal_forests(g)]

    def extend(chain):
        yield chain
        last = chain[-1]
        for F in forests:
            if last < F:
                yield from extend(chain + (F,))

    for F in forests:
        yield from extend((F,))


def _colors(g: Gaf, chain: Sequence[frozenset[int]]) -> list[int]:
    col = [0] * len(g.edge_list)
    for i in range(len(chain) - 1, -1, -1):
        for k in chain[i]:
            col[k] = i + 1
    return col


def _chain_of(colors: Sequence[int]) -> tuple[frozenset[int], ...]:
    top = max(colors, default=0)
    return tuple(frozenset(k for k, c in enumerate(colors) if 0 < c <= i) for i in range(1, top + 1))


@dataclass(frozen=True)
class _Cell:
    gaf: Gaf
    colors: tuple[int, ...]

    @property
    def chain(self) -> tuple[frozenset[int], ...]:
        return _chain_of(self.colors)


def _canonical_cell(g: Gaf, colors: Sequence[int]):
    """Canonical representative of an edge-coloured gaf and the relabelling."""
    cg, relabel = canonical_form(g, list(colors))
    ccol = [0] * len(colors)
    for k, (t, _) in enumerate(g.edge_list):
        ccol[cg.edge_of[relabel[t]]] = colors[k]
    return _Cell(cg, tuple(ccol)), relabel


@dataclass
class SpineComplex:
    n: int
    d: int
    objects: list[Gaf]
    cells: dict[int, list[_Cell]]
    """Surviving orbit representatives per degree."""
    killed: dict[int, int]
    """Number of orbits per degree removed by an orientation-reversing stabiliser."""
    differentials: dict[int, dict[tuple[int, int], int]] = field(default_factory=dict)
    """``k -> {(row in degree k-1, column in degree k): coefficient}``."""

    def dims(self) -> list[int]:
        return [len(self.cells.get(k, [])) for k in range(self.top + 1)]

    @property
    def top(self) -> int:
        return max(self.cells, default=0)

    def squares_to_zero(self) -> bool:
        for k in range(2, self.top + 1):
            a, b = self.differentials.get(k - 1, {}), self.differentials.get(k, {})
            by_row: dict[int, list[tuple[int, int]]] = {}
            for (i, j), c in a.items():
                by_row.setdefault(j, []).append((i, c))
            prod: dict[tuple[int, int], int] = {}
            for (j, l), c in b.items():
                for i, c2 in by_row.get(j, ()):
                    prod[(i, l)] = prod.get((i, l), 0) + c2 * c
            if any(prod.values()):
                return False
        return True

    def betti(self) -> list[int]:
        dims = self.dims()
        ranks = {
            k: rank_q(self.differentials.get(k, {}), dims[k - 1], dims[k]) for k in range(1, len(dims))
        }
        return [dims[k] - ranks.get(k, 0) - ranks.get(k + 1, 0) for k in range(len(dims))]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "dims": self.dims(),
            "killed": [self.killed.get(k, 0) for k in range(self.top + 1)],
            "differentials": {
                str(k): [[i, j, c] for (i, j), c in sorted(m.items())] for k, m in sorted(self.differentials.items())
            },
        }


def _alive(cell: _Cell, d: int) -> bool:
    if d % 2 == 0:
        return True
    return all(xi_iso_action(cell.gaf, phi, d) == 1 for phi in automorphisms(cell.gaf, list(cell.colors)))


def _faces(cell: _Cell, d: int):
    """Yield ``(face gaf, face colours, coefficient)`` before canonicalisation."""
    g, chain = cell.gaf, cell.chain
    k = len(chain)
    # drop G0: collapse F1 and carry the rest of the chain along
    g1, f = collapse_forest(g, chain[0])
    s = transport_sign(g, g1, f.vertex_map, f.surviving(), d)
    rest = [frozenset(g1.edge_of[g.edge_list[e][0]] for e in F - chain[0]) for F in chain[1:]]
    yield g1, _colors(g1, rest), s
    for j in range(1, k + 1):
        yield g, _colors(g, chain[: j - 1] + chain[j:]), (-1) ** j


def spine_chain_complex(n: int, d: int, *, experimental: bool = False) -> SpineComplex:
    """Chain complex of the quotient spine in rank ``n`` with the ``xi_d`` twist."""
    if n > 3 and not (experimental and n <= _MAX_RANK):
        raise RankTooLarge(f"rank {n} needs experimental=True (and n <= {_MAX_RANK})")
    objects = enumerate_spine_objects(n)
    orbits: dict[int, dict] = {}
    for g in objects:
        for chain in itertools.chain([()], _forest_chains(g)):
            cell, _ = _canonical_cell(g, _colors(g, chain))
            orbits.setdefault(len(chain), {})
            key = certificate(cell.gaf, list(cell.colors))
            orbits[len(chain)].setdefault(key, cell)
    cells: dict[int, list[_Cell]] = {}
    index: dict[int, dict] = {}
    killed: dict[int, int] = {}
    for k in sorted(orbits):
        keep = [(key, c) for key, c in orbits[k].items() if _alive(c, d)]
        killed[k] = len(orbits[k]) - len(keep)
        cells[k] = [c for _, c in keep]
        index[k] = {key: i for i, (key, _) in enumerate(keep)}
    diffs: dict[int, dict[tuple[int, int], int]] = {}
    for k in sorted(cells):
        if k == 0:
            continue
        m: dict[tuple[int, int], int] = {}
        for j, cell in enumerate(cells[k]):
            for fg, fcol, s in _faces(cell, d):
                key = certificate(fg, fcol)
                i = index[k - 1].get(key)
                if i is None:
                    continue
                canon, relabel = _canonical_cell(fg, fcol)
                vm = {v: relabel.get(v, v) for v in fg.nodes}
                s *= transport_sign(fg, canon.gaf, vm, relabel, d)
                m[(i, j)] = m.get((i, j), 0) + s
        diffs[k] = {ij: c for ij, c in m.items() if c}
    return SpineComplex(n, d, objects, cells, killed, diffs)


def twisted_homology(n: int, d: int, *, experimental: bool = False) -> list[int]:
    """Rational Betti numbers of the quotient spine with the ``xi_d`` twist."""
    return spine_chain_complex(n, d, experimental=experimental).betti()


# -- bounded zigzag search ------------------------------------------------------------


def _collapse_closure(g: MarkedGaf, depth: int) -> set:
    start, _ = minimize(g)
    seen = {certificate(start)}
    frontier = deque([(start, 0)])
    while frontier:
        cur, k = frontier.popleft()
        if k == depth:
            continue
        for e in range(len(cur.gaf.edge_list)):
            if not _legal(cur.gaf, (e,)):
                continue
            nxt, _ = collapse_forest(cur, (e,))
            nxt, _ = minimize(nxt)
            c = certificate(nxt)
            if c not in seen:
                seen.add(c)
                frontier.append((nxt, k + 1))
    return seen


def zigzag_equivalent(g: MarkedGaf, h: MarkedGaf, depth: int = 2) -> bool:
    """Sound test: ``True`` means ``g`` and ``h`` have a common iterated collapse
    within ``depth`` single-edge steps (after leaf minimisation).  ``False`` is
    inconclusive."""
    if tuple(g.target) != tuple(h.target) or tuple(g.source) != tuple(h.source):
        return False
    return bool(_collapse_closure(g, depth) & _collapse_closure(h, depth))
