"""The determinant-line coefficient system over the integers.

For a gaf ``G`` attached to ``A`` the line is
``det(H_0(G,A)[1])^d (x) det(H_1(G,A)[1])^-d``, of degree ``d * chi(G,A)``.
Its canonical generator is built from canonical bases:

* ``H_1``: fundamental cycles of the non-forest edges of the greedy spanning
  forest of ``G/A`` (edges taken in edge-list order, all of ``A`` treated as
  one ground node).  A cycle's coordinates are simply its coefficients on the
  non-forest edges.
* ``H_0``: one vertex per component disjoint from ``A`` (its first inner
  vertex), ordered by that vertex.

Signs are plain ints ``+1``/``-1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .exact_linalg import IntMatrix, determinant, kernel_basis, snf
from .graph_core import Gaf, GafIso, MarkedGaf, ensure_valid
from .gr_cat import GrMorphism, SourceTargetMismatch, compose_with_maps

__all__ = [
    "DetLineObject",
    "HomologyBases",
    "NotAnAutomorphism",
    "homology_bases",
    "xi_object",
    "les_maps",
    "les_sign",
    "xi_compose_sign",
    "xi_tensor_sign",
    "xi_iso_action",
    "iso_action_matrices",
    "transport_sign",
]

_GROUND = None  # all attach points collapse to this node


class NotAnAutomorphism(ValueError):
    pass


def _gaf(g: Gaf | MarkedGaf) -> Gaf:
    return g.gaf if isinstance(g, MarkedGaf) else g


@dataclass(frozen=True)
class HomologyBases:
    gaf: Gaf
    forest: tuple[int, ...]
    nonforest: tuple[int, ...]
    cycles: tuple[tuple[int, ...], ...]
    """One vector in ``Z^E`` per non-forest edge."""
    reps: tuple[str, ...]
    """Representative inner vertex per component disjoint from ``A``."""
    comp_of: dict
    """Inner vertex -> index into ``reps``, or ``None`` if its component meets ``A``."""

    @property
    def rank_h0(self) -> int:
        return len(self.reps)

    @property
    def rank_h1(self) -> int:
        return len(self.nonforest)

    def h1_coords(self, z: Sequence[int]) -> list[int]:
        return [z[k] for k in self.nonforest]

    def h0_coords(self, chain: dict[str, int]) -> list[int]:
        out = [0] * len(self.reps)
        for v, c in chain.items():
            i = self.comp_of.get(v)
            if i is not None:
                out[i] += c
        return out

    def h1_matrix(self) -> IntMatrix:
        return IntMatrix.from_columns(self.cycles, len(self.gaf.edge_list))

    def h0_matrix(self) -> IntMatrix:
        vidx = {v: i for i, v in enumerate(self.gaf.vertices)}
        cols = []
        for r in self.reps:
            col = [0] * len(self.gaf.vertices)
            col[vidx[r]] = 1
            cols.append(col)
        return IntMatrix.from_columns(cols, len(self.gaf.vertices))


def homology_bases(g: Gaf | MarkedGaf) -> HomologyBases:
    g = _gaf(g)
    ensure_valid(g)

    def node(v):
        return _GROUND if g.is_attach(v) else v

    parent = {v: v for v in g.vertices}
    parent[_GROUND] = _GROUND

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    forest, nonforest = [], []
    adj: dict = {}
    for k in range(len(g.edge_list)):
        x, y = (node(v) for v in g.endpoints(k))
        rx, ry = find(x), find(y)
        if rx == ry:
            nonforest.append(k)
        else:
            parent[ry] = rx
            forest.append(k)
            adj.setdefault(x, []).append((k, y))
            adj.setdefault(y, []).append((k, x))

    def path(src, dst) -> dict[int, int]:
        """Signed edge chain of the forest path from ``src`` to ``dst``."""
        if src == dst:
            return {}
        prev = {src: None}
        stack = [src]
        while stack:
            x = stack.pop()
            for k, y in adj.get(x, ()):
                if y not in prev:
                    prev[y] = (k, x)
                    stack.append(y)
        out: dict[int, int] = {}
        y = dst
        while prev[y] is not None:
            k, x = prev[y]
            tail = node(g.sigma[g.edge_list[k][0]])
            out[k] = 1 if tail == x else -1
            y = x
        return out

    cycles = []
    E = len(g.edge_list)
    for k in nonforest:
        t, h = (node(v) for v in g.endpoints(k))
        z = [0] * E
        z[k] = 1
        for j, s in path(h, t).items():
            z[j] += s
        cycles.append(tuple(z))

    reps: list[str] = []
    comp_of: dict = {}
    root_rep: dict = {}
    ground_root = find(_GROUND)
    for v in g.vertices:
        r = find(v)
        if r == ground_root:
            comp_of[v] = None
            continue
        if r not in root_rep:
            root_rep[r] = len(reps)
            reps.append(v)
        comp_of[v] = root_rep[r]
    return HomologyBases(g, tuple(forest), tuple(nonforest), tuple(cycles), tuple(reps), comp_of)


@dataclass(frozen=True)
class DetLineObject:
    degree: int
    h0_basis: IntMatrix
    h1_basis: IntMatrix
    d: int


def xi_object(g: Gaf | MarkedGaf, d: int) -> DetLineObject:
    hb = homology_bases(g)
    return DetLineObject(d * (hb.rank_h0 - hb.rank_h1), hb.h0_matrix(), hb.h1_matrix(), d)


# -- the long exact sequence of a composite ---------------------------------


def _edge_image(src: Gaf, dst: Gaf, lab: dict[str, str], k: int) -> tuple[int, int]:
    """Position and orientation sign of edge ``k`` of ``src`` inside ``dst``."""
    t, _ = src.edge_list[k]
    kk = dst.edge_of[lab[t]]
    return kk, (1 if dst.edge_list[kk][0] == lab[t] else -1)


def les_maps(g: GrMorphism, h: GrMorphism):
    """The six groups and five maps of the exact sequence

    ``0 -> H1(G,A) -> H1(K,A) -> H1(G',B) -> H0(G,A) -> H0(K,A) -> H0(G',B) -> 0``

    for ``K = g o h``, ``G = g``, ``G' = h``, as integer matrices in
    canonical coordinates.  Returns ``(ranks, maps, gluing)``.
    """
    glue = compose_with_maps(g, h)
    G, H, K = g.gaf, h.gaf, glue.composite.gaf
    bG, bH, bK = homology_bases(G), homology_bases(H), homology_bases(K)
    EK = len(K.edge_list)

    # H1(G,A) -> H1(K,A)
    f1 = []
    for z in bG.cycles:
        w = [0] * EK
        for k, c in enumerate(z):
            if c:
                kk, s = _edge_image(G, K, glue.g_map, k)
                w[kk] += s * c
        f1.append(bK.h1_coords(w))
    # H1(K,A) -> H1(G',B): keep the edges coming from h
    back = {}
    for k in range(len(H.edge_list)):
        kk, s = _edge_image(H, K, glue.h_map, k)
        back[kk] = (k, s)
    f2 = []
    for z in bK.cycles:
        w = [0] * len(H.edge_list)
        for kk, c in enumerate(z):
            if c and kk in back:
                k, s = back[kk]
                w[k] += s * c
        f2.append(bH.h1_coords(w))
    # connecting map: boundary of a relative cycle of h lands on B, then in G
    f3 = []
    for z in bH.cycles:
        chain: dict[str, int] = {}
        for k, c in enumerate(z):
            if not c:
                continue
            x, y = H.endpoints(k)
            for v, s in ((y, c), (x, -c)):
                if H.is_attach(v):
                    gv = g.mark[v]
                    chain[gv] = chain.get(gv, 0) + s
        f3.append(bG.h0_coords(chain))
    # H0(G,A) -> H0(K,A)
    f4 = [bK.h0_coords({glue.g_map[r]: 1}) for r in bG.reps]
    # H0(K,A) -> H0(G',B)
    from_h = {glue.h_map[v]: v for v in H.vertices}
    f5 = [bH.h0_coords({from_h[r]: 1}) if r in from_h else [0] * bH.rank_h0 for r in bK.reps]

    ranks = [bG.rank_h1, bK.rank_h1, bH.rank_h1, bG.rank_h0, bK.rank_h0, bH.rank_h0]
    maps = [
        IntMatrix.from_columns(cols, ranks[i + 1]) if cols else IntMatrix.zeros(ranks[i + 1], 0)
        for i, cols in enumerate((f1, f2, f3, f4, f5))
    ]
    return ranks, maps, glue


def _lift(f: IntMatrix, y: Sequence[int]) -> list[int]:
    """An integral preimage of ``y`` under ``f`` (which must exist)."""
    res = snf(f)
    uy = [sum(res.U[i, j] * y[j] for j in range(f.rows)) for i in range(f.rows)]
    x = [0] * f.cols
    for i, dii in enumerate(res.diagonal):
        if dii:
            if uy[i] % dii:
                raise ArithmeticError("vector is not in the integral image")
            x[i] = uy[i] // dii
    for i in range(res.rank, f.rows):
        if uy[i]:
            raise ArithmeticError("vector is not in the image")
    return [sum(res.V[i, j] * x[j] for j in range(f.cols)) for i in range(f.cols)]


def les_sign(ranks: Sequence[int], maps: Sequence[IntMatrix]) -> int:
    """Sign of the determinant isomorphism of an exact sequence of free modules.

    For each group ``V_k`` the canonical basis is compared with
    ``[basis of im f_(k-1), lifts of a basis of im f_k]``; the product of the
    determinant signs does not depend on the intermediate choices.
    """
    n = len(ranks)
    for i in range(n - 2):
        if not (maps[i + 1] @ maps[i]).is_zero():
            raise ArithmeticError(f"sequence is not a complex at position {i + 1}")
    images: list[list[tuple[int, ...]]] = [[]]
    for k in range(n - 1):
        # im f_k = ker f_(k+1) by exactness; the last group is hit entirely
        if k + 1 < n - 1:
            images.append(kernel_basis(maps[k + 1]).columns())
        else:
            images.append(IntMatrix.identity(ranks[n - 1]).columns())
    images.append([])
    sign = 1
    for k in range(n):
        cols = list(images[k])
        if k < n - 1:
            cols += [tuple(_lift(maps[k], s)) for s in images[k + 1]]
        if len(cols) != ranks[k]:
            raise ArithmeticError(f"sequence is not exact at position {k}")
        if ranks[k] == 0:
            continue
        det = determinant(IntMatrix.from_columns(cols, ranks[k]))
        if det not in (1, -1):
            raise ArithmeticError(f"sequence is not split exact over Z at position {k}")
        sign *= det
    return sign


def xi_compose_sign(g: GrMorphism, h: GrMorphism, d: int) -> int:
    """Sign comparing the canonical generator of ``xi_d(g o h)`` with the
    image of ``gen(h) (x) gen(g)`` under the exact-sequence isomorphism."""
    if tuple(h.target) != tuple(g.source):
        raise SourceTargetMismatch(f"target of h {list(h.target)} != source of g {list(g.source)}")
    if d % 2 == 0:
        return 1
    ranks, maps, _ = les_maps(g, h)
    return les_sign(ranks, maps) * _shift_sign(ranks)


def _shift_sign(ranks: Sequence[int]) -> int:
    # Koszul sign from reassembling the shifted blocks of the sequence
    # H1 G -> H1 K -> H1 G' -> H0 G -> H0 K -> H0 G' into gen(h) (x) gen(g).
    g1, k1, h1, g0, _, _ = ranks
    q = g1 * k1 + g1 * h1 + k1 + k1 * h1 + h1 * g0
    return -1 if q % 2 else 1


def xi_tensor_sign(g: Gaf | MarkedGaf, h: Gaf | MarkedGaf, d: int) -> int:
    """Koszul sign of ``xi(g) (x) xi(h) -> xi(g u h)``.

    Only the ``H_1`` block of ``g`` (degree ``-d r1(g)``) has to move past
    the whole line of ``h`` (degree ``d chi(h)``).
    """
    bg, bh = homology_bases(g), homology_bases(h)
    e = d * d * bg.rank_h1 * (bh.rank_h0 + bh.rank_h1)
    return -1 if e % 2 else 1


def _check_automorphism(g: Gaf, phi: GafIso) -> None:
    vm, hm = phi.vertex_map, phi.half_edge_map
    if set(vm) != set(g.nodes) or set(vm.values()) != set(g.nodes):
        raise NotAnAutomorphism("vertex map is not a bijection of the vertex set")
    for a in g.attach:
        if vm[a] != a:
            raise NotAnAutomorphism(f"attach point {a} is not fixed")
    hs = {x for x, _ in g.half_edges}
    if set(hm) != hs or set(hm.values()) != hs:
        raise NotAnAutomorphism("half-edge map is not a bijection")
    for x, v in g.half_edges:
        if g.sigma[hm[x]] != vm[v]:
            raise NotAnAutomorphism(f"incidence of {x} not preserved")
        if hm[g.partner[x]] != g.partner[hm[x]]:
            raise NotAnAutomorphism(f"edge of {x} not preserved")


def iso_action_matrices(g: Gaf | MarkedGaf, phi: GafIso) -> tuple[IntMatrix, IntMatrix]:
    """Matrices of ``phi`` on ``H_0(G,A)`` and ``H_1(G,A)`` in canonical bases."""
    g = _gaf(g)
    _check_automorphism(g, phi)
    hb = homology_bases(g)
    cols1 = []
    for z in hb.cycles:
        w = [0] * len(g.edge_list)
        for k, c in enumerate(z):
            if c:
                kk, s = _edge_image(g, g, phi.half_edge_map, k)
                w[kk] += s * c
        cols1.append(hb.h1_coords(w))
    cols0 = [hb.h0_coords({phi.vertex_map[r]: 1}) for r in hb.reps]
    m0 = IntMatrix.from_columns(cols0, hb.rank_h0) if cols0 else IntMatrix.zeros(0, 0)
    m1 = IntMatrix.from_columns(cols1, hb.rank_h1) if cols1 else IntMatrix.zeros(0, 0)
    return m0, m1


def xi_iso_action(g: Gaf | MarkedGaf, phi: GafIso, d: int) -> int:
    """``(det phi|H0)^d * (det phi|H1)^d``."""
    m0, m1 = iso_action_matrices(g, phi)
    s = determinant(m0) * determinant(m1)
    return s if d % 2 else 1


def transport_sign(src: Gaf, dst: Gaf, vertex_map, half_edge_map, d: int) -> int:
    """Sign by which a homotopy equivalence ``src -> dst`` carries the
    canonical generator of ``xi_d(src)`` to that of ``xi_d(dst)``.

    ``half_edge_map`` sends surviving half-edges of ``src`` to ``dst``;
    edges whose half-edges are absent are collapsed (sent to zero).  Works
    for isomorphisms and for forest collapses alike.
    """
    bs, bd = homology_bases(src), homology_bases(dst)
    if (bs.rank_h0, bs.rank_h1) != (bd.rank_h0, bd.rank_h1):
        raise ValueError("map does not preserve homology ranks")
    if d % 2 == 0:
        return 1
    cols1 = []
    for z in bs.cycles:
        w = [0] * len(dst.edge_list)
        for k, c in enumerate(z):
            if c and src.edge_list[k][0] in half_edge_map:
                kk, s = _edge_image(src, dst, half_edge_map, k)
                w[kk] += s * c
        cols1.append(bd.h1_coords(w))
    cols0 = [bd.h0_coords({vertex_map[r]: 1}) for r in bs.reps]
    d0 = determinant(IntMatrix.from_columns(cols0, bd.rank_h0)) if cols0 else 1
    d1 = determinant(IntMatrix.from_columns(cols1, bd.rank_h1)) if cols1 else 1
    if abs(d0 * d1) != 1:
        raise ValueError("map is not an isomorphism on homology")
    return d0 * d1
