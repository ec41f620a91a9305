from __future__ import annotations

from grcob.graph_core import components, validate
from grcob.pool import Bounds, composable_pairs, composable_triples, pool_generate


def test_same_seed_same_bytes():
    assert pool_generate(99, 50).dumps() == pool_generate(99, 50).dumps()
    assert pool_generate(99, 50).dumps() != pool_generate(100, 50).dumps()


def test_zero_bounds_give_empty_morphisms():
    for g in pool_generate(5, 40, Bounds(0, 0, 2, 2)).items:
        assert g.gaf.vertices == () and g.gaf.num_edges == 0
        assert validate(g) == []


def test_pool_items_valid_and_within_bounds():
    b = Bounds(3, 4, 2, 2)
    for g in pool_generate(6, 200, b).items:
        assert validate(g) == []
        assert len(g.gaf.vertices) <= b.v_max and g.gaf.num_edges <= b.e_max
        assert len(g.target) <= b.a_max and len(g.source) <= b.b_max


def test_structural_variety():
    items = pool_generate(7, 300, Bounds(3, 4, 2, 2)).items
    loops = any(g.gaf.endpoints(k)[0] == g.gaf.endpoints(k)[1] for g in items for k in range(g.gaf.num_edges))
    multi = any(
        len({tuple(sorted(g.gaf.endpoints(k))) for k in range(g.gaf.num_edges)}) < g.gaf.num_edges for g in items
    )
    isolated = any(g.gaf.valence(v) == 0 for g in items for v in g.gaf.vertices)
    empty_marking = any(not g.marking for g in items)
    assert loops and multi and isolated and empty_marking
    assert any(len(components(g.gaf)) > 1 for g in items)


def test_composable():
    for g, h in composable_pairs(8, 50):
        assert h.target == g.source
    for g, h, k in composable_triples(8, 50):
        assert h.target == g.source and k.target == h.source
