from __future__ import annotations

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from grcob.exact_linalg import rank, snf
from grcob.graph_core import (
    Gaf,
    MarkedGaf,
    automorphisms,
    based_tree_components,
    canonical_form,
    certificate,
    components,
    euler_char_rel,
    gaf_from_dict,
    gaf_to_dict,
    is_isomorphic,
    rel_chain_complex,
    validate,
)
from grcob.gr_cat import tensor
from grcob.pool import Bounds, pool_generate

from helpers import build, dumbbell, rose, theta


def _relabel(g: MarkedGaf, rng: random.Random) -> MarkedGaf:
    """Random renaming and reordering of inner vertices and half-edges."""
    gaf = g.gaf
    vs = list(gaf.vertices)
    rng.shuffle(vs)
    vname = {v: f"w{i}" for i, v in enumerate(vs)}
    vname.update({a: a for a in gaf.attach})
    half = list(gaf.half_edges)
    rng.shuffle(half)
    hname = {h: f"k{i}" for i, (h, _) in enumerate(half)}
    edges = [(hname[b], hname[a]) if rng.random() < 0.5 else (hname[a], hname[b]) for a, b in gaf.edges]
    rng.shuffle(edges)
    out = Gaf(gaf.attach, tuple(vname[v] for v in vs), tuple((hname[h], vname[v]) for h, v in half), tuple(edges))
    return MarkedGaf(out, tuple((b, vname[v]) for b, v in g.marking))


def test_validate_reports_each_problem():
    assert validate(theta()) == []
    bad = Gaf((), ("x",), (("a", "x"), ("b", "y")), (("a", "a"),))
    kinds = {v.kind for v in validate(bad)}
    assert {"fixpoint in edge involution", "dangling incidence", "unpaired half-edge"} <= kinds
    mg = MarkedGaf(theta(), (("b", "nowhere"),))
    assert [v.kind for v in validate(mg)] == ["dangling marking"]
    dup = Gaf(("a",), ("a",), (), ())
    assert any(v.kind == "label is both attach and inner vertex" for v in validate(dup))


def test_euler_characteristic_examples():
    assert euler_char_rel(theta()) == -1
    assert euler_char_rel(rose(3)) == -2
    assert euler_char_rel(Gaf(("a", "b"), (), (), ())) == 0


def test_components_and_based_trees():
    g = build(("a", "b"), ("p", "q", "r"), [("a", "p"), ("q", "q"), ("b", "r"), ("r", "b")])
    comps = components(g)
    assert len(comps) == 3
    trees = based_tree_components(g)
    assert [sorted(c.attach) for c in trees] == [["a"]]
    # a component disjoint from A is never a based tree
    assert based_tree_components(build((), ("x", "y"), [("x", "y")])) == []


def test_components_of_disjoint_union():
    pool = pool_generate(5, 30).items
    for g, h in zip(pool[::2], pool[1::2]):
        u = tensor(g, h)
        assert len(components(u.gaf)) == len(components(g.gaf)) + len(components(h.gaf))


def test_homology_ranks_from_boundary():
    for g in pool_generate(8, 60, Bounds(3, 4, 2, 2)).items:
        d = rel_chain_complex(g.gaf).boundary
        r = rank(d)
        h1 = d.cols - r
        if all(x in (0, 1) for x in snf(d).diagonal):
            h0 = d.rows - r
            assert h0 - h1 == euler_char_rel(g)


def test_theta_boundary():
    d = rel_chain_complex(theta()).boundary
    assert d.to_lists() == [[-1, -1, -1], [1, 1, 1]]


def test_automorphism_counts():
    assert len(automorphisms(theta())) == 12
    assert len(automorphisms(rose(2))) == 8
    assert len(automorphisms(dumbbell())) == 8


def test_rose_theta_dumbbell_distinct():
    certs = {certificate(g) for g in (theta(), rose(2), dumbbell())}
    assert len(certs) == 3


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_canonical_form_invariant_and_idempotent(seed):
    rng = random.Random(seed)
    g = pool_generate(seed, 1, Bounds(3, 4, 2, 2)).items[0]
    h = _relabel(g, rng)
    c1, _ = canonical_form(g)
    c2, _ = canonical_form(h)
    assert c1 == c2
    assert canonical_form(c1)[0] == c1
    assert is_isomorphic(g, h)


def test_canonical_relabel_is_an_isomorphism():
    g = MarkedGaf(theta(), (("b", "x"),))
    c, relabel = canonical_form(g)
    for h, v in g.gaf.half_edges:
        assert c.gaf.sigma[relabel[h]] == relabel[v]
    assert c.mark["b"] == relabel["x"]


def test_json_roundtrip():
    for g in pool_generate(2, 20).items:
        assert gaf_from_dict(gaf_to_dict(g)) == g
    plain = gaf_from_dict(gaf_to_dict(theta()))
    assert isinstance(plain, Gaf) and plain == theta()
