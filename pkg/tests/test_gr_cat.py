from __future__ import annotations

import pytest

from grcob.collapse_spine import collapse_forest, legal_forests
from grcob.gr_cat import (
    SourceTargetMismatch,
    UnknownLabel,
    compose,
    homotopy_invariants,
    identity,
    op1,
    op2,
    op3,
    tensor,
)
from grcob.graph_core import MarkedGaf, canonical_form, euler_char_rel, validate
from grcob.pool import Bounds, composable_pairs, pool_generate
from grcob.suites import associativity, interchange

from helpers import rose, theta


def canon(g):
    return canonical_form(g)[0]


def test_identity_laws():
    for g in pool_generate(4, 40).items:
        assert canon(compose(identity(g.target), g)) == canon(g)
        assert canon(compose(g, identity(g.source))) == canon(g)


def test_associativity_on_pool():
    res = associativity(11, 100)
    assert res.ok, res.failures


def test_interchange_on_pool():
    res = interchange(12, 60)
    assert res.ok, res.failures


def test_chi_additive_literal_identity():
    for g, h in composable_pairs(9, 100, Bounds(3, 4, 2, 2)):
        k = compose(g, h)
        B = g.source
        assert euler_char_rel(k) == euler_char_rel(g) + euler_char_rel(h) + len(B) - len(h.target)
        assert euler_char_rel(k) == euler_char_rel(g) + euler_char_rel(h)


def test_compose_checks_endpoints():
    with pytest.raises(SourceTargetMismatch):
        compose(identity(("a",)), identity(("b",)))


def test_operations_are_valid():
    assert validate(op1({"x": "a", "y": "a"})) == []
    assert op1({"x": "a", "y": "a"}).fiber("a") == ["x", "y"]
    assert validate(op2(("a", "b"))) == []
    g = op3(("a", "b"), "a", "a")
    assert g.gaf.endpoints(0) == ("a", "a")
    with pytest.raises(UnknownLabel):
        op3(("a",), "a", "z")
    with pytest.raises(UnknownLabel):
        op1({"x": "q"}, target=("a",))


def test_tensor_prefixes_only_on_collision():
    g, h = identity(("a",)), identity(("b",))
    assert tensor(g, h).target == ("a", "b")
    gg = tensor(g, g)
    assert gg.target == ("L.a", "R.a")
    assert gg.source == ("L.a", "R.a")


def test_invariants_distinguish_and_agree():
    A = ("a",)
    assert homotopy_invariants(identity(A)) != homotopy_invariants(op3(A, "a", "a"))
    closed_rose = MarkedGaf(rose(2), ())
    closed_theta = MarkedGaf(theta(), ())
    assert homotopy_invariants(closed_rose) == homotopy_invariants(closed_theta)


def test_invariants_unchanged_by_leaf_collapse():
    for g in pool_generate(6, 80, Bounds(3, 4, 2, 2)).items:
        for F in legal_forests(g.gaf, max_size=1):
            g2, _ = collapse_forest(g, F)
            assert homotopy_invariants(g2) == homotopy_invariants(g)
