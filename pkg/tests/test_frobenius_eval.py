from __future__ import annotations

import json
import random
from fractions import Fraction
from pathlib import Path

import pytest
import sympy

from grcob.frobenius_eval import (
    GradedTensorMap,
    InvalidAlgebra,
    SingularPairing,
    algebra_from_dict,
    algebra_to_dict,
    bundled_algebras,
    check_functoriality,
    copairing,
    evaluate,
    validate_frobenius,
)
from grcob.gr_cat import compose, identity, op1, op2, op3
from grcob.graph_core import MarkedGaf, euler_char_rel
from grcob.pool import Bounds, composable_pairs, pool_generate

from helpers import circle, rose
from oracles import frobenius_direct as direct

ALGS = bundled_algebras()
EVEN = ("S2", "T2", "CP2")
FIXTURES = Path(__file__).parent / "fixtures"

S2_DICT = {
    "d": 2,
    "basis": [{"name": "pt", "deg": 0}, {"name": "M", "deg": 2}],
    "unit": "M",
    "product": {"M,M": [["M", 1]], "M,pt": [["pt", 1]], "pt,pt": []},
    "counit": {"pt": "1"},
}


def as_sympy(m: GradedTensorMap) -> sympy.Matrix:
    rows = m.to_dense()
    return sympy.Matrix(len(rows), len(rows[0]) if rows else 0, lambda i, j: sympy.Rational(rows[i][j].numerator, rows[i][j].denominator))


@pytest.mark.parametrize("name", sorted(ALGS))
def test_bundled_algebras_valid(name):
    assert validate_frobenius(ALGS[name]) == []
    copairing(ALGS[name])


def test_s2_by_hand_and_degenerate_counit():
    alg = algebra_from_dict(S2_DICT)
    assert validate_frobenius(alg) == []
    bad = algebra_from_dict({**S2_DICT, "counit": {"M": "1"}})
    msgs = validate_frobenius(bad)
    assert any("degenerate" in m for m in msgs)
    with pytest.raises(SingularPairing):
        copairing(bad)


def test_ground_field():
    k = algebra_from_dict({"d": 0, "basis": [{"name": "1", "deg": 0}], "unit": "1", "product": {"1,1": [["1", 1]]}, "counit": {"1": "1"}})
    assert validate_frobenius(k) == []
    assert copairing(k) == {(0, 0): 1}


def test_copairing_examples():
    s2 = ALGS["S2"]
    pt, M = s2.index["pt"], s2.index["M"]
    assert copairing(s2) == {(pt, M): 1, (M, pt): 1}
    q = ALGS["QX2"]
    one, x = q.index["1"], q.index["x"]
    assert copairing(q) == {(one, x): 1, (x, one): 1}


def test_json_roundtrip():
    for alg in ALGS.values():
        again = algebra_from_dict(algebra_to_dict(alg))
        assert again.mult == alg.mult and again.counit == alg.counit


def test_rejects_bad_degrees():
    bad = {**S2_DICT, "unit": "pt"}
    assert validate_frobenius(algebra_from_dict(bad))
    with pytest.raises(InvalidAlgebra):
        evaluate(MarkedGaf(rose(1), ()), algebra_from_dict(bad))


@pytest.mark.parametrize("name", sorted(ALGS))
def test_basic_operations_against_direct_matrices(name):
    alg = ALGS[name]
    fold = evaluate(op1({"x": "a", "y": "a"}), alg)
    assert as_sympy(fold) == direct.delta(alg)
    proj = evaluate(op1({}, target=("a",)), alg)
    assert as_sympy(proj) == direct.counit(alg)
    unit = evaluate(op2(("a",)), alg)
    assert as_sympy(unit) == direct.times_unit(alg)
    handle = evaluate(op3(("a",), "a", "a"), alg)
    assert as_sympy(handle) == direct.handle(alg)


def test_op2_on_s2_tensors_with_fundamental_class():
    s2 = ALGS["S2"]
    m = evaluate(op2(("a",)), s2)
    pt, M = s2.index["pt"], s2.index["M"]
    assert m.column((pt,)) == {(pt, M): 1}


def test_circle_traces_match_fixture_and_graded_dimension():
    expected = json.loads((FIXTURES / "circle_traces.json").read_text())
    for name in EVEN:
        alg = ALGS[name]
        value = evaluate(circle(), alg).column(())
        got = value.get((), Fraction(0))
        assert got == expected[name]
        assert got == direct.circle_trace(alg)
        assert got == sum(1 if p == 0 else -1 for p in alg.parity)


def test_identity_evaluates_to_identity():
    for alg in ALGS.values():
        m = evaluate(identity(("a", "b")), alg)
        n = alg.dim
        assert as_sympy(m) == sympy.eye(n * n)


def test_unit_axiom_example():
    # op2 at a, then an edge joining the new vertex to a, then keep only a's mark
    g = op2(("a",))
    h = op3(("a", "*"), "*", "a")
    k = op1({"a": "a"}, target=("a", "*"))
    for alg in ALGS.values():
        assert check_functoriality(alg, g, h)
        gh = compose(g, h)
        assert check_functoriality(alg, gh, k)
        m = evaluate(compose(gh, k), alg)
        assert as_sympy(m) == sympy.eye(alg.dim)


def test_functoriality_even_algebras():
    for g, h in composable_pairs(21, 80, Bounds(3, 4, 2, 2)):
        for name in EVEN:
            assert check_functoriality(ALGS[name], g, h)


def test_functoriality_odd_algebra_up_to_sign():
    q = ALGS["QX2"]
    for g, h in composable_pairs(21, 80, Bounds(3, 4, 2, 2)):
        lhs = evaluate(compose(g, h), q)
        rhs = evaluate(h, q).after(evaluate(g, q))
        neg = {k: -v for k, v in rhs.entries.items()}
        assert dict(lhs.entries) in (dict(rhs.entries), neg)


def test_degree_law():
    for g in pool_generate(13, 60, Bounds(3, 4, 2, 2)).items:
        for alg in ALGS.values():
            m = evaluate(g, alg)
            assert m.degree == alg.d * euler_char_rel(g)
            assert m.degree_violations() == []


def test_edge_order_independence():
    rng = random.Random(2)
    for g in pool_generate(14, 60, Bounds(3, 4, 2, 2)).items:
        order = list(range(len(g.gaf.edge_list)))
        rng.shuffle(order)
        for name in EVEN:
            assert evaluate(g, ALGS[name], edge_order=order) == evaluate(g, ALGS[name])
        q = ALGS["QX2"]
        a, b = evaluate(g, q, edge_order=order), evaluate(g, q)
        assert dict(a.entries) in (dict(b.entries), {k: -v for k, v in b.entries.items()})


def test_rose_degree():
    for n in range(1, 6):
        for alg in ALGS.values():
            assert evaluate(MarkedGaf(rose(n), ()), alg).degree == alg.d * (1 - n)
