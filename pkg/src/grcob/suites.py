"""Seeded property suites shared by ``grcob check`` and the test-suite."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .collapse_spine import collapse_forest, legal_forests, validate_morphism
from .det_coeff import xi_compose_sign, xi_object
from .frobenius_eval import bundled_algebras, check_functoriality, evaluate, validate_frobenius
from .gr_cat import compose, homotopy_invariants, tensor
from .graph_core import canonical_form, euler_char_rel
from .pool import Bounds, composable_pairs, composable_triples, pool_generate

__all__ = ["SuiteResult", "SUITES", "run_suite"]

# algebras whose unit has even degree; the untwisted identities hold for these
EVEN = ("S2", "T2")


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "ok" if self.ok else "FAILED"
        return f"{self.name}: {self.checked - len(self.failures)}/{self.checked} {status}"


def functoriality(seed: int, n: int) -> SuiteResult:
    res = SuiteResult("functoriality")
    algs = bundled_algebras()
    for i, (g, h) in enumerate(composable_pairs(seed, n, Bounds(5, 6, 2, 2))):
        for name in EVEN:
            res.checked += 1
            if not check_functoriality(algs[name], g, h):
                res.failures.append(f"pair {i} over {name}")
    return res


def associativity(seed: int, n: int) -> SuiteResult:
    res = SuiteResult("associativity")
    for i, (g, h, k) in enumerate(composable_triples(seed, n, Bounds(3, 3, 2, 2))):
        res.checked += 1
        left = canonical_form(compose(compose(g, h), k))[0]
        right = canonical_form(compose(g, compose(h, k)))[0]
        if left != right:
            res.failures.append(f"triple {i}")
    return res


def interchange(seed: int, n: int) -> SuiteResult:
    res = SuiteResult("interchange")
    pairs = composable_pairs(seed, 2 * n, Bounds(3, 3, 2, 2))
    for i in range(n):
        (g, h), (g2, h2) = pairs[2 * i], pairs[2 * i + 1]
        res.checked += 1
        left = tensor(compose(g, h), compose(g2, h2))
        right = compose(tensor(g, g2), tensor(h, h2))
        if canonical_form(left)[0] != canonical_form(right)[0]:
            res.failures.append(f"pair {i}")
    return res


def cocycle(seed: int, n: int) -> SuiteResult:
    res = SuiteResult("cocycle")
    for i, (g, h, k) in enumerate(composable_triples(seed, n, Bounds(3, 3, 2, 2))):
        gh, hk = compose(g, h), compose(h, k)
        for d in (1, 2, 3):
            res.checked += 1
            lhs = xi_compose_sign(gh, k, d) * xi_compose_sign(g, h, d)
            rhs = xi_compose_sign(g, hk, d) * xi_compose_sign(h, k, d)
            if lhs != rhs:
                res.failures.append(f"triple {i}, d={d}")
    return res


def collapse(seed: int, n: int) -> SuiteResult:
    """``n`` (marked gaf, legal forest) pairs: evaluation, invariants, degrees."""
    res = SuiteResult("collapse")
    algs = bundled_algebras()
    rng = random.Random(seed)
    pool = iter(pool_generate(seed, 50 * n + 50, Bounds(4, 5, 2, 2)).items)
    while res.checked < n:
        g = next(pool)
        forests = legal_forests(g.gaf)
        if not forests:
            continue
        F = rng.choice(forests)
        res.checked += 1
        g2, f = collapse_forest(g, F)
        problems = [str(v) for v in validate_morphism(f)]
        if homotopy_invariants(g) != homotopy_invariants(g2):
            problems.append("invariants")
        if euler_char_rel(g) != euler_char_rel(g2):
            problems.append("chi")
        for d in (1, 2):
            if xi_object(g.gaf, d).degree != xi_object(g2.gaf, d).degree:
                problems.append(f"xi degree d={d}")
        for name in ("S2", "T2", "CP2"):
            if evaluate(g, algs[name]) != evaluate(g2, algs[name]):
                problems.append(f"evaluation over {name}")
        if problems:
            res.failures.append(f"item {res.checked - 1} forest {F}: {', '.join(problems)}")
    return res


def degree(seed: int, n: int) -> SuiteResult:
    res = SuiteResult("degree")
    algs = bundled_algebras()
    for i, g in enumerate(pool_generate(seed, n, Bounds(3, 4, 2, 2)).items):
        chi = euler_char_rel(g)
        for name, alg in algs.items():
            res.checked += 1
            m = evaluate(g, alg)
            if m.degree != alg.d * chi or m.degree_violations():
                res.failures.append(f"item {i} over {name}")
            if xi_object(g.gaf, alg.d).degree != alg.d * chi:
                res.failures.append(f"item {i}: xi degree, d={alg.d}")
    return res


def frobenius(seed: int, n: int) -> SuiteResult:
    res = SuiteResult("frobenius")
    for name, alg in bundled_algebras().items():
        res.checked += 1
        bad = validate_frobenius(alg)
        if bad:
            res.failures.append(f"{name}: {'; '.join(bad)}")
    return res


SUITES = {
    "functoriality": functoriality,
    "associativity": associativity,
    "interchange": interchange,
    "cocycle": cocycle,
    "collapse": collapse,
    "degree": degree,
    "frobenius": frobenius,
}


def run_suite(name: str, seed: int, n: int) -> SuiteResult:
    return SUITES[name](seed, n)
