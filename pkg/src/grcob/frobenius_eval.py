"""Graded commutative Frobenius algebras and state-sum evaluation of gafs.

Degrees are homological: the unit sits in degree ``d``, the product has degree
``-d`` and the counit is supported in degree 0 (think ``H_*(M)`` with the
intersection product).  Koszul signs use the parity of the codegree
``d - deg``, which is the grading in which the product is degree-preserving.

Tensor elements are sparse dicts ``{basis index tuple: Fraction}``.  Every
operator is applied by moving its input factors to the front, acting there,
and moving the outputs back, each move paying the Koszul sign.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from itertools import product as iproduct
from typing import Any, Callable, Iterable, Mapping, Sequence

from .graph_core import MarkedGaf, ensure_valid
from .gr_cat import GrMorphism, SourceTargetMismatch, compose

__all__ = [
    "FrobeniusAlgebra",
    "GradedTensorMap",
    "InvalidAlgebra",
    "SingularPairing",
    "SourceMismatch",
    "validate_frobenius",
    "copairing",
    "evaluate",
    "check_functoriality",
    "algebra_from_dict",
    "algebra_to_dict",
    "load_algebra",
    "bundled_algebras",
]

Tensor = dict[tuple[int, ...], Fraction]


class InvalidAlgebra(ValueError):
    pass


class SingularPairing(InvalidAlgebra):
    pass


class SourceMismatch(ValueError):
    pass


@dataclass(frozen=True)
class FrobeniusAlgebra:
    d: int
    names: tuple[str, ...]
    degrees: tuple[int, ...]
    unit: str
    mult: tuple[tuple[tuple[Fraction, ...], ...], ...]
    """``mult[i][j][k]`` is the coefficient of ``e_k`` in ``e_i * e_j``."""
    counit: tuple[Fraction, ...]
    label: str = ""

    @property
    def dim(self) -> int:
        return len(self.names)

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    @cached_property
    def parity(self) -> tuple[int, ...]:
        return tuple((self.d - x) % 2 for x in self.degrees)

    @property
    def unit_index(self) -> int:
        return self.index[self.unit]

    def mul(self, i: int, j: int) -> dict[int, Fraction]:
        return {k: c for k, c in enumerate(self.mult[i][j]) if c}

    def gram(self) -> list[list[Fraction]]:
        """``c(e_i, e_j) = counit(e_i e_j)``."""
        n = self.dim
        return [[sum(self.mult[i][j][k] * self.counit[k] for k in range(n)) for j in range(n)] for i in range(n)]

    @cached_property
    def copairing_matrix(self) -> list[list[Fraction]]:
        inv = _invert(self.gram())
        if inv is None:
            raise SingularPairing("pairing counit(a*b) is degenerate")
        return inv

    @cached_property
    def delta_table(self) -> tuple[dict[tuple[int, int], Fraction], ...]:
        """``Delta(e_i) = (mu (x) id)(e_i (x) u)``."""
        M = self.copairing_matrix
        n = self.dim
        out = []
        for i in range(n):
            t: dict[tuple[int, int], Fraction] = {}
            for a in range(n):
                for b in range(n):
                    if not M[a][b]:
                        continue
                    for k, c in self.mul(i, a).items():
                        t[(k, b)] = t.get((k, b), 0) + c * M[a][b]
            out.append({k: v for k, v in t.items() if v})
        return tuple(out)

    def koszul(self, factors: Sequence[int], order: Sequence[int]) -> int:
        """Sign of rearranging graded factors into ``[factors[i] for i in order]``."""
        s = 0
        p = self.parity
        for x in range(len(order)):
            for y in range(x + 1, len(order)):
                if order[x] > order[y]:
                    s += p[factors[order[x]]] * p[factors[order[y]]]
        return -1 if s % 2 else 1


def _invert(m: list[list[Fraction]]) -> list[list[Fraction]] | None:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        p = a[c][c]
        a[c] = [x / p for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


# -- construction and JSON -----------------------------------------------------


def algebra_from_dict(data: Mapping[str, Any], label: str = "") -> FrobeniusAlgebra:
    try:
        d = int(data["d"])
        names = tuple(str(b["name"]) for b in data["basis"])
        degrees = tuple(int(b["deg"]) for b in data["basis"])
        unit = str(data["unit"])
        idx = {n: i for i, n in enumerate(names)}
        n = len(names)
        par = [(d - x) % 2 for x in degrees]
        table: dict[tuple[int, int], list[Fraction]] = {}
        for key, terms in data.get("product", {}).items():
            a, b = (s.strip() for s in key.split(","))
            vec = [Fraction(0)] * n
            for name, coeff in terms:
                vec[idx[name]] += Fraction(str(coeff))
            table[(idx[a], idx[b])] = vec
        # missing orders are filled in by graded commutativity
        for (i, j), vec in list(table.items()):
            if (j, i) not in table:
                s = -1 if par[i] * par[j] else 1
                table[(j, i)] = [s * x for x in vec]
        mult = tuple(
            tuple(tuple(table.get((i, j), [Fraction(0)] * n)) for j in range(n)) for i in range(n)
        )
        counit = [Fraction(0)] * n
        for name, coeff in data.get("counit", {}).items():
            counit[idx[name]] = Fraction(str(coeff))
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise InvalidAlgebra(f"malformed algebra: {exc!r}") from exc
    if unit not in idx:
        raise InvalidAlgebra(f"unit {unit!r} is not a basis element")
    return FrobeniusAlgebra(d, names, degrees, unit, mult, tuple(counit), label or str(data.get("label", "")))


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def algebra_to_dict(alg: FrobeniusAlgebra) -> dict[str, Any]:
    product = {}
    for i in range(alg.dim):
        for j in range(alg.dim):
            terms = [[alg.names[k], _frac_str(c)] for k, c in alg.mul(i, j).items()]
            product[f"{alg.names[i]},{alg.names[j]}"] = terms
    out = {
        "d": alg.d,
        "basis": [{"name": n, "deg": g} for n, g in zip(alg.names, alg.degrees)],
        "unit": alg.unit,
        "product": product,
        "counit": {alg.names[k]: _frac_str(c) for k, c in enumerate(alg.counit) if c},
    }
    if alg.label:
        out["label"] = alg.label
    return out


BUNDLED = ("S2", "T2", "CP2", "QX2")


def load_algebra(name_or_path: str) -> FrobeniusAlgebra:
    """Load a bundled algebra by name (``S2``, ``T2``, ``CP2``, ``QX2``) or a JSON file."""
    if name_or_path.upper() in BUNDLED:
        text = resources.files("grcob.data").joinpath(f"{name_or_path.lower()}.json").read_text("utf-8")
        return algebra_from_dict(json.loads(text), name_or_path.upper())
    with open(name_or_path, encoding="utf-8") as fh:
        return algebra_from_dict(json.load(fh))


def bundled_algebras() -> dict[str, FrobeniusAlgebra]:
    return {n: load_algebra(n) for n in BUNDLED}


# -- axioms --------------------------------------------------------------------


def validate_frobenius(alg: FrobeniusAlgebra) -> list[str]:
    """Check every axiom on all basis tuples; returns human-readable failures."""
    out = []
    n, d = alg.dim, alg.d
    names = alg.names
    if alg.unit not in alg.index:
        return [f"unit {alg.unit!r} not in basis"]
    u = alg.unit_index
    if alg.degrees[u] != d:
        out.append(f"unit has degree {alg.degrees[u]}, expected {d}")
    for i in range(n):
        for j in range(n):
            for k, c in alg.mul(i, j).items():
                if alg.degrees[k] != alg.degrees[i] + alg.degrees[j] - d:
                    out.append(f"product {names[i]}*{names[j]} has a term {names[k]} of wrong degree")
    for k, c in enumerate(alg.counit):
        if c and alg.degrees[k] != 0:
            out.append(f"counit nonzero on {names[k]} of degree {alg.degrees[k]}")
    e = lambda k: {k: Fraction(1)}
    for i in range(n):
        if alg.mul(u, i) != e(i):
            out.append(f"left unit law fails on {names[i]}")
        if alg.mul(i, u) != e(i):
            out.append(f"right unit law fails on {names[i]}")
    for i in range(n):
        for j in range(n):
            s = -1 if alg.parity[i] * alg.parity[j] else 1
            if alg.mul(i, j) != {k: s * c for k, c in alg.mul(j, i).items()}:
                out.append(f"graded commutativity fails on ({names[i]}, {names[j]})")
            for k in range(n):
                left: dict[int, Fraction] = {}
                for m, c in alg.mul(i, j).items():
                    for r, c2 in alg.mul(m, k).items():
                        left[r] = left.get(r, 0) + c * c2
                right: dict[int, Fraction] = {}
                for m, c in alg.mul(j, k).items():
                    for r, c2 in alg.mul(i, m).items():
                        right[r] = right.get(r, 0) + c * c2
                if {a: b for a, b in left.items() if b} != {a: b for a, b in right.items() if b}:
                    out.append(f"associativity fails on ({names[i]}, {names[j]}, {names[k]})")
    if _invert(alg.gram()) is None:
        out.append("pairing counit(a*b) is degenerate (Gram matrix singular)")
    return out


def copairing(alg: FrobeniusAlgebra) -> Tensor:
    """``u = sum e_i (x) e^i`` in ``Phi (x) Phi``; checks snake and symmetry exactly."""
    M = alg.copairing_matrix
    n = alg.dim
    u = {(a, b): M[a][b] for a in range(n) for b in range(n) if M[a][b]}
    G = alg.gram()
    # snake: (c (x) id)(e_k (x) u) = e_k
    for k in range(n):
        img = [sum(G[k][a] * M[a][b] for a in range(n)) for b in range(n)]
        if img != [Fraction(int(b == k)) for b in range(n)]:
            raise SingularPairing(f"snake identity fails on {alg.names[k]}")
    for (a, b), c in u.items():
        s = -1 if alg.parity[a] * alg.parity[b] else 1
        if u.get((b, a), 0) != s * c:
            raise InvalidAlgebra("copairing is not symmetric under the graded swap")
    return u


# -- graded tensor maps ------------------------------------------------------


@dataclass(frozen=True)
class GradedTensorMap:
    """Linear map ``Phi^(x)source -> Phi^(x)target`` of a fixed degree."""

    algebra: FrobeniusAlgebra = field(repr=False, compare=False)
    source: int
    target: int
    degree: int
    entries: Mapping[tuple[tuple[int, ...], tuple[int, ...]], Fraction]
    """``{(out_tuple, in_tuple): coefficient}``, zeros omitted."""

    def __eq__(self, other):
        if not isinstance(other, GradedTensorMap):
            return NotImplemented
        return (self.source, self.target, self.degree, dict(self.entries)) == (
            other.source,
            other.target,
            other.degree,
            dict(other.entries),
        )

    __hash__ = None

    def column(self, inp: tuple[int, ...]) -> Tensor:
        return {o: c for (o, i), c in self.entries.items() if i == inp}

    def after(self, first: "GradedTensorMap") -> "GradedTensorMap":
        """``self o first``."""
        if first.target != self.source:
            raise SourceMismatch(f"arity mismatch {first.target} != {self.source}")
        by_in: dict[tuple[int, ...], list] = {}
        for (o, i), c in self.entries.items():
            by_in.setdefault(i, []).append((o, c))
        out: dict = {}
        for (mid, i), c in first.entries.items():
            for o, c2 in by_in.get(mid, ()):
                out[(o, i)] = out.get((o, i), 0) + c * c2
        return GradedTensorMap(
            self.algebra,
            first.source,
            self.target,
            first.degree + self.degree,
            {k: v for k, v in out.items() if v},
        )

    def degree_violations(self) -> list:
        deg = self.algebra.degrees
        return [
            (o, i)
            for (o, i), c in self.entries.items()
            if sum(deg[x] for x in o) - sum(deg[x] for x in i) != self.degree
        ]

    def to_dense(self) -> list[list[Fraction]]:
        n = self.algebra.dim
        rows = list(iproduct(range(n), repeat=self.target))
        cols = list(iproduct(range(n), repeat=self.source))
        return [[self.entries.get((r, c), Fraction(0)) for c in cols] for r in rows]

    @classmethod
    def from_function(cls, alg: FrobeniusAlgebra, source: int, target: int, degree: int, fn: Callable[[tuple[int, ...]], Tensor]):
        entries = {}
        for inp in iproduct(range(alg.dim), repeat=source):
            for o, c in fn(inp).items():
                if c:
                    entries[(o, inp)] = c
        return cls(alg, source, target, degree, entries)


# -- the state sum -----------------------------------------------------------


def _apply(alg: FrobeniusAlgebra, state: Tensor, positions: Sequence[int], op, n_out: int, anchors: Sequence[int]) -> Tensor:
    """Apply ``op`` (input tuple -> Tensor of ``n_out``-tuples) to ``positions``.

    ``anchors`` gives, for each output factor, the index in the final tuple;
    untouched factors fill the remaining slots in their old order.
    """
    out: Tensor = {}
    if not state:
        return out
    length = len(next(iter(state)))
    pos_set = set(positions)
    rest = [i for i in range(length) if i not in pos_set]
    final_len = len(rest) + n_out
    anchor_set = set(anchors)
    fill = [i for i in range(final_len) if i not in anchor_set]
    # layout[k] = index into (outputs + rest) sequence for final slot k
    layout = [0] * final_len
    for j, a in enumerate(anchors):
        layout[a] = j
    for r_i, slot in enumerate(fill):
        layout[slot] = n_out + r_i
    for t, c in state.items():
        front = [*positions, *rest]
        s1 = alg.koszul(t, front)
        for o, c2 in op(tuple(t[i] for i in positions)).items():
            seq = list(o) + [t[i] for i in rest]
            s2 = alg.koszul(seq, layout)
            new = tuple(seq[k] for k in layout)
            out[new] = out.get(new, 0) + s1 * s2 * c * c2
    return {k: v for k, v in out.items() if v}


def _ops(alg: FrobeniusAlgebra):
    delta = alg.delta_table

    def mu(x):
        return {(k,): c for k, c in alg.mul(x[0], x[1]).items()}

    def dmu(x):
        out: Tensor = {}
        for k, c in alg.mul(x[0], x[1]).items():
            for kl, c2 in delta[k].items():
                out[kl] = out.get(kl, 0) + c * c2
        return out

    def mud(x):
        out: Tensor = {}
        for (k, l), c in delta[x[0]].items():
            for m, c2 in alg.mul(k, l).items():
                out[(m,)] = out.get((m,), 0) + c * c2
        return out

    def counit(x):
        c = alg.counit[x[0]]
        return {(): c} if c else {}

    def unit(x):
        return {(alg.unit_index,): Fraction(1)}

    def delta_iter(k: int):
        """``Phi -> Phi^(x)k`` by comultiplying the last factor ``k-1`` times."""

        def op(x):
            cur: Tensor = {x: Fraction(1)}
            for m in range(1, k):
                cur = _apply(alg, cur, [m - 1], lambda y: dict(delta[y[0]]), 2, [m - 1, m])
            return cur

        return op

    return mu, dmu, mud, counit, unit, delta_iter


def evaluate(g: MarkedGaf, alg: FrobeniusAlgebra, *, edge_order: Sequence[int] | None = None) -> GradedTensorMap:
    """The operation ``Phi^(x)A -> Phi^(x)B`` of a marked gaf ``B -> A``.

    Steps: identity on the attach factors; a unit factor per inner vertex;
    per edge ``Delta o mu`` on its two endpoint factors (``mu o Delta`` for a
    loop); finally per vertex an iterated coproduct onto its marking fibre,
    or the counit if the fibre is empty, and a signed permutation into
    ``B``-order.  ``edge_order`` permutes the edge processing order.
    """
    ensure_valid(g)
    bad = validate_frobenius(alg)
    if bad:
        raise InvalidAlgebra("; ".join(bad))
    gaf = g.gaf
    _, dmu, mud, counit, unit, delta_iter = _ops(alg)
    slots = list(gaf.attach)
    order = list(range(len(gaf.edge_list))) if edge_order is None else list(edge_order)
    if sorted(order) != list(range(len(gaf.edge_list))):
        raise ValueError("edge_order must be a permutation of the edges")

    def column(inp: tuple[int, ...]) -> Tensor:
        sl = [("v", a) for a in slots]
        state: Tensor = {inp: Fraction(1)}
        for v in gaf.vertices:
            state = _apply(alg, state, [], unit, 1, [len(sl)])
            sl.append(("v", v))
        for k in order:
            x, y = gaf.endpoints(k)
            px, py = sl.index(("v", x)), sl.index(("v", y))
            if px == py:
                state = _apply(alg, state, [px], mud, 1, [px])
            else:
                state = _apply(alg, state, [px, py], dmu, 2, [px, py])
        for w in gaf.nodes:
            fib = g.fiber(w)
            p = sl.index(("v", w))
            if fib:
                state = _apply(alg, state, [p], delta_iter(len(fib)), len(fib), list(range(p, p + len(fib))))
                sl[p : p + 1] = [("b", b) for b in fib]
            else:
                state = _apply(alg, state, [p], counit, 0, [])
                del sl[p]
        target_order = [sl.index(("b", b)) for b in g.sources]
        out: Tensor = {}
        for t, c in state.items():
            new = tuple(t[i] for i in target_order)
            out[new] = out.get(new, 0) + alg.koszul(t, target_order) * c
        return {k: v for k, v in out.items() if v}

    chi = len(gaf.vertices) - len(gaf.edge_list)
    return GradedTensorMap.from_function(alg, len(gaf.attach), len(g.sources), alg.d * chi, column)


def check_functoriality(alg: FrobeniusAlgebra, g: GrMorphism, h: GrMorphism) -> bool:
    """``evaluate(g o h) == evaluate(h) o evaluate(g)``."""
    if tuple(h.target) != tuple(g.source):
        raise SourceTargetMismatch(f"target of h {list(h.target)} != source of g {list(g.source)}")
    return evaluate(compose(g, h), alg) == evaluate(h, alg).after(evaluate(g, alg))
