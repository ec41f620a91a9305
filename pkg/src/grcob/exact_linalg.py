"""Exact integer and rational linear algebra.

Everything here works on Python ints (unbounded) and :class:`fractions.Fraction`;
there is no floating point anywhere.  Matrices are small and dense.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "IntMatrix",
    "SNFResult",
    "TorsionPresent",
    "NotSameLattice",
    "snf",
    "kernel_basis",
    "cokernel_basis",
    "det_sign_of_base_change",
    "determinant",
    "rank",
    "rank_q",
    "solve_rational",
]


class TorsionPresent(ValueError):
    """The cokernel has torsion, so it has no free basis."""


class NotSameLattice(ValueError):
    """Two column sets do not span the same lattice."""


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("dimensions do not match entry count")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls.from_rows([[c[i] for c in columns] for i in range(rows)], len(columns))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = list(zip(*other.entries)) if other.rows else [()] * other.cols
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in ocols) for r in self.entries),
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.rows)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)


@dataclass(frozen=True)
class SNFResult:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` in Smith form."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i, i] for i in range(min(self.D.rows, self.D.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)


def _copy(m: IntMatrix) -> list[list[int]]:
    return [list(r) for r in m.entries]


def snf(A: IntMatrix) -> SNFResult:
    """Smith normal form with transformation matrices.

    Pivot is always the nonzero entry of smallest magnitude in the remaining
    block, ties broken by (row, col).  ``U_inv`` and ``V_inv`` are tracked
    alongside so callers never need to invert.
    """
    m, n = A.rows, A.cols
    D = _copy(A)
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    # Row op on D: row_i += c*row_j  <=> U <- E U, U_inv <- U_inv E^-1.
    def row_add(i, j, c):
        if c == 0:
            return
        D[i] = [a + c * b for a, b in zip(D[i], D[j])]
        U[i] = [a + c * b for a, b in zip(U[i], U[j])]
        for r in Ui:
            r[j] -= c * r[i]

    def row_swap(i, j):
        if i == j:
            return
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def row_neg(i):
        D[i] = [-a for a in D[i]]
        U[i] = [-a for a in U[i]]
        for r in Ui:
            r[i] = -r[i]

    # Column op on D: col_i += c*col_j  <=> V <- V E, V_inv <- E^-1 V_inv.
    def col_add(i, j, c):
        if c == 0:
            return
        for r in D:
            r[i] += c * r[j]
        for r in V:
            r[i] += c * r[j]
        Vi[j] = [a - c * b for a, b in zip(Vi[j], Vi[i])]

    def col_swap(i, j):
        if i == j:
            return
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    t = 0
    while t < min(m, n):
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                x = D[i][j]
                if x and (pivot is None or abs(x) < pivot[0]):
                    pivot = (abs(x), i, j)
        if pivot is None:
            break
        _, pi, pj = pivot
        row_swap(t, pi)
        col_swap(t, pj)
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = D[i][t] // p
                row_add(i, t, -q)
                if D[i][t]:
                    dirty = True
            for j in range(t + 1, n):
                q = D[t][j] // p
                col_add(j, t, -q)
                if D[t][j]:
                    dirty = True
            if not dirty:
                # divisibility: p must divide every remaining entry
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if D[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                row_add(t, bad, 1)
                continue
            # move the smallest remainder into the pivot slot
            best = None
            for i in range(t, m):
                if D[i][t] and (best is None or abs(D[i][t]) < best[0]):
                    best = (abs(D[i][t]), i, t)
            for j in range(t, n):
                if D[t][j] and (best is None or abs(D[t][j]) < best[0]):
                    best = (abs(D[t][j]), t, j)
            row_swap(t, best[1])
            col_swap(t, best[2])
        if D[t][t] < 0:
            row_neg(t)
        t += 1

    def mk(rows, c):
        return IntMatrix(len(rows), c, tuple(tuple(r) for r in rows))

    return SNFResult(mk(U, m), mk(D, n), mk(V, n), mk(Ui, m), mk(Vi, n))


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Columns form a Z-basis of ``ker A``."""
    res = snf(A)
    r = res.rank
    cols = [res.V.column(j) for j in range(r, A.cols)]
    return IntMatrix.from_columns(cols, A.cols)


def cokernel_basis(A: IntMatrix) -> IntMatrix:
    """Lifts in ``Z^rows`` whose images form a Z-basis of ``coker A``.

    Raises :class:`TorsionPresent` if the cokernel is not free.
    """
    res = snf(A)
    diag = res.diagonal
    if any(abs(x) > 1 for x in diag):
        raise TorsionPresent(f"cokernel has torsion (invariant factors {diag})")
    r = res.rank
    # coker A ~ coker D via U; free generators of coker D are e_r, ..., e_{m-1}
    cols = [res.U_inv.column(j) for j in range(r, A.rows)]
    return IntMatrix.from_columns(cols, A.rows)


def _frac_rows(m: Iterable[Sequence[int]]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in r] for r in m]


def determinant(A: IntMatrix | Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant."""
    rows = _copy(A) if isinstance(A, IntMatrix) else [list(r) for r in A]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k]:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                rows[i][j] = (rows[i][j] * rows[k][k] - rows[i][k] * rows[k][j]) // prev
        prev = rows[k][k]
    return sign * rows[n - 1][n - 1]


def rank(A: IntMatrix | Sequence[Sequence[int]]) -> int:
    """Rank over Q by fraction-free Gaussian elimination."""
    rows = _copy(A) if isinstance(A, IntMatrix) else [list(r) for r in A]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        for i in range(r + 1, len(rows)):
            q = rows[i][c]
            if q:
                rows[i] = [p * a - q * b for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def rank_q(entries: dict[tuple[int, int], int | Fraction], nrows: int, ncols: int) -> int:
    """Rank over Q of a sparse matrix given as ``{(row, col): value}``."""
    rows: dict[int, dict[int, Fraction]] = {}
    for (i, j), x in entries.items():
        if x:
            rows.setdefault(i, {})[j] = Fraction(x)
    pivots: dict[int, dict[int, Fraction]] = {}
    for i in sorted(rows):
        row = dict(rows[i])
        while row:
            c = min(row)
            if c not in pivots:
                pivots[c] = row
                break
            prow = pivots[c]
            f = row[c] / prow[c]
            for j, v in prow.items():
                nv = row.get(j, 0) - f * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
    return len(pivots)


def solve_rational(B: IntMatrix, Y: IntMatrix) -> list[list[Fraction]] | None:
    """Solve ``B @ X == Y`` over Q for a full-column-rank ``B``; ``None`` if inconsistent."""
    m, k = B.rows, B.cols
    aug = [[Fraction(x) for x in B.entries[i]] + [Fraction(x) for x in Y.entries[i]] for i in range(m)]
    ncol = k + Y.cols
    r = 0
    pivcols = []
    for c in range(k):
        piv = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if piv is None:
            return None
        aug[r], aug[piv] = aug[piv], aug[r]
        p = aug[r][c]
        aug[r] = [x / p for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivcols.append(c)
        r += 1
    for i in range(r, m):
        if any(aug[i][j] != 0 for j in range(k, ncol)):
            return None
    return [aug[i][k:] for i in range(k)]


def det_sign_of_base_change(B1: IntMatrix, B2: IntMatrix) -> int:
    """Sign of ``det T`` where ``B2 == B1 @ T`` and ``T`` is unimodular."""
    if B1.shape != B2.shape:
        raise NotSameLattice(f"shapes differ: {B1.shape} vs {B2.shape}")
    if B1.cols == 0:
        return 1
    T = solve_rational(B1, B2)
    if T is None or any(x.denominator != 1 for r in T for x in r):
        raise NotSameLattice("B2 is not an integral combination of B1")
    det = determinant([[int(x) for x in r] for r in T])
    if det not in (1, -1):
        raise NotSameLattice(f"change of basis has determinant {det}")
    return det
