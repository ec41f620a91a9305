"""Torsion of an exact sequence of based Q-vector spaces, with random choices.

For ``0 -> V_0 -> ... -> V_{n-1} -> 0`` with given bases, pick any basis
``b_k`` of ``im f_(k-1)`` and any preimages ``s_k`` of ``b_(k+1)``; then
``prod_k det[b_k | s_k]^((-1)^k)`` does not depend on the choices.
"""
from __future__ import annotations

import random

import sympy


def torsion(ranks, maps, rng: random.Random) -> sympy.Rational:
    mats = [sympy.Matrix(m.rows, m.cols, sum(m.to_lists(), [])) for m in maps]
    n = len(ranks)
    images = [sympy.zeros(ranks[0], 0)]
    for k in range(n - 1):
        f = mats[k]
        cols = f.columnspace()
        im = sympy.Matrix.hstack(*cols) if cols else sympy.zeros(ranks[k + 1], 0)
        r = im.shape[1]
        if r:
            while True:
                T = sympy.Matrix(r, r, lambda i, j: rng.randint(-3, 3))
                if T.det() != 0:
                    break
            im = im * T
        images.append(im)
    images.append(sympy.zeros(0, 0))
    result = sympy.Rational(1)
    for k in range(n):
        b = images[k]
        blocks = [b] if b.shape[1] else []
        if k < n - 1 and images[k + 1].shape[1]:
            f = mats[k]
            sol, params = f.gauss_jordan_solve(images[k + 1])
            sol = sol.subs({p: rng.randint(-3, 3) for p in params})
            blocks.append(sol)
        if ranks[k] == 0:
            continue
        M = sympy.Matrix.hstack(*blocks)
        assert M.shape == (ranks[k], ranks[k]), "sequence not exact"
        det = M.det()
        result *= det if k % 2 == 0 else 1 / det
    return result
