"""Row reduction over the rationals with ``fractions.Fraction``."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Sequence


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [[Fraction(x) for x in row] for row in rows]
    if not m:
        return [], []
    n_cols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows or not len(rows[0]):
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], n_cols: int | None = None) -> list[list[Fraction]]:
    """Basis of {v : rows @ v = 0}, one vector per free column."""
    if n_cols is None:
        n_cols = len(rows[0])
    if not rows:
        return [[Fraction(int(i == j)) for j in range(n_cols)] for i in range(n_cols)]
    red, pivots = rref(rows)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n_cols
        v[fc] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def primitive_integer_vector(v: Sequence[Fraction]) -> list[int]:
    """Scale a rational vector to coprime integers, first nonzero entry positive."""
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (Fraction(x).denominator for x in v), 1)
    ints = [int(Fraction(x) * den) for x in v]
    g = reduce(math.gcd, ints, 0)
    if g == 0:
        return ints
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        g = -g
    return [x // g for x in ints]
