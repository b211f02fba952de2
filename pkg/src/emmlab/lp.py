"""Small dense exact linear programming and linear algebra.

Everything here runs in fractions.Fraction arithmetic, so there is no
round-off: a reported optimum is the true optimum of the rational program.
Floats entering from outside are converted exactly (every float is a dyadic
rational).  Problem sizes are desk-scale (tens to a few hundred variables),
so a dense two-phase tableau simplex with Bland's rule is both simple and
fully robust: Bland's rule excludes cycling, and exact pivots exclude
numerical stalling.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class SimplexResult:
    status: str
    x: Optional[tuple[Fraction, ...]]
    value: Optional[Fraction]


def simplex_max(
    c: Sequence, a: Sequence[Sequence], b: Sequence
) -> SimplexResult:
    """Maximize c.x subject to a.x = b, x >= 0 (equality-form LP).

    Returns exact optimal x and value, or status infeasible/unbounded.
    """
    m = len(a)
    n = len(c)
    rows = [
        [Fraction(v) for v in row] + [Fraction(rhs)] for row, rhs in zip(a, b)
    ]
    if len(rows) != m or any(len(r) != n + 1 for r in rows):
        raise ValueError("inconsistent LP dimensions")
    for r in rows:
        if r[-1] < 0:
            for j in range(n + 1):
                r[j] = -r[j]
    # append artificial identity columns before the rhs slot
    for i, r in enumerate(rows):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        r[n:n] = art
    total = n + m
    basis = list(range(n, total))

    # phase 1: maximize -(sum of artificials); canonical objective row is the
    # sum of all constraint rows, with obj[-1] holding minus the value
    obj = [Fraction(0)] * (total + 1)
    for j in range(n, total):
        obj[j] = Fraction(-1)
    for r in rows:
        for j in range(total + 1):
            obj[j] += r[j]
    _run(rows, obj, basis, allowed=total)
    if obj[-1] != 0:
        return SimplexResult(INFEASIBLE, None, None)

    # drive leftover artificials out of the basis; rows that cannot pivot on
    # an original column are redundant and dropped
    keep = []
    for i in range(len(rows)):
        if basis[i] >= n:
            col = next((j for j in range(n) if rows[i][j] != 0), None)
            if col is None:
                continue
            _pivot(rows, obj, basis, i, col)
        keep.append(i)
    rows = [rows[i] for i in keep]
    basis = [basis[i] for i in keep]

    # phase 2: true objective, artificial columns barred from entering
    obj = [Fraction(v) for v in c] + [Fraction(0)] * (m + 1)
    for i, r in enumerate(rows):
        coef = obj[basis[i]]
        if coef != 0:
            for j in range(total + 1):
                obj[j] -= coef * r[j]
    if not _run(rows, obj, basis, allowed=n):
        return SimplexResult(UNBOUNDED, None, None)
    x = [Fraction(0)] * n
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = rows[i][-1]
    return SimplexResult(OPTIMAL, tuple(x), -obj[-1])


def _run(rows, obj, basis, allowed: int) -> bool:
    """Primal simplex loop with Bland's rule on columns 0..allowed-1.
    Returns False on an unbounded direction."""
    while True:
        col = next((j for j in range(allowed) if obj[j] > 0), None)
        if col is None:
            return True
        best = None
        for i, r in enumerate(rows):
            if r[col] > 0:
                ratio = r[-1] / r[col]
                if best is None or ratio < best[0] or (
                    ratio == best[0] and basis[i] < basis[best[1]]
                ):
                    best = (ratio, i)
        if best is None:
            return False
        _pivot(rows, obj, basis, best[1], col)


def _pivot(rows, obj, basis, row: int, col: int):
    piv = rows[row][col]
    rows[row] = [v / piv for v in rows[row]]
    for i, r in enumerate(rows):
        if i != row and r[col] != 0:
            coef = r[col]
            rows[i] = [v - coef * w for v, w in zip(r, rows[row])]
    coef = obj[col]
    if coef != 0:
        for j in range(len(obj)):
            obj[j] -= coef * rows[row][j]
    basis[row] = col


def exact_rank(matrix: Sequence[Sequence]) -> int:
    """Rank over the rationals by Gaussian elimination."""
    rows = [[Fraction(v) for v in r] for r in matrix]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    col = 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        lead = rows[rank][col]
        for i in range(rank + 1, len(rows)):
            if rows[i][col] != 0:
                f = rows[i][col] / lead
                rows[i] = [v - f * w for v, w in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank
