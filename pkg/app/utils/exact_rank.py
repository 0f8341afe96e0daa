# app/utils/exact_rank.py

"""Exact rank over the rationals.

Every double is a dyadic rational, so a float matrix scales to an integer matrix
with the same rank. The rank of that integer matrix is found by fraction-free
(Bareiss) elimination, which keeps all intermediate values integral.
"""

import math
from fractions import Fraction

import numpy as np


def integer_rows(array: np.ndarray) -> list[list[int]]:
    """Scale a finite float matrix by the common denominator of its entries."""
    fractions = [[Fraction(float(v)) for v in row] for row in np.asarray(array, dtype=np.float64)]
    scale = 1
    for row in fractions:
        for value in row:
            scale = math.lcm(scale, value.denominator)
    return [[int(value * scale) for value in row] for row in fractions]


def bareiss_rank(rows: list[list[int]]) -> int:
    a = [list(row) for row in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    rank, previous = 0, 1
    for col in range(n):
        pivot = next((r for r in range(rank, m) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        head = a[rank]
        for r in range(rank + 1, m):
            row = a[r]
            factor = row[col]
            for c in range(col + 1, n):
                row[c] = (row[c] * head[col] - factor * head[c]) // previous
            row[col] = 0
        previous = head[col]
        rank += 1
        if rank == m:
            break
    return rank


def exact_rank(array: np.ndarray) -> int:
    """Rank of a finite float matrix, computed without rounding."""
    return bareiss_rank(integer_rows(array))
