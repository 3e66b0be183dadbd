"""Exact linear algebra over Q, Q(sqrt d) and Z.

Matrices are lists of rows.  The field routines work for any entries that
support ``+ - * /`` exactly (ints, Fractions, QuadScalars); the integer
routines use unimodular row operations only.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

__all__ = [
    "echelon",
    "rank",
    "independent_rows",
    "inverse",
    "det",
    "mat_mul",
    "mat_vec",
    "identity",
    "integer_echelon",
    "integer_kernel",
    "integer_det",
]


def _lift(x):
    return Fraction(x) if isinstance(x, int) else x


def _is_zero(x) -> bool:
    return x == 0


def echelon(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over a field; returns ``(matrix, pivot_columns)``."""
    m = [[_lift(x) for x in row] for row in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if not _is_zero(m[i][c])), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and not _is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(echelon(rows)[1])


def independent_rows(rows: Sequence[Sequence]) -> list[int]:
    """Indices of the earliest-first maximal linearly independent subset of rows."""
    chosen: list[int] = []
    basis: list[list] = []
    for i, row in enumerate(rows):
        if rank(basis + [list(row)]) > len(basis):
            basis.append(list(row))
            chosen.append(i)
    return chosen


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def inverse(rows: Sequence[Sequence]) -> list[list]:
    n = len(rows)
    aug = [list(row) + identity(n)[i] for i, row in enumerate(rows)]
    red, piv = echelon(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red[:n]]


def det(rows: Sequence[Sequence]):
    m = [[_lift(x) for x in row] for row in rows]
    n = len(m)
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if not _is_zero(m[i][c])), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            result = -result
        result = result * m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if not _is_zero(m[i][c]):
                f = m[i][c] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return result


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), 0) for col in bt] for row in a]


def mat_vec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v)), 0) for row in a]


# -- integer routines -------------------------------------------------------

def integer_echelon(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row echelon form over Z with its unimodular transform.

    Returns ``(E, U)`` with ``U @ rows == E``, ``U`` unimodular, ``E`` in
    echelon form with positive pivots and entries above each pivot reduced
    into ``[0, pivot)`` (Hermite normal form).
    """
    m = [list(map(int, row)) for row in rows]
    n = len(m)
    u = identity(n)
    if n == 0:
        return m, u
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        # gcd-eliminate column c below row r
        while True:
            nz = [i for i in range(r, n) if m[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(m[i][c]))
            m[r], m[piv] = m[piv], m[r]
            u[r], u[piv] = u[piv], u[r]
            done = True
            for i in range(r + 1, n):
                if m[i][c]:
                    q = m[i][c] // m[r][c]
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    u[i] = [a - q * b for a, b in zip(u[i], u[r])]
                    if m[i][c]:
                        done = False
            if done:
                break
        if r < n and m[r][c] != 0:
            if m[r][c] < 0:
                m[r] = [-x for x in m[r]]
                u[r] = [-x for x in u[r]]
            for i in range(r):
                q = m[i][c] // m[r][c]
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    u[i] = [a - q * b for a, b in zip(u[i], u[r])]
            r += 1
            if r == n:
                break
    return m, u


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int | None = None) -> list[list[int]]:
    """A Z-basis of ``{v in Z^n : A v = 0}``; the basis spans a saturated lattice."""
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return identity(ncols)
    at = [list(col) for col in zip(*rows)]  # n x m
    e, u = integer_echelon(at)
    return [u[i] for i in range(ncols) if all(x == 0 for x in e[i])]


def integer_det(rows: Sequence[Sequence[int]]) -> int:
    d = det(rows)
    assert d.denominator == 1
    return int(d)
