"""Exact rational linear algebra over Python Fractions.

Matrices are lists of lists of Fraction; vectors are lists of Fraction.
Everything here is exact: rank, nullspace and inversion decisions never
depend on a floating-point tolerance.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

Vector = list[Fraction]
Matrix = list[list[Fraction]]

ZERO = Fraction(0)
ONE = Fraction(1)


class SingularMatrixError(ValueError):
    pass


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to Fraction (exact only)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def zeros(rows: int, cols: int) -> Matrix:
    return [[ZERO] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def diagonal(entries) -> Matrix:
    entries = [as_fraction(e) for e in entries]
    n = len(entries)
    out = zeros(n, n)
    for i, e in enumerate(entries):
        out[i][i] = e
    return out


def copy_matrix(a: Matrix) -> Matrix:
    return [row[:] for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0])
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        for k in range(inner):
            c = ai[k]
            if c == 0:
                continue
            bk = b[k]
            oi = out[i]
            for j in range(cols):
                if bk[j] != 0:
                    oi[j] += c * bk[j]
    return out


def mat_vec(a: Matrix, v: Vector) -> Vector:
    return [sum((c * x for c, x in zip(row, v) if x != 0), ZERO) for row in a]


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c, a: Matrix) -> Matrix:
    c = as_fraction(c)
    return [[c * x for x in row] for row in a]


def mat_eq(a: Matrix, b: Matrix) -> bool:
    return a == b


def trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), ZERO)


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form (copy) and the pivot column indices.

    Gaussian elimination over Fraction with pivoting by first nonzero
    entry; Fraction normalisation keeps the intermediate entries small.
    """
    m = copy_matrix(a)
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = ONE / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: Matrix) -> int:
    if not a:
        return 0
    return len(rref(a)[1])


def nullspace(a: Matrix) -> list[Vector]:
    """Basis of the exact right nullspace of a (possibly empty)."""
    if not a:
        return []
    cols = len(a[0])
    red, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * cols
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        basis.append(v)
    return basis


def solve(a: Matrix, b: Vector) -> Vector | None:
    """One exact solution of a x = b, or None if inconsistent."""
    cols = len(a[0])
    aug = [row[:] + [bv] for row, bv in zip(a, b)]
    red, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [ZERO] * cols
    for r, p in enumerate(pivots):
        x[p] = red[r][cols]
    return x


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [row[:] + ident_row[:] for row, ident_row in zip(a, identity(n))]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in red]


def is_invertible(a: Matrix) -> bool:
    return len(a) == len(a[0]) and rank(a) == len(a)


def to_float(a: Matrix) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in a], dtype=float)


def vec_to_float(v: Vector) -> np.ndarray:
    return np.array([float(x) for x in v], dtype=float)


def span_contains(basis: list[Vector], v: Vector) -> bool:
    """Exact membership of v in the span of the given vectors."""
    if all(x == 0 for x in v):
        return True
    if not basis:
        return False
    a = transpose(basis)
    return solve(a, v) is not None
