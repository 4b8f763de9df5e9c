"""Exact representation of finite-dimensional Lie algebras.

A Lie algebra is stored as a sparse structure-constant tensor over exact
rationals, keyed by basis index pairs (i, j) with 1 <= i < j <= n; the
brackets for i >= j follow by antisymmetry.  All structural decisions
(Jacobi, derivation membership, ranks) are exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .linalg import Matrix, Vector, ZERO, as_fraction


class LieAlgebraError(ValueError):
    pass


class JacobiError(LieAlgebraError):
    pass


class NotNilpotentError(LieAlgebraError):
    pass


class NotDerivationError(LieAlgebraError):
    pass


BracketTable = dict[tuple[int, int], tuple[tuple[int, Fraction], ...]]


def _normalize_brackets(dim: int, brackets) -> BracketTable:
    table: BracketTable = {}
    for (i, j), terms in brackets.items():
        if not (1 <= i < j <= dim):
            raise LieAlgebraError(f"bracket key ({i}, {j}) out of range for dim {dim}")
        acc: dict[int, Fraction] = {}
        for k, c in terms:
            if not 1 <= k <= dim:
                raise LieAlgebraError(f"bracket target {k} out of range")
            acc[k] = acc.get(k, ZERO) + as_fraction(c)
        cleaned = tuple(sorted((k, c) for k, c in acc.items() if c != 0))
        if cleaned:
            table[(i, j)] = cleaned
    return table


@dataclass(frozen=True)
class LieAlgebra:
    """Immutable Lie algebra given by exact structure constants."""

    dim: int
    structure: BracketTable
    labels: tuple[str, ...]

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.dim == other.dim and self.structure == other.structure

    def __hash__(self):
        return hash((self.dim, tuple(sorted(self.structure.items()))))

    def bracket_basis(self, i: int, j: int) -> Vector:
        """[X_i, X_j] for 1-based basis indices, as a coordinate vector."""
        out = [ZERO] * self.dim
        if i == j:
            return out
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        for k, c in self.structure.get((i, j), ()):
            out[k - 1] = sign * c
        return out

    def ad(self, v: Vector) -> Matrix:
        """Matrix of ad_v = [v, .] in the stored basis."""
        n = self.dim
        out = linalg.zeros(n, n)
        for j in range(n):
            col = bracket(self, v, _basis_vector(n, j))
            for i in range(n):
                out[i][j] = col[i]
        return out


def _basis_vector(n: int, i: int) -> Vector:
    v = [ZERO] * n
    v[i] = Fraction(1)
    return v


def lie_algebra(dim, brackets, labels=None, validate=True) -> LieAlgebra:
    """Construct a LieAlgebra from {(i, j): [(k, c), ...]} bracket data.

    Validation rejects any structure tensor with a nonzero Jacobi defect.
    """
    if dim < 1:
        raise LieAlgebraError("dimension must be positive")
    if labels is None:
        labels = tuple(f"X{i}" for i in range(1, dim + 1))
    else:
        labels = tuple(labels)
        if len(labels) != dim:
            raise LieAlgebraError("label count does not match dimension")
    alg = LieAlgebra(dim, _normalize_brackets(dim, brackets), labels)
    if validate:
        defect = jacobi_defect(alg)
        if defect != 0:
            raise JacobiError(f"Jacobi identity fails, defect {defect}")
    return alg


def abelian(dim: int) -> LieAlgebra:
    return lie_algebra(dim, {})


def bracket(alg: LieAlgebra, u: Vector, v: Vector) -> Vector:
    """Bilinear antisymmetric extension of the structure tensor."""
    n = alg.dim
    if len(u) != n or len(v) != n:
        raise LieAlgebraError("vector length does not match algebra dimension")
    out = [ZERO] * n
    for (i, j), terms in alg.structure.items():
        coeff = u[i - 1] * v[j - 1] - u[j - 1] * v[i - 1]
        if coeff == 0:
            continue
        for k, c in terms:
            out[k - 1] += coeff * c
    return out


def _sparse_terms(alg: LieAlgebra, i: int, j: int):
    """[X_i, X_j] as sparse (k, c) terms, 1-based, i != j."""
    if i < j:
        return alg.structure.get((i, j), ())
    return tuple((k, -c) for k, c in alg.structure.get((j, i), ()))


def jacobi_defect(alg: LieAlgebra) -> Fraction:
    """Max |coefficient| of [[X_i,X_j],X_k] + cyclic over all triples."""
    n = alg.dim
    worst = ZERO
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(j + 1, n + 1):
                total: dict[int, Fraction] = {}
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    for r, cr in _sparse_terms(alg, a, b):
                        if r == c:
                            continue
                        for s, cs in _sparse_terms(alg, r, c):
                            total[s] = total.get(s, ZERO) + cr * cs
                for x in total.values():
                    if abs(x) > worst:
                        worst = abs(x)
    return worst


@dataclass(frozen=True)
class Subspace:
    """A subspace of coordinate space with an exact, independent basis."""

    ambient_dim: int
    basis_vectors: tuple[tuple[Fraction, ...], ...] = field(default=())

    def __post_init__(self):
        for v in self.basis_vectors:
            if len(v) != self.ambient_dim:
                raise LieAlgebraError("basis vector length mismatch")
        if self.basis_vectors:
            if linalg.rank([list(v) for v in self.basis_vectors]) != len(self.basis_vectors):
                raise LieAlgebraError("basis vectors are linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.basis_vectors)

    def contains(self, v: Vector) -> bool:
        return linalg.span_contains([list(b) for b in self.basis_vectors], list(v))


def _span(ambient_dim: int, vectors: list[Vector]) -> Subspace:
    nonzero = [v for v in vectors if any(x != 0 for x in v)]
    if not nonzero:
        return Subspace(ambient_dim)
    red, pivots = linalg.rref(nonzero)
    return Subspace(ambient_dim, tuple(tuple(red[r]) for r in range(len(pivots))))


def lower_central_series(alg: LieAlgebra) -> list[Subspace]:
    """n^(0) = alg, n^(t+1) = [alg, n^(t)], until the dimension stabilizes."""
    n = alg.dim
    current = _span(n, [_basis_vector(n, i) for i in range(n)])
    series = [current]
    basis = [_basis_vector(n, i) for i in range(n)]
    while True:
        products = [
            bracket(alg, u, list(v))
            for u in basis
            for v in current.basis_vectors
        ]
        nxt = _span(n, products)
        if nxt.dim == current.dim:
            break
        series.append(nxt)
        current = nxt
        if current.dim == 0:
            break
    return series


def is_nilpotent(alg: LieAlgebra) -> bool:
    return lower_central_series(alg)[-1].dim == 0


def is_filiform(alg: LieAlgebra) -> bool:
    """True iff the lower central series has maximal length (n^(n-2) != 0)."""
    series = lower_central_series(alg)
    if series[-1].dim != 0:
        raise NotNilpotentError("filiformity is defined only for nilpotent algebras")
    # series[t] = n^(t); zero is reached at index len(series) - 1
    return len(series) - 2 >= alg.dim - 2 if alg.dim >= 2 else True


def center(alg: LieAlgebra) -> Subspace:
    """Exact nullspace of the joint adjoint action."""
    n = alg.dim
    rows: list[Vector] = []
    for j in range(n):
        # rows expressing [v, X_{j+1}] = 0 componentwise
        adj = [[ZERO] * n for _ in range(n)]
        for i in range(n):
            col = alg.bracket_basis(i + 1, j + 1)
            for k in range(n):
                adj[k][i] = col[k]
        rows.extend(adj)
    return _span(n, linalg.nullspace(rows))


def killing_form(alg: LieAlgebra) -> Matrix:
    """B(X_i, X_j) = Tr(ad_{X_i} ad_{X_j}), exact and symmetric."""
    n = alg.dim
    ads = [alg.ad(_basis_vector(n, i)) for i in range(n)]
    out = linalg.zeros(n, n)
    for i in range(n):
        for j in range(i, n):
            t = linalg.trace(linalg.mat_mul(ads[i], ads[j]))
            out[i][j] = t
            out[j][i] = t
    return out


def leibniz_defect(alg: LieAlgebra, d: Matrix) -> Fraction:
    """Max |coefficient| of D[X_i,X_j] - [DX_i,X_j] - [X_i,DX_j]."""
    n = alg.dim
    if len(d) != n or any(len(row) != n for row in d):
        raise LieAlgebraError("derivation matrix has wrong shape")
    worst = ZERO
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            total: dict[int, Fraction] = {}
            # D [X_i, X_j]
            for k, c in _sparse_terms(alg, i, j):
                for r in range(n):
                    if d[r][k - 1] != 0:
                        total[r + 1] = total.get(r + 1, ZERO) + d[r][k - 1] * c
            # - [D X_i, X_j] - [X_i, D X_j]
            for col, other, sign in ((i, j, 1), (j, i, -1)):
                for r in range(n):
                    cr = d[r][col - 1]
                    if cr == 0 or r + 1 == other:
                        continue
                    for s, cs in _sparse_terms(alg, r + 1, other):
                        total[s] = total.get(s, ZERO) - sign * cr * cs
            for x in total.values():
                if abs(x) > worst:
                    worst = abs(x)
    return worst


def is_derivation(alg: LieAlgebra, d: Matrix) -> bool:
    return leibniz_defect(alg, d) == 0


@dataclass(frozen=True)
class DerivationMatrix:
    """An n x n rational matrix satisfying the Leibniz rule over base."""

    base: LieAlgebra
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        mat = self.matrix()
        if leibniz_defect(self.base, mat) != 0:
            raise NotDerivationError("matrix is not a derivation of the base algebra")

    def matrix(self) -> Matrix:
        return [list(row) for row in self.entries]

    @property
    def trace(self) -> Fraction:
        return sum((row[i] for i, row in enumerate(self.entries)), ZERO)

    def diagonal(self) -> Vector:
        return [row[i] for i, row in enumerate(self.entries)]

    def __neg__(self) -> "DerivationMatrix":
        return DerivationMatrix(
            self.base, tuple(tuple(-x for x in row) for row in self.entries)
        )


def derivation(alg: LieAlgebra, entries) -> DerivationMatrix:
    rows = tuple(tuple(as_fraction(x) for x in row) for row in entries)
    return DerivationMatrix(alg, rows)


def diagonal_derivation(alg: LieAlgebra, diag) -> DerivationMatrix:
    return derivation(alg, linalg.diagonal(diag))


def derivation_space(alg: LieAlgebra) -> list[DerivationMatrix]:
    """Basis of the space of derivations, from the Leibniz linear system.

    Unknowns are the n^2 entries of D (row-major); one equation per basis
    pair (i < j) and target component.
    """
    n = alg.dim
    rows: list[Vector] = []
    structure_cols = [
        [alg.bracket_basis(r + 1, c + 1) for c in range(n)] for r in range(n)
    ]
    for i in range(n):
        for j in range(i + 1, n):
            bij = alg.bracket_basis(i + 1, j + 1)
            for comp in range(n):
                row = [ZERO] * (n * n)
                # D [X_i, X_j] component
                for k in range(n):
                    if bij[k] != 0:
                        row[comp * n + k] += bij[k]
                # -[D X_i, X_j]: D X_i = sum_r D[r][i] X_r
                for r in range(n):
                    c1 = structure_cols[r][j][comp]
                    if c1 != 0:
                        row[r * n + i] -= c1
                    c2 = structure_cols[i][r][comp]
                    if c2 != 0:
                        row[r * n + j] -= c2
                if any(x != 0 for x in row):
                    rows.append(row)
    if not rows:
        sols = [_basis_vector(n * n, i) for i in range(n * n)]
    else:
        sols = linalg.nullspace(rows)
    out = []
    for v in sols:
        mat = [v[r * n:(r + 1) * n] for r in range(n)]
        out.append(derivation(alg, mat))
    return out


def change_basis(alg: LieAlgebra, p: Matrix) -> LieAlgebra:
    """Structure constants in the basis Y_a = sum_i P[i][a] X_i.

    P must be invertible; the output has zero Jacobi defect by construction
    (validated anyway).
    """
    n = alg.dim
    if len(p) != n or any(len(row) != n for row in p):
        raise LieAlgebraError("basis change matrix has wrong shape")
    p = [[as_fraction(x) for x in row] for row in p]
    pinv = linalg.inverse(p)  # raises SingularMatrixError
    cols = [[p[r][c] for r in range(n)] for c in range(n)]
    brackets = {}
    for a in range(n):
        for b in range(a + 1, n):
            prod = linalg.mat_vec(pinv, bracket(alg, cols[a], cols[b]))
            terms = [(k + 1, c) for k, c in enumerate(prod) if c != 0]
            if terms:
                brackets[(a + 1, b + 1)] = terms
    return lie_algebra(n, brackets, labels=alg.labels)


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def to_json_dict(alg: LieAlgebra) -> dict:
    return {
        "dim": alg.dim,
        "labels": list(alg.labels),
        "brackets": [
            {"i": i, "j": j, "terms": [{"k": k, "c": str(c)} for k, c in terms]}
            for (i, j), terms in sorted(alg.structure.items())
        ],
    }


def from_json_dict(data: dict) -> LieAlgebra:
    brackets = {
        (entry["i"], entry["j"]): [(t["k"], Fraction(t["c"])) for t in entry["terms"]]
        for entry in data["brackets"]
    }
    return lie_algebra(data["dim"], brackets, labels=data.get("labels"))


def dump(alg: LieAlgebra, fp) -> None:
    json.dump(to_json_dict(alg), fp, indent=2)


def load(fp) -> LieAlgebra:
    return from_json_dict(json.load(fp))
