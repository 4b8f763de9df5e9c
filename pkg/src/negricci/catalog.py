"""The rank-two filiform algebras L_n and Q_n and their derivation tori.

Also provides the parametric diagonal derivation of Q_n, the basis change
that removes the off-diagonal coupling entry of a Q_n derivation, and the
normalization of a chain-plus-center filiform algebra to the Q_n form.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction

from . import algebra, linalg
from .algebra import DerivationMatrix, LieAlgebra, LieAlgebraError
from .linalg import Matrix, ZERO, as_fraction


class CatalogError(LieAlgebraError):
    pass


@dataclass(frozen=True)
class FiliformSpec:
    """Which catalog algebra: family 'L' (n >= 3) or 'Q' (even n >= 4)."""

    family: str
    n: int

    def __post_init__(self):
        if self.family not in ("L", "Q"):
            raise CatalogError(f"unknown family {self.family!r}")
        if self.family == "L" and self.n < 3:
            raise CatalogError("L_n requires n >= 3")
        if self.family == "Q" and (self.n % 2 != 0 or self.n < 4):
            raise CatalogError("Q_n requires even n >= 4")

    @property
    def is_l4_alias(self) -> bool:
        """Q_4 is isomorphic to L_4; Q-specific results assume n >= 6."""
        return self.family == "Q" and self.n == 4

    def build(self) -> LieAlgebra:
        return make_Ln(self.n) if self.family == "L" else make_Qn(self.n)


@lru_cache(maxsize=None)
def make_Ln(n: int) -> LieAlgebra:
    """L_n: [X_1, X_i] = X_{i+1} for 2 <= i <= n-1."""
    if n < 3:
        raise CatalogError("L_n requires n >= 3")
    brackets = {(1, i): [(i + 1, Fraction(1))] for i in range(2, n)}
    return algebra.lie_algebra(n, brackets)


@lru_cache(maxsize=None)
def make_Qn(n: int) -> LieAlgebra:
    """Q_n (n even >= 4): the L-chain up to X_{n-1} plus the center brackets
    [X_j, X_{n-j+1}] = (-1)^(j+1) X_n."""
    if n % 2 != 0 or n < 4:
        raise CatalogError("Q_n requires even n >= 4")
    brackets: dict = {(1, i): [(i + 1, Fraction(1))] for i in range(2, n - 1)}
    m = n // 2
    for j in range(2, m + 1):
        sign = Fraction(1) if (j + 1) % 2 == 0 else Fraction(-1)
        key = (j, n - j + 1)
        if key in brackets:
            brackets[key] = brackets[key] + [(n, sign)]
        else:
            brackets[key] = [(n, sign)]
    return algebra.lie_algebra(n, brackets)


def torus(spec: FiliformSpec) -> tuple[DerivationMatrix, DerivationMatrix]:
    """The two diagonal derivations spanning a maximal torus of L_n / Q_n."""
    n = spec.n
    alg = spec.build()
    if spec.family == "L":
        d1 = list(range(1, n + 1))
        d2 = [0] + [1] * (n - 1)
    else:
        d1 = list(range(1, n)) + [n + 1]
        d2 = [0] + [1] * (n - 2) + [2]
    return (
        algebra.diagonal_derivation(alg, d1),
        algebra.diagonal_derivation(alg, d2),
    )


def rank_one_torus(n: int, r: int) -> Matrix:
    """Diagonal of the torus generator of the rank-one filiform families:
    diag(1, 2+r, ..., (n-1)+r, n+2r)."""
    if not 1 <= r <= n - 4:
        raise CatalogError(f"r must satisfy 1 <= r <= n - 4, got r={r}, n={n}")
    diag = [1] + [i + r for i in range(2, n)] + [n + 2 * r]
    return linalg.diagonal(diag)


def qn_diagonal_derivation(n: int, a, d) -> DerivationMatrix:
    """The diagonal derivation of Q_n with eigenvalues
    (a, d, a+d, 2a+d, ..., (n-3)a+d, (n-3)a+2d), i.e. a*phi1 + (d-2a)*phi2."""
    if n % 2 != 0 or n < 6:
        raise CatalogError("the (a, d) derivation family requires even n >= 6")
    a, d = as_fraction(a), as_fraction(d)
    diag = [a] + [d + (i - 2) * a for i in range(2, n)] + [(n - 3) * a + 2 * d]
    return algebra.diagonal_derivation(make_Qn(n), diag)


def ln_diagonal_derivation(n: int, alpha, beta) -> DerivationMatrix:
    """alpha*phi1 + beta*phi2 on L_n: diag(alpha, 2a+b, ..., na+b)."""
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    diag = [alpha] + [i * alpha + beta for i in range(2, n + 1)]
    return algebra.diagonal_derivation(make_Ln(n), diag)


def qn_eigenvalues(n: int, a, d) -> list[Fraction]:
    a, d = as_fraction(a), as_fraction(d)
    return [a] + [d + (i - 2) * a for i in range(2, n)] + [(n - 3) * a + 2 * d]


def eliminate_b(n: int, a, d, der: DerivationMatrix) -> tuple[Matrix, DerivationMatrix]:
    """Remove the (1, 2) coupling entry b from a Q_n derivation by the basis
    change X_2 -> X_2 - b/(a-d) X_1; the diagonal is unchanged and the Q_n
    relations are preserved.

    Requires a != d; with a = d the coupling cannot be removed this way
    (the all-positive-eigenvalue route applies instead).
    """
    a, d = as_fraction(a), as_fraction(d)
    if a == d:
        raise CatalogError("a = d: coupling entry not eliminable; "
                           "use the positive-eigenvalue path")
    m = der.matrix()
    if m[0][0] != a or m[1][1] != d:
        raise CatalogError("derivation diagonal does not start with (a, d)")
    b = m[0][1]
    p = linalg.identity(n)
    p[0][1] = -b / (a - d)
    pinv = linalg.identity(n)
    pinv[0][1] = b / (a - d)
    conj = linalg.mat_mul(pinv, linalg.mat_mul(m, p))
    for i in range(n):
        for j in range(i + 1, n):
            if conj[i][j] != 0:
                raise CatalogError("conjugated derivation is not lower-triangular; "
                                   "input was not in the expected normal shape")
    new_alg = algebra.change_basis(der.base, p)
    if new_alg != der.base:
        raise CatalogError("basis change did not preserve the Q_n relations")
    return p, algebra.derivation(der.base, conj)


def extended_chain_basis_change(n: int) -> Matrix:
    """Basis change from Q_n to the variant with the extra chain bracket
    [Y_1, Y_{n-1}] = Y_n: Y_1 = X_1 - X_2, Y_i = X_i for i > 1.

    (With Y_1 = X_1 + X_2 the extra bracket comes out as -Y_n.)
    """
    p = linalg.identity(n)
    p[1][0] = Fraction(-1)
    return p


def qn_extended_chain_form(n: int) -> LieAlgebra:
    """Q_n in the extended-chain basis: full chain [Y_1, Y_i] = Y_{i+1} for
    2 <= i <= n-1 plus [Y_i, Y_{n+1-i}] = (-1)^(i+1) Y_n."""
    return algebra.change_basis(make_Qn(n), extended_chain_basis_change(n))


def q4_to_l4_basis_change() -> Matrix:
    """Columns (-X_2, X_1, X_3, X_4): carries Q_4 to the L_4 relations."""
    f = Fraction
    return [
        [f(0), f(1), f(0), f(0)],
        [f(-1), f(0), f(0), f(0)],
        [f(0), f(0), f(1), f(0)],
        [f(0), f(0), f(0), f(1)],
    ]


# ---------------------------------------------------------------------------
# Normalization: chain + nonsingular skew form K  ->  Q_n
# ---------------------------------------------------------------------------

def chain_center_algebra(n: int, k: Matrix) -> LieAlgebra:
    """The filiform algebra [Y_1, Y_i] = Y_{i+1} (2 <= i <= n-1),
    [Y_i, Y_j] = K_ij Y_n, for a skew matrix K indexed 2..n-1.

    K is passed as an (n-2) x (n-2) matrix, entry [i-2][j-2] = K_ij.
    Construction validates Jacobi.
    """
    if len(k) != n - 2 or any(len(row) != n - 2 for row in k):
        raise CatalogError("K must be (n-2) x (n-2), indexed 2..n-1")
    for i in range(n - 2):
        for j in range(n - 2):
            if k[i][j] != -k[j][i]:
                raise CatalogError("K is not skew-symmetric")
    brackets: dict = {(1, i): [(i + 1, Fraction(1))] for i in range(2, n)}
    for i in range(2, n):
        for j in range(i + 1, n):
            c = as_fraction(k[i - 2][j - 2])
            if c == 0:
                continue
            key = (i, j)
            if key in brackets:
                brackets[key] = brackets[key] + [(n, c)]
            else:
                brackets[key] = [(n, c)]
    return algebra.lie_algebra(n, brackets)


def _kprime(alg: LieAlgebra, n: int, a_even: list[Fraction]) -> tuple[Matrix, Matrix]:
    """Basis Y'_1 = Y_1, Y'_2 = Y_2 + sum a_t Y_t (t = 4, 6, ...),
    Y'_{i+1} = [Y'_1, Y'_i]; returns (P, K') with K'_{ij} read off from
    [Y'_i, Y'_j] = K'_{ij} Y'_n (Y'_n is a multiple of Y_n)."""
    cols: list[list[Fraction]] = []
    y1 = [ZERO] * n
    y1[0] = Fraction(1)
    cols.append(y1)
    y2 = [ZERO] * n
    y2[1] = Fraction(1)
    for idx, t in enumerate(range(4, 2 * len(a_even) + 4, 2)):
        y2[t - 1] = a_even[idx]
    cols.append(y2)
    for _ in range(2, n):
        cols.append(algebra.bracket(alg, y1, cols[-1]))
    p = [[cols[c][r] for c in range(n)] for r in range(n)]
    if not linalg.is_invertible(p):
        raise CatalogError("degenerate basis in normalization recursion")
    yn = cols[-1]
    kp = linalg.zeros(n - 2, n - 2)
    for i in range(2, n):
        for j in range(i + 1, n):
            prod = algebra.bracket(alg, cols[i - 1], cols[j - 1])
            # prod must be a multiple of Y'_n
            coeff = None
            for comp in range(n):
                if yn[comp] != 0:
                    coeff = prod[comp] / yn[comp]
                    break
            assert coeff is not None
            kp[i - 2][j - 2] = coeff
            kp[j - 2][i - 2] = -coeff
    return p, kp


def normalize_to_Qn(n: int, k: Matrix) -> tuple[Matrix, LieAlgebra]:
    """Carry the chain-plus-K algebra to the Q_n normal form of
    qn_extended_chain_form(n) by successively choosing the even coefficients
    a_4, a_6, ... of Y'_2 = Y_2 + sum a_t Y_t to kill K'_{2,j}, then
    rescaling.  Returns the basis change P and the normalized algebra,
    verified by exact bracket comparison.

    Odd coefficients a_3, a_5, ... are free and set to zero.
    """
    if n % 2 != 0 or n < 4:
        raise CatalogError("normalization target Q_n requires even n >= 4")
    alg = chain_center_algebra(n, k)  # validates Jacobi and skewness
    if as_fraction(k[0][n - 3]) == 0:
        raise CatalogError("K_{2,n-1} = 0: K is singular, no Q_n normalization")
    if not linalg.is_invertible([[as_fraction(x) for x in row] for row in k]):
        raise CatalogError("K is singular, no Q_n normalization")
    m = n // 2
    a_even = [ZERO] * (m - 2)
    # K'_{2, n-1-2s} is affine in a_{2s+2}; solve one coefficient at a time.
    for s in range(1, m - 1):
        target_j = n - 1 - 2 * s  # column index of K'_{2, j}
        _, kp0 = _kprime(alg, n, a_even)
        val0 = kp0[0][target_j - 2]
        if val0 == 0:
            continue
        trial = a_even[:]
        trial[s - 1] = Fraction(1)
        _, kp1 = _kprime(alg, n, trial)
        slope = kp1[0][target_j - 2] - val0
        if slope == 0:
            raise CatalogError("normalization recursion stalled (zero slope)")
        a_even[s - 1] = -val0 / slope
    p, kp = _kprime(alg, n, a_even)
    for j in range(3, n - 1):
        if kp[0][j - 2] != 0:
            raise CatalogError("normalization failed to clear K'_{2,j}")
    scale = -kp[0][n - 3]  # [Y'_i, Y'_{n+1-i}] = (-1)^(i+1) * scale * Y'_n
    # rescale Y'_i -> scale^-1 Y'_i for i >= 2
    for r in range(n):
        for c in range(1, n):
            p[r][c] = p[r][c] / scale
    normalized = algebra.change_basis(alg, p)
    if normalized != qn_extended_chain_form(n):
        raise CatalogError("normalized brackets do not match the Q_n normal form")
    return p, normalized
