"""Shared test utilities: seeded rational sampling, strictly lower
derivation bases, and Jacobi-consistent skew center matrices."""

from __future__ import annotations

import random
from fractions import Fraction

from negricci import linalg
from negricci.algebra import DerivationMatrix, LieAlgebra, derivation, derivation_space


def random_fraction(rng: random.Random, num_range: int = 4, den_range: int = 3) -> Fraction:
    num = rng.randint(-num_range, num_range)
    den = rng.randint(1, den_range)
    return Fraction(num, den)


def strictly_lower_derivations(alg: LieAlgebra) -> list[DerivationMatrix]:
    """Basis of the derivations with zero diagonal and zero upper entries."""
    n = alg.dim
    basis = derivation_space(alg)
    # rows: the diag + upper entries of each basis derivation (transposed
    # into a constraint matrix on combination coefficients)
    constraints: list[list[Fraction]] = []
    for i in range(n):
        for j in range(i, n):
            constraints.append([D.entries[i][j] for D in basis])
    out = []
    for coeffs in linalg.nullspace(constraints):
        entries = linalg.zeros(n, n)
        for c, D in zip(coeffs, basis):
            if c == 0:
                continue
            entries = linalg.mat_add(entries, linalg.mat_scale(c, D.entries))
        out.append(derivation(alg, entries))
    return out


def random_lower_derivation(alg: LieAlgebra, rng: random.Random) -> DerivationMatrix:
    parts = strictly_lower_derivations(alg)
    entries = linalg.zeros(alg.dim, alg.dim)
    for D in parts:
        c = random_fraction(rng)
        if c != 0:
            entries = linalg.mat_add(entries, linalg.mat_scale(c, D.entries))
    return derivation(alg, entries)


def random_consistent_K(n: int, rng: random.Random) -> list[list[Fraction]]:
    """Random (n-2) x (n-2) skew K (indexed 2..n-1) satisfying Jacobi for
    the chain-plus-center filiform bracket and nonsingular.

    Jacobi forces K to be constant (up to alternating sign) along the odd
    anti-diagonals i + j = k <= n + 1; nonsingularity amounts to a nonzero
    value on the longest one (k = n + 1).
    """
    k = [[Fraction(0)] * (n - 2) for _ in range(n - 2)]
    for diag in range(5, n + 2, 2):
        c = random_fraction(rng)
        if diag == n + 1 and c == 0:
            c = Fraction(1)
        for i in range(2, n):
            j = diag - i
            if 2 <= j <= n - 1 and i < j:
                k[i - 2][j - 2] = (Fraction(-1) ** i) * c
                k[j - 2][i - 2] = -k[i - 2][j - 2]
    return k
