import random
from fractions import Fraction

import pytest

from negricci import linalg
from negricci.algebra import change_basis, is_derivation, is_filiform
from negricci.catalog import (
    CatalogError,
    FiliformSpec,
    chain_center_algebra,
    eliminate_b,
    ln_diagonal_derivation,
    make_Ln,
    make_Qn,
    normalize_to_Qn,
    q4_to_l4_basis_change,
    qn_diagonal_derivation,
    qn_eigenvalues,
    qn_extended_chain_form,
    rank_one_torus,
    extended_chain_basis_change,
    torus,
)
from helpers import random_consistent_K

F = Fraction


def test_bracket_counts():
    # L_n stores n-2 brackets; Q_n stores (n-3) chain + (m-1) center
    l8 = make_Ln(8)
    assert len(l8.structure) == 6
    q8 = make_Qn(8)
    assert len(q8.structure) == (8 - 3) + (4 - 1)


def test_filiform_catalog_through_12():
    for n in range(3, 13):
        assert is_filiform(make_Ln(n))
    for n in range(4, 13, 2):
        assert is_filiform(make_Qn(n))


def test_qn_odd_dimension_rejected():
    with pytest.raises(CatalogError):
        make_Qn(7)
    with pytest.raises(CatalogError):
        make_Qn(2)


def test_torus_commutes_and_derives():
    for family, n in (("L", 7), ("Q", 8)):
        spec = FiliformSpec(family, n)
        phi1, phi2 = torus(spec)
        alg = spec.build()
        assert is_derivation(alg, phi1.matrix())
        assert is_derivation(alg, phi2.matrix())
        assert linalg.commutator(phi1.matrix(), phi2.matrix()) == linalg.zeros(n, n)


def test_qn_diagonal_derivation_eigenvalues():
    der = qn_diagonal_derivation(8, F(1), F(-2))
    assert der.diagonal() == qn_eigenvalues(8, F(1), F(-2))
    assert der.diagonal() == [F(1), F(-2), F(-1), F(0), F(1), F(2), F(3), F(1)]


def test_ln_diagonal_derivation():
    der = ln_diagonal_derivation(5, F(1), F(1))
    assert der.diagonal() == [F(1), F(3), F(4), F(5), F(6)]


def test_rank_one_torus_bounds():
    mat = rank_one_torus(8, 2)
    assert [mat[i][i] for i in range(8)] == [1, 4, 5, 6, 7, 8, 9, 12]
    with pytest.raises(CatalogError):
        rank_one_torus(8, 5)


def test_eliminate_b_noop_on_valid_derivations():
    # every derivation of Q_n has zero (1, 2) entry, so on genuine inputs
    # the elimination step is the identity basis change
    n = 8
    a, d = F(2), F(-1)
    rng = random.Random(42)
    from helpers import random_lower_derivation
    from negricci.algebra import derivation
    alg = make_Qn(n)
    base = qn_diagonal_derivation(n, a, d)
    lower = random_lower_derivation(alg, rng)
    der = derivation(alg, linalg.mat_add(base.entries, lower.entries))
    assert der.entries[0][1] == 0
    p, new_der = eliminate_b(n, a, d, der)
    assert p == linalg.identity(n)
    assert new_der.entries == der.entries
    assert change_basis(alg, p) == alg


def test_eliminate_b_checks_diagonal():
    n = 6
    der = qn_diagonal_derivation(n, F(1), F(-1))
    with pytest.raises(CatalogError):
        eliminate_b(n, F(2), F(-1), der)


def test_eliminate_b_requires_distinct_weights():
    n = 6
    der = qn_diagonal_derivation(n, F(1), F(1))
    with pytest.raises(CatalogError):
        eliminate_b(n, F(1), F(1), der)


def test_extended_chain_form_has_full_chain():
    n = 8
    alg = qn_extended_chain_form(n)
    e = lambda i: [F(1) if j == i - 1 else F(0) for j in range(n)]
    from negricci.algebra import bracket
    for i in range(2, n):
        assert bracket(alg, e(1), e(i)) == e(i + 1)


def test_q4_is_l4():
    q4 = FiliformSpec("Q", 4).build()
    assert change_basis(q4, q4_to_l4_basis_change()) == make_Ln(4)


def test_normalize_to_qn_random():
    rng = random.Random(20)
    for n in (6, 8):
        for _ in range(3):
            k = random_consistent_K(n, rng)
            p, normalized = normalize_to_Qn(n, k)
            assert normalized == qn_extended_chain_form(n)
            assert linalg.is_invertible(p)


def test_normalize_rejects_singular_K():
    n = 6
    k = [[F(0)] * 4 for _ in range(4)]
    # only the short anti-diagonal populated: K_{2,3} type entries, singular
    k[0][1] = F(1)
    k[1][0] = F(-1)
    with pytest.raises(CatalogError):
        normalize_to_Qn(n, k)
