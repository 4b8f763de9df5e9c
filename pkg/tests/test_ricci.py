import random
from fractions import Fraction

import numpy as np
import pytest

from negricci.catalog import make_Ln, make_Qn, qn_diagonal_derivation
from negricci.ricci import (
    ExtensionMetric,
    MetricError,
    MetricLieAlgebra,
    extension_metric_flat,
    flag_frame,
    gram_schmidt_descending,
    necessity_trace_bound,
    random_flag_gram,
    ricci_blocks,
    ricci_nilpotent,
    ricci_operator_general,
)
from helpers import random_lower_derivation

F = Fraction


def test_metric_validation():
    alg = make_Qn(6)
    with pytest.raises(MetricError):
        MetricLieAlgebra(alg, np.zeros((6, 6)))
    with pytest.raises(MetricError):
        MetricLieAlgebra(alg, np.eye(5))


def test_flag_frame_is_orthonormal_and_triangular():
    rng = np.random.default_rng(1)
    g = random_flag_gram(7, rng)
    q = flag_frame(g)
    assert np.abs(np.triu(q, k=1)).max() == 0
    assert np.abs(q.T @ g @ q - np.eye(7)).max() < 1e-12


def test_gram_schmidt_descending_flags():
    rng = np.random.default_rng(2)
    n = 5
    g = random_flag_gram(n, rng)
    basis = [np.eye(n)[:, i] for i in range(n)]
    frame = gram_schmidt_descending(basis, g)
    for i, e in enumerate(frame):
        # e_i has no component on X_1..X_{i-1}
        assert np.abs(e[:i]).max() < 1e-12 if i else True
        assert abs(e @ g @ e - 1.0) < 1e-12


def test_nilpotent_matches_general_on_qn():
    rng = np.random.default_rng(3)
    for n in (6, 8):
        nil = make_Qn(n)
        g = random_flag_gram(n, rng)
        a = ricci_nilpotent(nil, g)
        b = ricci_operator_general(MetricLieAlgebra(nil, g))
        assert np.abs(a - b).max() < 1e-10 * max(1.0, np.abs(b).max())


def test_nilpotent_rejects_non_nilpotent():
    from negricci.algebra import lie_algebra
    sl2 = lie_algebra(3, {
        (1, 2): [(2, F(2))], (1, 3): [(3, F(-2))], (2, 3): [(1, F(1))]})
    with pytest.raises(MetricError):
        ricci_nilpotent(sl2, np.eye(3))


def test_block_form_matches_flattened_general():
    rng = np.random.default_rng(4)
    seed_rng = random.Random(4)
    nil = make_Qn(6)
    base = qn_diagonal_derivation(6, F(1), F(-1))
    from negricci import linalg
    from negricci.algebra import derivation
    lower = random_lower_derivation(nil, seed_rng)
    der = derivation(nil, linalg.mat_add(base.entries, lower.entries))
    for _ in range(5):
        g = random_flag_gram(6, rng)
        ext = ExtensionMetric(nil, der, g)
        blocks = ricci_blocks(ext).full
        general = ricci_operator_general(extension_metric_flat(ext))
        scale = max(1.0, np.abs(general).max())
        assert np.abs(blocks - general).max() < 1e-10 * scale


def test_unimodular_flag():
    nil = make_Qn(6)
    ext = ExtensionMetric(nil, qn_diagonal_derivation(6, F(3), F(-5)), np.eye(6))
    assert ext.unimodular
    ext2 = ExtensionMetric(nil, qn_diagonal_derivation(6, F(1), F(-1)), np.eye(6))
    assert not ext2.unimodular
    assert ext2.T == F(4)


def test_necessity_trace_bound_holds_on_samples():
    rng = np.random.default_rng(5)
    nil = make_Qn(6)
    der = qn_diagonal_derivation(6, F(1), F(-8, 5))  # decide says no, T > 0
    for _ in range(10):
        ext = ExtensionMetric(nil, der, random_flag_gram(6, rng))
        for k in (4, 5, 6):
            lhs, rhs = necessity_trace_bound(ext, k)
            assert lhs >= rhs - 1e-9 * max(1.0, abs(rhs))


def test_necessity_trace_bound_requires_positive_trace():
    nil = make_Qn(6)
    der = qn_diagonal_derivation(6, F(-1), F(1))  # T = -4
    ext = ExtensionMetric(nil, der, np.eye(6))
    with pytest.raises(MetricError):
        necessity_trace_bound(ext, 5)


def test_report_serialization():
    nil = make_Ln(5)
    from negricci.catalog import ln_diagonal_derivation
    ext = ExtensionMetric(nil, ln_diagonal_derivation(5, F(1), F(1)), np.eye(5))
    report = ricci_blocks(ext)
    data = report.to_json_dict()
    assert set(data) == {"R1", "R2", "r3", "eigenvalues",
                         "negative_definite", "tolerance"}
    assert len(data["R2"]) == 5
