"""Acceptance suite: the ten headline properties of the package, each
printing one pass/fail line (visible with pytest -s / in the tee log)."""

import functools
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from negricci import linalg
from negricci.algebra import change_basis, derivation, is_derivation, jacobi_defect
from negricci.catalog import (
    FiliformSpec,
    make_Ln,
    make_Qn,
    normalize_to_Qn,
    q4_to_l4_basis_change,
    qn_diagonal_derivation,
    qn_extended_chain_form,
    torus,
)
from negricci.constructor import (
    ConeInfeasibleError,
    ConeProblem,
    cone_vectors_Qn,
    construct,
    solve_feasibility,
)
from negricci.criterion import (
    IotaProfile,
    critical_l,
    decide_Qn,
    iota_Qn,
    kappa,
    solve_system18,
    trace_T,
)
from negricci.ricci import (
    ExtensionMetric,
    extension_metric_flat,
    necessity_trace_bound,
    random_flag_gram,
    ricci_blocks,
    ricci_nilpotent,
    ricci_operator_general,
)
from helpers import random_consistent_K, random_lower_derivation

F = Fraction

GRID = [F(k, 4) for k in range(-8, 9)]  # -2 .. 2 step 1/4


def criterion(num, label):
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            start = time.time()
            try:
                fn()
            except BaseException:
                print(f"[FAIL] criterion {num}: {label}")
                raise
            print(f"[PASS] criterion {num}: {label} ({time.time() - start:.2f}s)")
        return run
    return wrap


@criterion(1, "exact catalog validity up to n = 12")
def test_acceptance_1_catalog():
    start = time.time()
    for n in range(3, 13):
        assert jacobi_defect(make_Ln(n)) == 0
    for n in range(4, 13, 2):
        assert jacobi_defect(make_Qn(n)) == 0
    for family, ns in (("L", range(3, 13)), ("Q", range(4, 13, 2))):
        for n in ns:
            spec = FiliformSpec(family, n)
            alg = spec.build()
            phi1, phi2 = torus(spec)
            assert is_derivation(alg, phi1.matrix())
            assert is_derivation(alg, phi2.matrix())
            assert linalg.commutator(phi1.matrix(), phi2.matrix()) == linalg.zeros(n, n)
    assert time.time() - start < 1.0


@criterion(2, "Ricci block form vs general operator, 100 random extensions")
def test_acceptance_2_ricci_cross_validation():
    start = time.time()
    rng = np.random.default_rng(2024)
    seed_rng = random.Random(2024)
    count = 0
    for n in (6, 8):
        nil = make_Qn(n)
        for _ in range(50):
            a = F(seed_rng.randint(-3, 3), seed_rng.randint(1, 2))
            d = F(seed_rng.randint(-3, 3), seed_rng.randint(1, 2))
            if a == 0 and d == 0:
                a = F(1)
            base = qn_diagonal_derivation(n, a, d)
            lower = random_lower_derivation(nil, seed_rng)
            der = derivation(nil, linalg.mat_add(base.entries, lower.entries))
            ext = ExtensionMetric(nil, der, random_flag_gram(n, rng))
            blocks = ricci_blocks(ext).full
            general = ricci_operator_general(extension_metric_flat(ext))
            scale = max(1.0, float(np.abs(general).max()))
            assert np.abs(blocks - general).max() < 1e-10 * scale
            count += 1
    assert count == 100
    assert time.time() - start < 10.0


@criterion(3, "Q6 nilpotent Ricci diagonal at the identity metric")
def test_acceptance_3_q6_diagonal():
    nil = make_Qn(6)
    ric = ricci_nilpotent(nil, np.eye(6))
    expected = np.diag([-1.5, -1.0, -0.5, -0.5, 0.0, 1.0])
    assert np.abs(ric - expected).max() < 1e-12
    # trace = -1/4 sum of squared bracket norms
    total = 0
    for (i, j), terms in nil.structure.items():
        total += 2 * sum(float(c) ** 2 for _, c in terms)
    assert abs(np.trace(ric) + 0.25 * total) < 1e-12
    assert abs(np.trace(ric) + 2.5) < 1e-12


@criterion(4, "tail/global iota positivity equivalence on exact grids")
def test_acceptance_4_criterion_equivalence():
    start = time.time()
    l8, _, _ = critical_l(8)
    assert l8 == 6 and kappa(8, 6) == F(7, 2) and kappa(8, 7) == F(10, 3)
    dense = [F(k, 8) for k in range(-16, 17)]  # 33 x 33 grid
    for n in (6, 8, 10, 12):
        m = n // 2
        l, _, _ = critical_l(n)
        points = 0
        for a in dense:
            for d in dense:
                if a == 0 and d == 0:
                    continue
                binding = iota_Qn(n, a, d, l) > 0 and iota_Qn(n, a, d, n) > 0
                profile = IotaProfile.for_Qn(n, a, d)
                assert binding == profile.all_tail_positive() == profile.all_positive()
                points += 1
        assert points >= 1000
    assert time.time() - start < 5.0


@criterion(5, "trace identity from iotas and exact z closed forms")
def test_acceptance_5_trace_identity_and_z():
    for n in (6, 8, 10, 12):
        for a in GRID:
            for d in GRID:
                lhs = trace_T(n, a, d)
                rhs = (F(2, n - 3) * iota_Qn(n, a, d, n - 1)
                       + F(n * n - 3 * n - 6, 2 * (n - 3)) * iota_Qn(n, a, d, n))
                assert lhs == rhs
    w, z1, z2 = solve_system18(6, 1, -1, y=[F(1, 2)])
    assert z1 == 12 and z2 == 4
    data = cone_vectors_Qn(6)
    dot = lambda u, v: sum(x * y for x, y in zip(u, v))
    assert z1 == 1 * dot(data.V1, data.V1) + (-1) * dot(data.V1, data.V2)
    assert z2 == 1 * dot(data.V1, data.V2) + (-1) * dot(data.V2, data.V2)
    assert z2 == (6 // 2 + 1) * iota_Qn(6, 1, -1, 6)


@criterion(6, "sufficiency end-to-end: every yes grid point certifies")
def test_acceptance_6_sufficiency():
    start = time.time()
    for n in (6, 8, 10):
        yes_points = [(a, d) for a in GRID for d in GRID
                      if (a, d) != (0, 0) and decide_Qn(n, a, d).answer]
        assert len(yes_points) >= 100
        for a, d in yes_points:
            built = construct(n, a, d)
            assert built.certified
            report = built.report
            tol = 1e-9 * max(1.0, float(np.abs(report.full).max()))
            assert report.eigenvalues.max() < -tol
    assert time.time() - start < 120.0


@criterion(7, "necessity evidence: no-points never certify, bound holds")
def test_acceptance_7_necessity():
    start = time.time()
    rng = np.random.default_rng(7)
    samples = 200
    wide = [F(k, 4) for k in range(-16, 17)]  # -4 .. 4 step 1/4
    for n in (6, 8):
        l, _, _ = critical_l(n)
        no_points = []
        for a in wide:
            for d in wide:
                if (a, d) == (0, 0):
                    continue
                if decide_Qn(n, a, d).answer or trace_T(n, a, d) == 0:
                    continue
                no_points.append((a, d))
                if len(no_points) == 20:
                    break
            if len(no_points) == 20:
                break
        assert len(no_points) == 20
        nil = make_Qn(n)
        for a, d in no_points:
            if trace_T(n, a, d) < 0:
                a, d = -a, -d
            der = qn_diagonal_derivation(n, a, d)
            for _ in range(samples):
                ext = ExtensionMetric(nil, der, random_flag_gram(n, rng))
                report = ricci_blocks(ext)
                assert not report.negative_definite
                lhs = float(np.trace(report.R1[l - 1:, l - 1:]))
                rhs = -float(trace_T(n, a, d)) * float(iota_Qn(n, a, d, l))
                assert lhs >= rhs - 1e-9 * max(1.0, abs(rhs))
        # the public helper agrees with the inlined bound on a sample
        ext = ExtensionMetric(nil, qn_diagonal_derivation(n, a, d),
                              random_flag_gram(n, rng))
        lhs, rhs = necessity_trace_bound(ext, l)
        assert lhs >= rhs - 1e-9 * max(1.0, abs(rhs))
    assert time.time() - start < 120.0


@criterion(8, "cone solver contract: interior solved, boundary refused")
def test_acceptance_8_solver_contract():
    rng = np.random.default_rng(88)
    solved = 0
    for _ in range(20):
        dim = int(rng.integers(3, 11))
        q = dim + 3
        vectors = rng.normal(size=(q, dim))
        coeffs = rng.uniform(0.2, 1.0, size=q)
        x_star = rng.normal(size=dim)
        target = vectors.T @ (coeffs * np.exp(vectors @ x_star)) + np.exp(x_star)
        x = solve_feasibility(ConeProblem(vectors=vectors, target=target,
                                          coeffs=coeffs))
        slack = target - vectors.T @ (coeffs * np.exp(vectors @ x))
        assert np.abs(slack - np.exp(x)).max() < 1e-9 * max(1.0, np.abs(target).max())
        solved += 1
    assert solved == 20
    for dim in (3, 5, 10):
        # entrywise nonnegative generators, target with a zero component
        vectors = np.abs(rng.normal(size=(dim + 2, dim))) + 0.1
        boundary = np.abs(rng.normal(size=dim)) + 0.5
        boundary[-1] = 0.0
        with pytest.raises(ConeInfeasibleError):
            solve_feasibility(ConeProblem(vectors=vectors, target=boundary))
        with pytest.raises(ConeInfeasibleError):
            solve_feasibility(ConeProblem(vectors=vectors, target=np.zeros(dim)))


@criterion(9, "random chain-plus-K algebras normalize exactly to Q_n")
def test_acceptance_9_normalization():
    rng = random.Random(99)
    done = 0
    for n in (6, 8):
        for _ in range(5):
            k = random_consistent_K(n, rng)
            p, normalized = normalize_to_Qn(n, k)
            assert normalized == qn_extended_chain_form(n)
            assert linalg.is_invertible(p)
            done += 1
    assert done == 10


@criterion(10, "the basis (-X2, X1, X3, X4) carries Q4 to L4")
def test_acceptance_10_q4_l4():
    q4 = FiliformSpec("Q", 4).build()
    assert change_basis(q4, q4_to_l4_basis_change()) == make_Ln(4)
