"""Ricci curvature of metric Lie algebras.

The general Ricci operator of a metric Lie algebra, its specialization to
nilpotent algebras, the block form for one-dimensional solvable extensions
of a nilpotent algebra, the descending (flag-adapted) orthonormalization,
and the trace bound used as necessity evidence.

Curvature numerics are double precision; the structure constants feeding
them stay exact until the orthonormal frame is applied.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import algebra, linalg
from .algebra import DerivationMatrix, LieAlgebra
from .catalog import make_Qn

DEFAULT_NEG_TOL = 1e-9


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class MetricLieAlgebra:
    """A Lie algebra with a positive-definite inner product (Gram matrix)."""

    alg: LieAlgebra
    gram: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gram, dtype=float)
        if g.shape != (self.alg.dim, self.alg.dim):
            raise MetricError("gram matrix shape does not match the algebra")
        scale = max(1.0, np.abs(g).max())
        if np.abs(g - g.T).max() > 1e-14 * scale:
            raise MetricError("gram matrix is not symmetric")
        if np.linalg.eigvalsh(g).min() <= 0:
            raise MetricError("gram matrix is not positive definite")
        object.__setattr__(self, "gram", g)


@dataclass(frozen=True)
class ExtensionMetric:
    """One-dimensional extension data: nilradical, the derivation acting as
    ad_f, and an inner product on the nilradical; f is unit and orthogonal
    to the nilradical."""

    nil: LieAlgebra
    D: DerivationMatrix
    nil_gram: np.ndarray

    def __post_init__(self):
        if self.D.base != self.nil:
            raise MetricError("derivation does not act on the given nilradical")
        g = np.asarray(self.nil_gram, dtype=float)
        MetricLieAlgebra(self.nil, g)  # reuse validation
        object.__setattr__(self, "nil_gram", g)

    @property
    def T(self) -> Fraction:
        return self.D.trace

    @property
    def unimodular(self) -> bool:
        return self.T == 0


@dataclass
class RicciReport:
    """Block decomposition of the Ricci operator of an extension, in the
    orthonormal basis (e_1, ..., e_n, f)."""

    R1: np.ndarray
    R2: np.ndarray
    r3: float
    full: np.ndarray
    eigenvalues: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.eigenvalues is None:
            self.eigenvalues = np.linalg.eigvalsh(self.full)

    @property
    def tolerance(self) -> float:
        return DEFAULT_NEG_TOL * max(1.0, np.abs(self.full).max())

    @property
    def negative_definite(self) -> bool:
        return bool(self.eigenvalues.max() < -self.tolerance)

    def to_json_dict(self) -> dict:
        return {
            "R1": self.R1.tolist(),
            "R2": np.asarray(self.R2).ravel().tolist(),
            "r3": float(self.r3),
            "eigenvalues": self.eigenvalues.tolist(),
            "negative_definite": self.negative_definite,
            "tolerance": self.tolerance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def flag_frame(gram: np.ndarray) -> np.ndarray:
    """Columns of the returned (lower-triangular) matrix are an orthonormal
    basis e_1, ..., e_n with span(e_i, ..., e_n) = span(X_i, ..., X_n),
    i.e. the Gram-Schmidt frame built from X_n, X_{n-1}, ..., X_1."""
    g = np.asarray(gram, dtype=float)
    q = np.linalg.cholesky(np.linalg.inv(g))
    return q


def gram_schmidt_descending(basis, gram: np.ndarray) -> list[np.ndarray]:
    """Gram-Schmidt over <u, v> = u^T G v, processing the given vectors in
    reverse order; output[i] corresponds to basis[i], so that
    span(output[i:]) = span(basis[i:]) for every i."""
    g = np.asarray(gram, dtype=float)
    vecs = [np.asarray(v, dtype=float) for v in basis]
    out: list[np.ndarray] = []
    for v in reversed(vecs):
        w = v.copy()
        for e in out:
            w = w - (e @ g @ v) * e
        norm = float(np.sqrt(w @ g @ w))
        if norm < 1e-12 * max(1.0, float(np.abs(v).max())):
            raise MetricError("basis vectors are linearly dependent")
        out.append(w / norm)
    out.reverse()
    return out


def _adjoint_matrices(alg: LieAlgebra, frame: np.ndarray) -> list[np.ndarray]:
    """Matrices of ad_{e_i} in the frame, e_i = frame[:, i]."""
    n = alg.dim
    # exact structure tensor as float arrays of ad_{X_i}
    ad_basis = []
    for i in range(n):
        v = [Fraction(0)] * n
        v[i] = Fraction(1)
        ad_basis.append(linalg.to_float(alg.ad(v)))
    finv = np.linalg.inv(frame)
    ads = []
    for i in range(n):
        ad_ei = sum(frame[r, i] * ad_basis[r] for r in range(n))
        ads.append(finv @ ad_ei @ frame)
    return ads


def ricci_operator_general(metric: MetricLieAlgebra, frame: np.ndarray | None = None) -> np.ndarray:
    """The Ricci operator in an orthonormal frame:

        Ric = -1/2 sum ad_i^t ad_i + 1/4 sum ad_i ad_i^t - 1/2 B - (ad_H)^s

    with B the Killing form and H the mean curvature vector.  The default
    frame is the descending flag frame of the Gram matrix; any other
    orthonormal frame gives the same operator up to conjugation.
    """
    n = metric.alg.dim
    if frame is None:
        frame = flag_frame(metric.gram)
    ads = _adjoint_matrices(metric.alg, frame)
    ric = np.zeros((n, n))
    for ad in ads:
        ric += -0.5 * (ad.T @ ad) + 0.25 * (ad @ ad.T)
    killing = np.array([[np.trace(ads[i] @ ads[j]) for j in range(n)] for i in range(n)])
    h = np.array([np.trace(ad) for ad in ads])
    ad_h = sum(h[i] * ads[i] for i in range(n))
    ric += -0.5 * killing - 0.5 * (ad_h + ad_h.T)
    return 0.5 * (ric + ric.T)


def ricci_nilpotent(nil: LieAlgebra, gram: np.ndarray, frame: np.ndarray | None = None) -> np.ndarray:
    """Ricci operator of a nilpotent metric Lie algebra via the two-sum
    formula (Killing form and mean curvature vanish):

        <Ric X, Y> = 1/4 sum <X,[e_i,e_j]><Y,[e_i,e_j]>
                     - 1/2 sum <[X,e_i],e_j><[Y,e_i],e_j>
    """
    if not algebra.is_nilpotent(nil):
        raise MetricError("algebra is not nilpotent")
    n = nil.dim
    if frame is None:
        frame = flag_frame(gram)
    ads = _adjoint_matrices(nil, frame)
    ric = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            cij = ads[i][:, j]  # [e_i, e_j] in frame coordinates
            ric += 0.25 * np.outer(cij, cij)
    for i in range(n):
        # <[e_k, e_i], e_j><[e_l, e_i], e_j> summed over i, j
        ric -= 0.5 * (ads[i].T @ ads[i])
    return 0.5 * (ric + ric.T)


def derivation_in_frame(D: DerivationMatrix, frame: np.ndarray) -> np.ndarray:
    finv = np.linalg.inv(frame)
    return finv @ linalg.to_float(D.matrix()) @ frame


def ricci_blocks(ext: ExtensionMetric) -> RicciReport:
    """Ricci operator of the extension R f + n in block form:

        R1 = Ric^n + 1/2 [A, A^t] - T A^s
        (R2)_j = 1/2 sum_i <[f, e_i], [e_i, e_j]>
        r3 = -Tr((A^s)^2)

    where A is the derivation in the flag orthonormal frame and T = Tr A.
    """
    n = ext.nil.dim
    frame = flag_frame(ext.nil_gram)
    a = derivation_in_frame(ext.D, frame)
    a_s = 0.5 * (a + a.T)
    t = float(ext.T)
    ric_n = ricci_nilpotent(ext.nil, ext.nil_gram, frame=frame)
    r1 = ric_n + 0.5 * (a @ a.T - a.T @ a) - t * a_s
    ads = _adjoint_matrices(ext.nil, frame)
    r2 = np.zeros(n)
    for i in range(n):
        r2 += 0.5 * (ads[i].T @ a[:, i])
    r3 = -float(np.trace(a_s @ a_s))
    full = np.zeros((n + 1, n + 1))
    full[:n, :n] = r1
    full[:n, n] = r2
    full[n, :n] = r2
    full[n, n] = r3
    return RicciReport(R1=r1, R2=r2, r3=r3, full=full)


def flatten_extension(nil: LieAlgebra, D: DerivationMatrix) -> LieAlgebra:
    """The solvable algebra R f + n as an (n+1)-dimensional algebra with
    basis (X_1, ..., X_n, f) and [f, X_i] = D X_i."""
    n = nil.dim
    brackets = {key: list(terms) for key, terms in nil.structure.items()}
    mat = D.matrix()
    for i in range(n):
        terms = [(r + 1, -mat[r][i]) for r in range(n) if mat[r][i] != 0]
        if terms:
            brackets[(i + 1, n + 1)] = terms
    labels = nil.labels + ("f",)
    return algebra.lie_algebra(n + 1, brackets, labels=labels)


def extension_metric_flat(ext: ExtensionMetric) -> MetricLieAlgebra:
    """The flattened extension with Gram = blockdiag(nil_gram, 1)."""
    n = ext.nil.dim
    g = np.zeros((n + 1, n + 1))
    g[:n, :n] = ext.nil_gram
    g[n, n] = 1.0
    return MetricLieAlgebra(flatten_extension(ext.nil, ext.D), g)


def necessity_trace_bound(ext: ExtensionMetric, k: int) -> tuple[float, float]:
    """(Tr pi_k R1, -T iota_k) for the projection pi_k onto the flag
    subspace span(e_k, ..., e_n); the first is >= the second for every
    metric when the nilradical is Q_n and T > 0."""
    n = ext.nil.dim
    if ext.nil != make_Qn(n):
        raise MetricError("trace bound applies to a Q_n nilradical")
    m = n // 2
    if not m + 1 <= k <= n:
        raise MetricError(f"k must lie in {m + 1}..{n}")
    t = ext.T
    if t <= 0:
        raise MetricError("trace bound requires T > 0 (flip the derivation sign)")
    mat = ext.D.matrix()
    for j in range(k - 1, n):
        for i in range(k - 1):
            if mat[i][j] != 0:
                raise MetricError("span(X_k..X_n) is not invariant under the derivation")
    iota_k = sum(mat[i][i] for i in range(k - 1, n))
    report = ricci_blocks(ext)
    lhs = float(np.trace(report.R1[k - 1:, k - 1:]))
    return lhs, -float(t) * float(iota_k)


def random_flag_gram(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random metric from the flag-compatible cone: G = L^t L with L lower
    triangular, unit diagonal, off-diagonals uniform in [-1, 1]."""
    low = np.tril(rng.uniform(-1.0, 1.0, size=(n, n)), k=-1)
    l = np.eye(n) + low
    g = l.T @ l
    return 0.5 * (g + g.T)
