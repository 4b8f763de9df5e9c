"""Existence criteria for negative-Ricci inner products on solvable
extensions of L_n and Q_n.

Everything here is exact rational arithmetic: the yes/no answers are
decided by strict inequalities on the trace functionals iota_k, never by
floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

from . import linalg
from .algebra import DerivationMatrix, LieAlgebra, LieAlgebraError
from .catalog import make_Ln, make_Qn, qn_eigenvalues
from .linalg import ZERO, as_fraction


class CriterionError(LieAlgebraError):
    pass


def iota_Qn(n: int, a, d, k: int) -> Fraction:
    """iota_k = 1/2 ((n-3)n - (k-3)(k-2)) a + (n-k+2) d, the trace of the
    (a, d) derivation restricted to span(X_k, ..., X_n)."""
    if n % 2 != 0 or n < 6:
        raise CriterionError("iota_Qn requires even n >= 6")
    if not 3 <= k <= n:
        raise CriterionError(f"k must lie in 3..{n}")
    a, d = as_fraction(a), as_fraction(d)
    return Fraction((n - 3) * n - (k - 3) * (k - 2), 2) * a + (n - k + 2) * d


def iota_Ln(n: int, alpha, beta, k: int = 2) -> Fraction:
    """Trace of alpha*phi1 + beta*phi2 on span(X_k, ..., X_n) of L_n."""
    if not 2 <= k <= n:
        raise CriterionError(f"k must lie in 2..{n}")
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    eigs = [alpha] + [i * alpha + beta for i in range(2, n + 1)]
    return sum(eigs[k - 1:], ZERO)


def iota_general(D: DerivationMatrix, k: int) -> Fraction:
    """Exact trace of the derivation restricted to span(X_k, ..., X_n);
    the subspace must be invariant."""
    n = D.base.dim
    if not 2 <= k <= n:
        raise CriterionError(f"k must lie in 2..{n}")
    mat = D.matrix()
    for j in range(k - 1, n):
        for i in range(k - 1):
            if mat[i][j] != 0:
                raise CriterionError("span(X_k..X_n) is not invariant under the derivation")
    return sum((mat[i][i] for i in range(k - 1, n)), ZERO)


def trace_T(n: int, a, d) -> Fraction:
    """T = Tr of the (a, d) derivation = 1/2 (n-1)(n-2) a + n d."""
    a, d = as_fraction(a), as_fraction(d)
    return Fraction((n - 1) * (n - 2), 2) * a + n * d


@dataclass(frozen=True)
class IotaProfile:
    """All iota_k values (k = 3..n) and the trace T for one (n, a, d)."""

    n: int
    values: dict[int, Fraction]
    T: Fraction

    @classmethod
    def for_Qn(cls, n: int, a, d) -> "IotaProfile":
        values = {k: iota_Qn(n, a, d, k) for k in range(3, n + 1)}
        return cls(n=n, values=values, T=trace_T(n, a, d))

    def all_tail_positive(self) -> bool:
        m = self.n // 2
        return all(self.values[k] > 0 for k in range(m + 1, self.n + 1))

    def all_positive(self) -> bool:
        return all(v > 0 for v in self.values.values())


def kappa(n: int, t: int) -> Fraction:
    """kappa_t = ((n-3)n - (t-3)(t-2)) / (2(n-t+2)); iota_t > 0 is
    equivalent to kappa_t a + d > 0."""
    return Fraction((n - 3) * n - (t - 3) * (t - 2), 2 * (n - t + 2))


def critical_l(n: int) -> tuple[int, Fraction, Fraction]:
    """The index l where kappa is maximal, with kappa_max and kappa_min.

    l is p or p+1 for p = floor(n + 2 - sqrt(2n)), computed exactly via
    integer square roots; ties break to the smaller index.  kappa_min is
    kappa_n = (n-3)/2, and l >= n/2 + 1 always.
    """
    if n % 2 != 0 or n < 6:
        raise CriterionError("critical_l requires even n >= 6")
    r = isqrt(2 * n)
    p = n + 2 - r if r * r == 2 * n else n + 1 - r
    fp, fp1 = kappa(n, p), kappa(n, p + 1)
    l = p if fp >= fp1 else p + 1
    kappa_max = max(fp, fp1)
    kappa_min = Fraction(n - 3, 2)
    assert l >= n // 2 + 1
    return l, kappa_max, kappa_min


@dataclass(frozen=True)
class Decision:
    """Outcome of the negative-Ricci existence test."""

    answer: bool
    case: str  # which branch applied: 'a' (L_n), 'b' (Q_n), 'c' (other)
    sign_flipped: bool = False
    witness: dict = field(default_factory=dict)
    reason: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "answer": "yes" if self.answer else "no",
            "case": self.case,
            "sign_flipped": self.sign_flipped,
            "witness": {k: str(v) for k, v in self.witness.items()},
            "reason": self.reason,
        }


def decide_Qn(n: int, a, d) -> Decision:
    """Existence of a negative-Ricci inner product on the one-dimensional
    extension of Q_n by the (a, d) derivation: yes iff iota_l > 0 and
    iota_n > 0 for (a, d) or (-a, -d)."""
    a, d = as_fraction(a), as_fraction(d)
    if n == 4:
        # Q_4 is L_4 in disguise; the eigenvalue pattern (a, d, a+d, a+2d)
        # corresponds to the L_4 torus parameters (alpha, beta) = (d, a - 2d)
        # under the basis (-X_2, X_1, X_3, X_4).
        inner = decide_Ln(4, d, a - 2 * d)
        return Decision(
            answer=inner.answer, case=inner.case, sign_flipped=inner.sign_flipped,
            witness=inner.witness, reason=inner.reason,
        )
    if n % 2 != 0 or n < 6:
        raise CriterionError("decide_Qn requires even n >= 4")
    if a == 0 and d == 0:
        raise CriterionError("nilpotent derivation: the nilradical would grow; "
                             "extension not admissible")
    l, _, _ = critical_l(n)
    for flipped, (aa, dd) in ((False, (a, d)), (True, (-a, -d))):
        il = iota_Qn(n, aa, dd, l)
        inn = iota_Qn(n, aa, dd, n)
        if il > 0 and inn > 0:
            profile = IotaProfile.for_Qn(n, aa, dd)
            # the two binding inequalities imply the whole tail and T > 0
            assert profile.all_tail_positive() and profile.T > 0
            return Decision(
                answer=True, case="b", sign_flipped=flipped,
                witness={"l": l, f"iota_{l}": il, f"iota_{n}": inn, "T": profile.T},
            )
    t = trace_T(n, a, d)
    reason = "unimodular (T = 0)" if t == 0 else None
    il, inn = iota_Qn(n, a, d, l), iota_Qn(n, a, d, n)
    return Decision(
        answer=False, case="b", sign_flipped=False,
        witness={"l": l, f"iota_{l}": il, f"iota_{n}": inn, "T": t},
        reason=reason,
    )


def decide_Ln(n: int, alpha, beta) -> Decision:
    """Existence on the one-dimensional extension of L_n by
    alpha*phi1 + beta*phi2: yes iff iota_2 > 0 and iota_n > 0 up to sign."""
    if n < 3:
        raise CriterionError("decide_Ln requires n >= 3")
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    if alpha == 0 and beta == 0:
        raise CriterionError("nilpotent derivation: the nilradical would grow; "
                             "extension not admissible")
    for flipped, (aa, bb) in ((False, (alpha, beta)), (True, (-alpha, -beta))):
        i2 = (Fraction(n * (n + 1), 2) - 1) * aa + (n - 1) * bb
        inn = n * aa + bb
        if i2 > 0 and inn > 0:
            return Decision(
                answer=True, case="a", sign_flipped=flipped,
                witness={"iota_2": i2, f"iota_{n}": inn},
            )
    i2 = (Fraction(n * (n + 1), 2) - 1) * alpha + (n - 1) * beta
    inn = n * alpha + beta
    t = i2 + alpha
    reason = "unimodular (T = 0)" if t == 0 else None
    return Decision(
        answer=False, case="a", sign_flipped=False,
        witness={"iota_2": i2, f"iota_{n}": inn},
        reason=reason,
    )


def _diagonal_if_triangularizable(D: DerivationMatrix):
    """Eigenvalues of a derivation that preserves the flag
    span(X_k..X_n) for k >= 2 (true for the catalog algebras): the
    diagonal entries in the X basis."""
    return D.diagonal()


def decide_extension(nil: LieAlgebra, derivations: list[DerivationMatrix]) -> Decision:
    """Decision for an extension of a filiform nilradical by the span of
    the given derivations.  Assumes (does not verify) that the extension
    is by commuting derivations.

    Over L_n / Q_n: dimension one dispatches to the eigenvalue criteria;
    dimension two yields a positive-eigenvalue witness; dimension >= 3 is
    impossible without a nilpotent combination.  Over a rank-one filiform
    nilradical the single derivation is a multiple of the positive torus
    generator.
    """
    if not derivations:
        raise CriterionError("no extension derivations given")
    for D in derivations:
        if D.base != nil:
            raise CriterionError("derivation does not act on the given nilradical")
    n = nil.dim
    vecs = [[x for row in D.entries for x in row] for D in derivations]
    dim = linalg.rank(vecs)
    if dim < len(derivations):
        raise CriterionError("extension derivations are linearly dependent")

    is_q = n % 2 == 0 and nil == make_Qn(n)
    is_l = nil == make_Ln(n)

    if is_q or is_l:
        if dim >= 3:
            raise CriterionError(
                "rank-two nilradical extended by three or more derivations: "
                "one combination is nilpotent and the nilradical would grow")
        if dim == 1:
            diag = _diagonal_if_triangularizable(derivations[0])
            if is_q and n >= 6:
                return decide_Qn(n, diag[0], diag[1])
            if is_q:  # Q_4 == L_4
                return decide_Qn(4, diag[0], diag[1])
            alpha = diag[0]
            beta = diag[1] - 2 * alpha
            return decide_Ln(n, alpha, beta)
        # dim == 2: find a combination with all eigenvalues positive by
        # solving for (lambda_1, lambda_2) = (1, 1) (Q) or (1, 2) (L).
        d1 = _diagonal_if_triangularizable(derivations[0])
        d2 = _diagonal_if_triangularizable(derivations[1])
        sys = [[d1[0], d2[0]], [d1[1], d2[1]]]
        target = [Fraction(1), Fraction(1)] if is_q else [Fraction(1), Fraction(2)]
        coeffs = None if not linalg.is_invertible(sys) else linalg.solve(sys, target)
        if coeffs is None:
            raise CriterionError(
                "a nonzero combination of the derivations is nilpotent; "
                "the nilradical would grow")
        witness_diag = [coeffs[0] * x + coeffs[1] * y for x, y in zip(d1, d2)]
        if not all(v > 0 for v in witness_diag):
            raise CriterionError("could not produce a positive-eigenvalue witness")
        return Decision(
            answer=True, case="c", witness={
                "combination": (coeffs[0], coeffs[1]),
                "eigenvalues": tuple(witness_diag),
            },
        )

    # rank-one nilradical: the derivation is a multiple of the torus
    # generator, whose eigenvalues all have the same sign.
    if dim > 1:
        raise CriterionError("rank-one nilradical admits only a one-dimensional "
                             "non-nilpotent extension")
    diag = _diagonal_if_triangularizable(derivations[0])
    if all(v > 0 for v in diag):
        return Decision(answer=True, case="c", witness={"eigenvalues": tuple(diag)})
    if all(v < 0 for v in diag):
        return Decision(answer=True, case="c", sign_flipped=True,
                        witness={"eigenvalues": tuple(-v for v in diag)})
    if all(v == 0 for v in diag):
        raise CriterionError("nilpotent derivation: the nilradical would grow")
    raise CriterionError("derivation eigenvalues have mixed signs; "
                         "not a rank-one torus generator")


def solve_system18(n: int, a, d, y=None) -> tuple[list[Fraction], Fraction, Fraction]:
    """Exact positive solution (w, z1, z2) of the cone decomposition

        a V1 + d V2 = sum w_i F_i + sum y_j F_{n-2+j} + z1 E1 + z2 E2

    for given small positive y (default: uniform, half the feasible slack).
    Requires decide_Qn(n, a, d) to hold without a sign flip.
    """
    a, d = as_fraction(a), as_fraction(d)
    decision = decide_Qn(n, a, d)
    if not decision.answer or decision.sign_flipped:
        raise CriterionError("system is solvable only when the iota inequalities "
                             "hold for (a, d) as given")
    m = n // 2
    iota = {k: iota_Qn(n, a, d, k) for k in range(3, n + 1)}
    if y is None:
        cap = min(iota[k] for k in range(m + 2, n + 1))
        y = [cap / (2 * (m - 2))] * (m - 2) if m > 2 else []
    y = [as_fraction(v) for v in y]
    if len(y) != m - 2:
        raise CriterionError(f"y must have length m-2 = {m - 2}")
    if any(v <= 0 for v in y):
        raise CriterionError("y entries must be strictly positive")
    w: list[Fraction] = []
    bad: list[str] = []
    for i in range(1, n - 1):
        if i <= m - 2:
            wi = iota[i + 2] + sum(y[j - 1] for j in range(i, m - 1))
        elif i == m - 1:
            wi = iota[m + 1]
        else:
            wi = iota[i + 2] - sum(y[j - 1] for j in range(max(1, n - 2 - i), m - 1))
        if wi <= 0:
            bad.append(f"w_{i} = {wi}")
        w.append(wi)
    if bad:
        raise CriterionError("infeasible y (choose smaller): " + ", ".join(bad))
    # closed forms via orthogonality of V1, V2 to every F
    from .constructor import cone_vectors_Qn  # local import to avoid a cycle

    data = cone_vectors_Qn(n)
    v1, v2 = data.V1, data.V2
    dot = lambda u, v: sum((x * z for x, z in zip(u, v)), ZERO)
    z1 = a * dot(v1, v1) + d * dot(v1, v2)
    z2 = a * dot(v1, v2) + d * dot(v2, v2)
    assert z2 == (m + 1) * iota[n]
    assert z1 == (Fraction(n ** 3 - 6 * n ** 2 + 11 * n + 6, 6 * (n - 3)) * iota[n - 1]
                  + Fraction(n ** 2 - 7 * n + 6, 2 * (n - 3)) * iota[n])
    if z1 <= 0 or z2 <= 0:
        raise CriterionError("closed-form z coefficients are not positive")
    # exact residual check of the decomposition
    target = [a * x + d * z for x, z in zip(v1, v2)]
    recon = [ZERO] * n
    for wi, f in zip(w, data.F[: n - 2]):
        for idx in range(n):
            recon[idx] += wi * f[idx]
    for yj, f in zip(y, data.F[n - 2:]):
        for idx in range(n):
            recon[idx] += yj * f[idx]
    recon[0] += z1
    recon[1] += z2
    assert recon == target
    return w, z1, z2
