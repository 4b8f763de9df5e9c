"""negricci: negative Ricci curvature on solvable extensions of filiform
Lie algebras.

Exact rational Lie algebra arithmetic, the L_n / Q_n catalog with its
derivation tori, Ricci operators of left-invariant metrics, the
eigenvalue-inequality existence criterion, and explicit construction and
certification of negative-Ricci metrics by convex cone feasibility.
"""

from .algebra import (
    DerivationMatrix,
    JacobiError,
    LieAlgebra,
    LieAlgebraError,
    NotDerivationError,
    NotNilpotentError,
    bracket,
    center,
    change_basis,
    derivation,
    derivation_space,
    diagonal_derivation,
    is_derivation,
    is_filiform,
    is_nilpotent,
    jacobi_defect,
    killing_form,
    lie_algebra,
    lower_central_series,
)
from .catalog import (
    CatalogError,
    FiliformSpec,
    eliminate_b,
    ln_diagonal_derivation,
    make_Ln,
    make_Qn,
    normalize_to_Qn,
    qn_diagonal_derivation,
    qn_eigenvalues,
    qn_extended_chain_form,
    rank_one_torus,
    torus,
)
from .ricci import (
    ExtensionMetric,
    MetricError,
    MetricLieAlgebra,
    RicciReport,
    flag_frame,
    necessity_trace_bound,
    random_flag_gram,
    ricci_blocks,
    ricci_nilpotent,
    ricci_operator_general,
)
from .criterion import (
    Decision,
    IotaProfile,
    critical_l,
    decide_extension,
    decide_Ln,
    decide_Qn,
    iota_Ln,
    iota_Qn,
    kappa,
    solve_system18,
    trace_T,
)
from .constructor import (
    ConeInfeasibleError,
    ConeProblem,
    ConstructedMetric,
    ConstructionRefused,
    DegenerationExhausted,
    assemble_metric,
    certify,
    cone_vectors_Ln,
    cone_vectors_Qn,
    construct,
    construct_Ln,
    solve_feasibility,
)

__version__ = "0.1.0"
