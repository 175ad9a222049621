"""QUBO formulation of compound-rod analysis and size optimisation via minimum
complementary energy, with classical samplers and validation tools."""

from .analysis import (
    H1ErrorReport,
    SolutionReport,
    admissibility_residual,
    compliance_rank,
    h1_relative_error,
    solution_report,
)
from .polynomial import (
    CoefficientStats,
    Monomial,
    MissingVariableError,
    PseudoBooleanPolynomial,
    QuboProblem,
    Reduction,
    ReductionIdentity,
    ReductionMap,
    UnsupportedDegreeError,
    VariableId,
    VariableKind,
    coefficient_stats,
    qubo_pattern,
    reduce_to_quadratic,
)
from .rod import (
    AssembledProblem,
    CoefficientEncoding,
    DesignableAreas,
    FixedAreas,
    ForceSolution,
    RodProblem,
    analytic_force,
    assemble_internal_energy,
    assemble_objective,
    assemble_penalty,
    decode_coefficient,
    decode_sample,
)

__version__ = "0.1.0"
