"""eqslemma: certified decisions for quadratic implication lemmas.

Given quadratic functions ``f`` and ``h``, the package decides when the
implication "``h(x) = 0`` forces ``f(x) >= 0``" is equivalent to the
existence of a single multiplier ``mu`` with ``f + mu*h`` nonnegative
everywhere, along with the inequality, interval, and regularized
variants of that question; globally solves ``inf f`` over one quadratic
equality or an interval constraint through the one-dimensional dual of
the matrix pencil ``A + mu*B``; and classifies convexity of the joint
image of a quadratic with several affine maps.  Every verdict comes
with a machine-checkable certificate or counterexample, and brute-force
oracles are provided to audit the decisions at small dimension.
"""

from .errors import (
    CounterexampleSearchFailed,
    DimensionMismatch,
    E1Violated,
    EqSlemmaError,
    HardCaseRecoveryFailed,
    HypothesisViolation,
    InfeasibleConstraint,
    InfeasibleProblem,
    SlaterViolation,
    StrictFeasibilityViolation,
)
from .gtrs import GtrsOutcome, IntervalSLemmaVerdict, interval_slemma, solve_gtrs, strict_feasibility
from .linalg import (
    PencilInterval,
    Spectrum,
    in_range,
    max_lambda_min_affine,
    null_basis,
    pencil_interval,
    pinv,
    spectrum,
)
from .numrange import (
    ConvexityVerdict,
    OrthantVerdict,
    classify_convexity,
    classify_orthant_p1,
    image_membership,
    polyak_sufficient,
)
from .oracles import oracle_e1, oracle_e2, sample_constraint
from .qp1eqc import (
    AttainabilityWitness,
    DualProfile,
    SolveOutcome,
    dual_maximum,
    dual_value,
    recover_primal,
    solve,
    strong_duality_gap,
    verify_global_optimality,
)
from .quadratics import (
    DEFAULT_SEED,
    GtrsProblem,
    NumrangeProblem,
    QuadForm,
    Qp1eqcProblem,
    ValueRange,
    build_dwp,
    evaluate,
    evaluate_many,
    lift,
    restrict_to_affine,
    value_range,
)
from .sconditions import all_sconditions, scondition
from .slemma import (
    RegularizedCertificate,
    SLemmaVerdict,
    assumption1_holds,
    certificate_is_valid,
    e1_check,
    e2_certificate_search,
    exception_matrix,
    finsler,
    homogeneous_equivalence,
    one_sided_verdict,
    regularized_certificate_is_valid,
    regularized_inequality,
    regularized_lambda,
    slemma_equality,
    slemma_inequality,
    two_sided_verdict,
)

__version__ = "0.1.0"
