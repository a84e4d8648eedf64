"""Exception hierarchy shared across the package."""


class EqSlemmaError(Exception):
    """Base class for all package-specific failures."""


class DimensionMismatch(EqSlemmaError, ValueError):
    """Operands have incompatible shapes."""


class InfeasibleConstraint(EqSlemmaError):
    """The equality constraint set {h(x) = 0} is empty."""


class InfeasibleProblem(EqSlemmaError):
    """The interval-constrained feasible set {l <= h(x) <= u} is empty."""


class SlaterViolation(EqSlemmaError):
    """No point with h(x) < 0 exists; the one-sided lemma needs one."""


class StrictFeasibilityViolation(EqSlemmaError):
    """No point with l < h(x) < u exists."""


class E1Violated(EqSlemmaError):
    """A regularized certificate was requested for a pair whose base
    implication fails, so no certificate family exists."""


class HypothesisViolation(EqSlemmaError):
    """A routine was invoked outside the hypotheses that make its answer
    meaningful (e.g. optimality verification with a one-signed constraint)."""


class HardCaseRecoveryFailed(EqSlemmaError):
    """The null-space correction search exhausted its attempt budget.

    Recovery is guaranteed to succeed on attainable instances, so this
    error signals an attainability misclassification (usually a tolerance
    problem) rather than missing mathematics.  It is raised loudly instead
    of silently reporting the instance as unattained.
    """


class CounterexampleSearchFailed(EqSlemmaError):
    """A violating point is known to exist but was not located."""
