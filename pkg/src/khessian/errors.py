"""Exception hierarchy.

Domain errors (bad inputs, violated hypotheses) map to CLI exit status 1,
numeric failures (non-convergence, step-size underflow) to exit status 2.
"""


class KHessianError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(KHessianError, ValueError):
    """Input outside the domain where an operation is defined."""


class AssumptionError(DomainError):
    """A structural hypothesis on the weight or the exponents fails."""


class ChartError(DomainError):
    """The profile left the chart w < 0, w' > 0 of the phase-plane transform."""


class ConstructionError(DomainError):
    """A weight could not be built from the supplied log-derivative."""


class NumericError(KHessianError, ArithmeticError):
    """A numerical procedure failed to converge or lost accuracy."""


class EstimationError(NumericError):
    """A limit could not be extrapolated reliably."""
