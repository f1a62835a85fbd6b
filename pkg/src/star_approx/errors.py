"""Exception hierarchy shared by all modules."""


class StarApproxError(Exception):
    """Base class for all package errors."""


class DomainError(StarApproxError):
    """Evaluation or operation requested outside the defined domain."""


class IntervalMismatchError(StarApproxError):
    """Operands do not share the same time interval."""


class UnresolvedFunctionError(StarApproxError):
    """Adaptive construction hit the size cap before the tail decayed.

    Carries ``achieved``, the relative tail magnitude at the cap.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class CrossingError(StarApproxError):
    """Eigencurve matching is ambiguous (crossing or near-degeneracy)."""


class NonHermitianError(StarApproxError):
    """A matrix curve failed the Hermitian symmetry check."""


class ShapeError(StarApproxError):
    """Matrix dimensions incompatible with the requested operation."""


class ExpressionError(StarApproxError):
    """Expression parse or evaluation failure; carries a byte offset."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class ConfigError(StarApproxError):
    """Invalid problem configuration."""


class NumericalError(StarApproxError):
    """A numerical procedure failed to converge."""
