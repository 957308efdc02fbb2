"""Exception hierarchy shared by every module of the package."""


class VortexModesError(Exception):
    """Base class for all package errors."""


class DomainError(VortexModesError, ValueError):
    """An argument lies outside the domain where a formula is valid."""


class BracketError(VortexModesError):
    """A root bracket or a denominator sign condition is violated."""


class ConvergenceError(VortexModesError):
    """An iterative procedure ran out of budget."""


class QuadratureError(VortexModesError):
    """Adaptive quadrature failed; ``estimate`` holds the best value so far."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class EvaluationError(QuadratureError):
    """The integrand returned a non-finite value."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class NormalizationError(VortexModesError):
    """A radial solution could not be normalized to one at x = 1."""


class NoEigenvalueError(VortexModesError):
    """The matching determinant has no sign change on the admissible bracket."""


class ConfigError(VortexModesError, ValueError):
    """Invalid or unknown configuration."""


class AssemblyError(VortexModesError):
    """The physical mode cannot be assembled (denominator below the safety floor)."""
