"""Exception types raised across the package."""


class BatemanError(Exception):
    """Base class for all package errors."""


class DimensionError(BatemanError, ValueError):
    """Operands live on different bases or have mismatched shapes."""


class ConvergenceError(BatemanError, ArithmeticError):
    """A series could not reach the requested tolerance within its order cap."""


class DomainError(BatemanError, ValueError):
    """A parameter lies outside the domain of the requested method."""


class DegeneracyError(BatemanError, ArithmeticError):
    """A nullspace or norm that must be one-dimensional / nonzero is not."""


class CapacityError(BatemanError, ValueError):
    """The truncated basis is too small for the requested construction."""


class NonConvergenceError(BatemanError, ArithmeticError):
    """A pairing whose partial sums do not settle within the truncation.

    ``partial_sums`` holds the shell-by-shell running sums so callers can
    inspect the oscillation.
    """

    def __init__(self, message, partial_sums=None):
        super().__init__(message)
        self.partial_sums = partial_sums


class QuadratureError(BatemanError, ValueError):
    """A quadrature rule is too small to integrate the requested degree exactly."""
