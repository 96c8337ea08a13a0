"""Exception types raised by the numerical routines."""


class DomainError(ValueError):
    """An argument lies outside the range where a quantity is defined."""


class ConvergenceError(ArithmeticError):
    """An iterative method hit its iteration cap before converging."""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature could not reach the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class BesselOverflowError(OverflowError):
    """An unscaled value would not be representable as a double."""


class FixtureError(RuntimeError):
    """A verification weight fixture failed its own class-membership check."""
