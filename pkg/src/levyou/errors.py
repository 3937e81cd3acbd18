"""Exception hierarchy shared by all modules.

``DomainError`` marks inputs outside the region where a formula is defined
(CLI exit code 2); ``NumericalError`` marks a computation that ran but could
not reach the requested accuracy (CLI exit code 3).
"""


class LevyOUError(Exception):
    """Base class for package errors."""


class DomainError(LevyOUError, ValueError):
    """Argument outside the domain of definition."""


class NumericalError(LevyOUError, ArithmeticError):
    """A numerical procedure failed to meet its accuracy contract."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge.

    The best available estimate is kept on the exception so callers can
    decide whether it is still usable.
    """

    def __init__(self, message, value=None, abs_error_estimate=None):
        super().__init__(message)
        self.value = value
        self.abs_error_estimate = abs_error_estimate


class GridHullError(DomainError):
    """Interpolation query outside the sampled range."""


class InsufficientRunLength(DomainError):
    """Simulation too short for the requested statistic."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required
