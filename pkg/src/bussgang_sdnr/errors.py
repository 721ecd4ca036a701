"""Exception hierarchy shared across the package."""


class BussgangError(Exception):
    """Base class for all package errors."""


class DomainError(BussgangError, ValueError):
    """An input lies outside the domain of the requested quantity.

    ``quantity`` names the quantity that could not be computed so the CLI can
    report it in its single-line diagnostic.
    """

    def __init__(self, message, quantity=None):
        super().__init__(message)
        self.quantity = quantity


class DegenerateError(DomainError):
    """The Bussgang gain is zero, so no SDNR can be formed."""


class ConvergenceError(BussgangError, ArithmeticError):
    """Adaptive quadrature did not reach its tolerance."""

    def __init__(self, message, estimate, error_bound):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class UsageError(BussgangError):
    """Invalid request: bad flag combination, unknown figure, and so on."""
