"""Exception hierarchy.

Validation problems derive from :class:`InvalidArgumentError` (itself a
``ValueError``); numerical breakdowns derive from :class:`NumericalError`.
The CLI maps the first family to exit code 1 and the second to exit code 2.
"""


class SeirlabError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(SeirlabError, ValueError):
    pass


class PreconditionError(InvalidArgumentError):
    """An operation was called outside the regime where it is defined."""


class UnsupportedDimensionError(InvalidArgumentError):
    pass


class NumericalError(SeirlabError, ArithmeticError):
    pass


class NumericalDomainError(NumericalError):
    """A right-hand side produced a non-finite value."""


class NumericalFailureError(NumericalError):
    """An iterative method did not converge.

    ``best_residual`` carries the smallest residual reached before giving up.
    """

    def __init__(self, message, best_residual=float("nan")):
        super().__init__(message)
        self.best_residual = best_residual


class DegenerateMeasurementError(NumericalError):
    """A measured quantity (e.g. an error ratio) is zero or negative."""
