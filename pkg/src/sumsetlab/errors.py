"""Exception types shared across the package."""


class SumsetLabError(Exception):
    """Base class for all errors raised by this package."""


class InvalidScaleError(SumsetLabError, ValueError):
    """A dilation/scale factor of zero was supplied."""


class DivisionDomainError(SumsetLabError, ValueError):
    """A ratio-type operation was asked to divide by a set containing zero."""


class DomainError(SumsetLabError, ValueError):
    """An argument is outside the documented domain of an operation."""


class InfeasibleSpecError(SumsetLabError, ValueError):
    """A family specification cannot produce a set of the requested size."""


class BudgetExceededError(SumsetLabError, RuntimeError):
    """A quadratic/cubic-cost operation would exceed its work budget.

    Callers may retry with a larger explicit budget; scan harnesses downgrade
    this to a skipped row instead of aborting.
    """


class UnknownCheckError(SumsetLabError, ValueError):
    """An unregistered check id was requested."""
