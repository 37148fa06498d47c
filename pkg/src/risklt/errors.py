"""Exception hierarchy shared by all modules."""


class RiskLTError(Exception):
    """Base class for errors raised by :mod:`risklt`."""


class DomainError(RiskLTError, ValueError):
    """An argument lies outside the domain of the operation (e.g. ``t > horizon``)."""


class PreconditionError(RiskLTError, ValueError):
    """A caller-guaranteed precondition does not hold (e.g. a level on an endpoint)."""


class IntegrityError(RiskLTError, RuntimeError):
    """A path-derived quantity came out inconsistent, usually from a degenerate hand-built path."""


class UnsupportedModelError(RiskLTError, NotImplementedError):
    """The analytic branch does not cover the requested claim model."""


class ConvergenceError(RiskLTError, ArithmeticError):
    """A series or quadrature failed to meet its tolerance.

    Attributes:
        partial: best available estimate at the time of failure.
        err_estimate: error estimate attached to ``partial`` (``nan`` if unknown).
    """

    def __init__(self, message: str, partial: float = float("nan"), err_estimate: float = float("nan")):
        super().__init__(message)
        self.partial = partial
        self.err_estimate = err_estimate
