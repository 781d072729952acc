"""Exception types raised by the numerical layers."""


class NumericsError(Exception):
    """Base class for failures inside the numerical pipeline."""


class DomainError(NumericsError, ValueError):
    """Input outside the domain of a special function."""


class EvaluationError(NumericsError):
    """A function or kernel returned a non-finite value at a quadrature node."""


class SingularityError(NumericsError):
    """The operator ``I - K`` is numerically singular.

    ``det`` carries the determinant estimate that triggered the guard.
    """

    def __init__(self, message, det=float("nan")):
        super().__init__(message)
        self.det = det


class RangeError(NumericsError, ValueError):
    """Data in a fitting window is unusable (e.g. non-positive density)."""


class DataError(NumericsError, ValueError):
    """A sample batch is degenerate."""
