"""Exception types raised across the package."""


class SkewCorrError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(SkewCorrError, ValueError):
    pass


class InvariantViolation(SkewCorrError, ValueError):
    """A matrix failed one of the density-matrix invariants.

    ``residual`` carries the magnitude of the violation.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NonHermitian(InvariantViolation):
    pass


class TraceNotOne(InvariantViolation):
    pass


class NotPSD(InvariantViolation):
    pass


class NoConvergence(SkewCorrError, RuntimeError):
    pass


class OutOfRange(SkewCorrError, ValueError):
    pass


class ParseError(SkewCorrError, ValueError):
    pass


class NotXType(SkewCorrError, ValueError):
    pass


class NotBlockDiagonal(SkewCorrError, ValueError):
    pass


class BranchMismatch(SkewCorrError, ValueError):
    pass


class NoAnalyticTheorem(SkewCorrError, ValueError):
    """Raised when no closed form covers the requested state and measure."""
