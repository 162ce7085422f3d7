"""Exception types shared across the package.

Every validation error names the violated invariant and, where it makes
sense, carries the measured residual so callers (and the CLI) can report
how badly the input missed the requirement.
"""

from __future__ import annotations


class NonbilocError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message: str, residual: float | None = None):
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class NotSquare(NonbilocError):
    """Matrix expected to be square is rectangular."""


class NotHermitian(NonbilocError):
    """Matrix fails the Hermiticity check ||M - M^dag||_max <= tol."""


class NotPSD(NonbilocError):
    """Hermitian matrix has an eigenvalue below the PSD tolerance."""


class TraceNotOne(NonbilocError):
    """Density operator trace differs from 1 beyond tolerance."""


class DimensionMismatch(NonbilocError):
    """Operand shapes or subsystem dimension lists are incompatible."""


class NotBipartite(NonbilocError):
    """Operation requires exactly two subsystems."""


class BadParameter(NonbilocError):
    """Argument outside its documented domain."""


class NotNormalized(NonbilocError):
    """Vector or coefficient list fails its normalization invariant."""


class NotQubitSide(NonbilocError):
    """Operation requires the measured subsystem to be two-dimensional."""


class NotUnitary(NonbilocError):
    """Matrix fails the unitarity check ||U^dag U - I|| <= tol."""


class DegenerateMarginal(NonbilocError):
    """Closed form needs a nondegenerate marginal; caller should optimize."""


class PreconditionViolated(NonbilocError):
    """Closed-form route invoked outside its precondition domain."""


class InadmissibleMeasurement(NonbilocError):
    """Measurement disturbs the marginal it is required to leave invariant."""
