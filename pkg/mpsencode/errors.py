"""Exception and warning types raised across the package."""
from __future__ import annotations

from typing import Optional


class MpsEncodeError(Exception):
    """Base class for every error raised by mpsencode."""


class EvaluationError(MpsEncodeError, ValueError):
    """An oracle returned a non-finite value."""

    def __init__(self, message: str, x: Optional[float] = None):
        super().__init__(message)
        self.x = x


class DegenerateInputError(MpsEncodeError, ValueError):
    """Input vector or function is identically zero."""


class UnsupportedTruncationError(MpsEncodeError, ValueError):
    """Truncated probability mass on [0, L] is numerically zero."""


class DomainError(MpsEncodeError, ValueError):
    """Argument lies outside the declared support."""


class PreconditionError(MpsEncodeError, ValueError):
    """Operation called on an input that violates its precondition."""


class SizeLimitError(MpsEncodeError, ValueError):
    """Dense path requested for a qubit count it cannot hold."""


class LengthMismatchError(MpsEncodeError, ValueError):
    """Two operands disagree in length or qubit count."""


class UnsupportedKindError(MpsEncodeError, ValueError):
    """Distribution kind has no implementation for the requested operation."""


class QuadratureError(MpsEncodeError, ArithmeticError):
    """Panel refinement did not reach the requested tolerance."""

    def __init__(self, message: str, estimate: complex, error_estimate: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


class NumericalConsistencyError(MpsEncodeError, ArithmeticError):
    """A quantity that must be nonnegative came out clearly negative."""


class CircuitStateError(MpsEncodeError, RuntimeError):
    """Circuit is in the wrong state for the requested operation."""


class EmptySampleError(MpsEncodeError, ValueError):
    """Statistical test called with no samples."""


class ConfigError(MpsEncodeError, ValueError):
    """Run configuration could not be parsed or validated."""


class CappedBondWarning(UserWarning):
    """chi_max discarded more weight than eps_svd allowed."""


class TruncationWarning(UserWarning):
    """MPS simulation discarded more than the tolerated weight."""


class OutOfRegimeWarning(UserWarning):
    """Asymptotic prediction requested outside its validity window."""
