"""Exception types raised by the solver modules."""

from __future__ import annotations


class DeltaBoundError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(DeltaBoundError, ValueError):
    """A physical or dimensionless parameter violates its domain."""


class SpecialFunctionRangeError(DeltaBoundError, ValueError):
    """Argument outside the supported range of a special function."""


class NotBoundStateError(DeltaBoundError, ValueError):
    """The left tail would not decay (delta + gamma <= 0)."""


class PoleError(DeltaBoundError, ArithmeticError):
    """The right log-derivative was evaluated at (or too close to) a pole.

    ``bracket`` is an interval of delta that contains the pole.
    """

    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(message)
        self.bracket = bracket


class WindowTooSmallError(DeltaBoundError):
    """A root is suspected beyond the upper end of the scan window."""

    def __init__(self, message: str, suggested_delta_max: float):
        super().__init__(message)
        self.suggested_delta_max = suggested_delta_max


class OracleError(DeltaBoundError):
    """The finite-difference eigen-solver failed to converge."""
