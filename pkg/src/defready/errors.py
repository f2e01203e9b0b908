"""Exception types shared across the package.

The CLI maps :class:`ValidationError` to exit code 1 and
:class:`ConvergenceError` to exit code 2.
"""

from __future__ import annotations


class ValidationError(ValueError):
    """Input data violates a documented invariant."""

    def __init__(self, message: str, offender: object = None):
        super().__init__(message)
        self.offender = offender


class IcioValidationError(ValidationError):
    pass


class NonProductiveError(ValidationError):
    """Coefficient matrix has no nonnegative Leontief inverse."""


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap."""

    def __init__(self, message: str, residual: float = float("nan"), iterations: int = 0, where: object = None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.where = where
