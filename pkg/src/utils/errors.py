"""
Exception hierarchy for the Toeplitz reaction-diffusion verifier.

The CLI maps these onto exit codes:
- InvalidInputError, PreconditionError -> 2
- ConditionNotSatisfied -> 1
"""

from typing import Optional


class ToeplitzRDError(Exception):
    """Base class for all library errors."""


class InvalidInputError(ToeplitzRDError, ValueError):
    """Malformed or out-of-range input (dimensions, tuples, files, configs)."""


class PreconditionError(ToeplitzRDError):
    """
    A named precondition of an operation does not hold.

    Args:
        reason: Short machine-greppable reason, e.g. "region membership failed"
        detail: Optional human-readable detail
    """

    def __init__(self, reason: str, detail: Optional[str] = None):
        self.reason = reason
        self.detail = detail
        message = reason if not detail else f"{reason}: {detail}"
        super().__init__(message)


class ConditionNotSatisfied(ToeplitzRDError):
    """The positivity condition on K_l^l could not be certified."""

    def __init__(self, message: str, tightest_margin: float = float("-inf"), best_thetas=None):
        self.tightest_margin = tightest_margin
        self.best_thetas = best_thetas
        super().__init__(message)
