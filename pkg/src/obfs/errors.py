"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code protocol: input-contract violations
exit with 2, numeric failures (non-positive-definite matrices, invalid
degrees of freedom) exit with 3, and verification failures exit with 1.
"""


class ObfsError(Exception):
    """Base class for all package errors."""


class InputError(ObfsError, ValueError):
    """An argument violates a documented precondition."""


class InvalidPartitionError(InputError):
    """A feature partition fails validation against its universe."""


class UniverseMismatchError(InputError):
    """Two partitions compared over different feature universes."""


class CapExceededError(InputError):
    """Requested enumeration exceeds the configured feature cap."""


class PriorMassError(InputError):
    """Every feature partition has zero prior mass."""


class PriorNotFactorizedError(InputError):
    """The subset dynamic program requires a block-multiplicative prior."""


class NumericError(ObfsError, ArithmeticError):
    """A numeric operation failed in a way that invalidates the result."""


class NotPositiveDefiniteError(NumericError):
    """A matrix required to be positive-definite is not.

    ``pivot`` is the 0-based index of the first leading minor whose
    Cholesky factorization fails.
    """

    def __init__(self, message: str, pivot: int | None = None):
        super().__init__(message)
        self.pivot = pivot


class DegreesOfFreedomError(NumericError):
    """A posterior scale update has too few degrees of freedom."""
