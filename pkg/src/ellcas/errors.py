"""Exception hierarchy.

Everything raised on purpose by this package derives from EllcasError, so
callers (and the CLI) can separate "bad input" from "the numerics gave up"
without string matching.
"""


class EllcasError(Exception):
    """Base class for all package errors."""


class InputError(EllcasError, ValueError):
    """Invalid parameters: bad geometry, out-of-domain arguments, bad config."""


class ConvergenceError(EllcasError):
    """An iterative scheme (eigensolve, series, quadrature) failed to converge."""


class RangeError(EllcasError):
    """Request exceeds a certified evaluation range (e.g. Im z beyond the
    expansion's cap, or an argument that would overflow double precision)."""


class NumericalError(EllcasError):
    """A computed quantity violates a structural guarantee (non-positive
    determinant, NaN in a matrix, ...). Carries diagnostic context."""

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = dict(context)

    def __str__(self):
        base = super().__str__()
        if self.context:
            extras = ", ".join(f"{k}={v!r}" for k, v in self.context.items())
            return f"{base} [{extras}]"
        return base
