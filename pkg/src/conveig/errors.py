"""Exception types shared across the package."""


class ConveigError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(ConveigError, ValueError):
    """A scalar argument violates a precondition (sign, range, shape)."""


class GridMismatchError(ConveigError, ValueError):
    """Two grid functions do not live on the same grid."""


class ResolutionError(ConveigError, ValueError):
    """The grid spacing is too coarse to resolve a kernel."""


class OutOfRangeError(ConveigError, ValueError):
    """A cut-off or eigenvalue target lies outside the representable range."""


class GridTooSmallError(ConveigError, ValueError):
    """The grid half-width cannot accommodate the requested computation.

    The remedy is always the same: enlarge L.
    """


class ConvergenceError(ConveigError, RuntimeError):
    """An iteration exceeded its budget; carries the last residual."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class AdmissibilityError(ConveigError, ValueError):
    """The eigenvalue sigma lies outside the open interval where
    nonnegative unimodal eigenfunctions exist; carries that interval."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class UnsupportedKernelError(ConveigError, ValueError):
    """The kernel lacks a property a probe needs (e.g. a finite, negative
    curvature at the origin)."""
