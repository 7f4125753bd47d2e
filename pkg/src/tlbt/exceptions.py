"""Exception hierarchy.

Everything raised deliberately by the package derives from :class:`TLBTError`
so callers (and the CLI) can separate data/usage problems from bugs.
"""


class TLBTError(Exception):
    """Base class for all package errors."""


class DimensionError(TLBTError, ValueError):
    """Matrix shapes are inconsistent."""


class LyapunovError(TLBTError):
    """The Lyapunov operator is (numerically) singular.

    Raised when two eigenvalues of the coefficient matrix sum to
    (nearly) zero, so the equation has no unique solution.
    """

    def __init__(self, message, eigenvalue_sum=None):
        super().__init__(message)
        self.eigenvalue_sum = eigenvalue_sum


class NotPSDError(TLBTError):
    """A matrix expected to be positive semidefinite is not."""


class SingularMatrixError(TLBTError):
    """A matrix expected to be positive definite is numerically singular."""


class StabilityError(TLBTError):
    """The state matrix is not Hurwitz."""

    def __init__(self, message, abscissa=None):
        super().__init__(message)
        self.abscissa = abscissa


class ReachabilityError(TLBTError):
    """The reachability Gramian is not numerically positive definite."""


class ObservabilityError(TLBTError):
    """The observability Gramian is not numerically positive definite."""


class IllConditionedBalancingError(TLBTError):
    """The balancing transformation is too ill-conditioned to be trusted."""


class GridError(TLBTError, ValueError):
    """A time grid does not meet the requirements of an operation."""


class SignalError(TLBTError, ValueError):
    """An input signal is unusable (zero, non-finite, wrong width)."""


class ParseError(TLBTError, ValueError):
    """A system, ROM or signal file could not be parsed."""
