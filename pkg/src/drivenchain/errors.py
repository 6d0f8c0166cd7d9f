"""Exception types shared across the solver modules."""


class DrivenChainError(Exception):
    """Base class for all library errors."""


class SizeGuardError(DrivenChainError):
    """A solver was asked for a problem size beyond its documented cost cap."""


class SingularSystemError(DrivenChainError):
    """The flattened stationary operator is numerically rank-deficient."""


class DefectiveMatrixError(DrivenChainError):
    """Eigenvector basis too ill-conditioned for the spectral solve."""


class NotConvergedError(DrivenChainError):
    """An iterative procedure (image sum, transient relaxation) failed to settle."""
