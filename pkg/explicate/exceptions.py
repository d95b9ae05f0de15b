"""Domain errors.

Every error subclasses ``ValueError`` through ``ExplicateError`` so callers that
already guard against bad input with ``except ValueError`` keep working.
"""


class ExplicateError(ValueError):
    """Base class for every domain error raised by the explicate app."""


class SignatureTooLargeError(ExplicateError):
    pass


class SignatureMismatchError(ExplicateError):
    pass


class UnsupportedSignatureError(ExplicateError):
    pass


class NonUnitVectorError(ExplicateError):
    pass


class WrongIdempotentError(ExplicateError):
    pass


class IdealMembershipError(ExplicateError):
    pass


class ZeroSpinorError(ExplicateError):
    pass


class NotNormalizedError(ExplicateError):
    pass


class RepresentationMismatchError(ExplicateError):
    pass


class DomainOverflowError(ExplicateError):
    pass


class InstabilityError(ExplicateError):
    """Raised when a propagated state loses norm or reaches the grid boundary."""


class InsufficientSnapshotsError(ExplicateError):
    pass


class ZeroFieldError(ExplicateError):
    pass


class UnsupportedPotentialError(ExplicateError):
    pass


class NodeCrossingError(ExplicateError):
    """Raised when a trajectory runs into a point where the velocity field is undefined."""


class NotProjectionError(ExplicateError):
    pass


class DimensionMismatchError(ExplicateError):
    pass


class LatticeNotClosedError(ExplicateError):
    pass


class LatticeTooLargeError(ExplicateError):
    pass


class ZeroProbabilityError(ExplicateError):
    pass


class ConfigurationError(ExplicateError):
    """Raised for scenario configuration files that cannot be read or validated."""

    def __init__(self, message: str, errors: dict | None = None):
        super().__init__(message)
        self.errors = errors or {}
