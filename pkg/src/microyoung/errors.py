"""Exception and warning types shared across the package."""


class MicroYoungError(Exception):
    """Base class for all package errors."""


class NonIntegrableSingularity(MicroYoungError):
    pass


class DomainMismatch(MicroYoungError):
    pass


class InsufficientDerivatives(MicroYoungError):
    pass


class InsufficientResolution(MicroYoungError):
    pass


class BandTooNarrow(MicroYoungError):
    pass


class RolesUndetermined(MicroYoungError):
    pass


class NotAdmissible(MicroYoungError):
    """Raised when a product is requested for a non-admissible pair."""

    def __init__(self, reason, admissibility=None):
        super().__init__(reason)
        self.reason = reason
        self.admissibility = admissibility


class MultiplePoints(MicroYoungError):
    pass


class NoExtension(MicroYoungError):
    pass


class UnknownKernel(MicroYoungError, ValueError):
    pass


class AliasingWarning(UserWarning):
    pass


class BoundaryWarning(UserWarning):
    """Scaling-degree estimate sits close to an integer threshold."""
