"""Exception hierarchy.

Every error raised by the library derives from :class:`WickFockError`. The
command-line driver maps :class:`InputError` subclasses to exit status 2.
"""


class WickFockError(Exception):
    pass


class InputError(WickFockError):
    """Bad configuration, model or precondition; not a certificate failure."""


class ConfigurationError(InputError, ValueError):
    pass


class ModelError(InputError, ValueError):
    pass


class DegenerateStateError(ModelError):
    pass


class TruncationError(InputError):
    """An operation would read a block corrupted by the particle cutoff."""


class PreconditionError(InputError):
    pass


class CoverageError(PreconditionError):
    pass


class MemoryGuardError(InputError):
    pass


class SpectralError(WickFockError):
    def __init__(self, message, nearest_eigenvalue=None):
        super().__init__(message)
        self.nearest_eigenvalue = nearest_eigenvalue


class EndpointError(SpectralError):
    pass
