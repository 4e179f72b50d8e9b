"""Exception hierarchy shared across the package."""


class NozzleBenchError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(NozzleBenchError, ValueError):
    """A parameter violates a documented precondition."""


class MeshingFailureError(NozzleBenchError):
    """Mesh generation could not satisfy the sizing request."""

    def __init__(self, message, region=None):
        super().__init__(message)
        self.region = region


class PointNotFoundError(NozzleBenchError, LookupError):
    """A sample point lies outside the mesh."""


class SingularMatrixError(NozzleBenchError):
    """Direct factorization hit a (near-)zero pivot."""


class NonConvergenceError(NozzleBenchError):
    """An iterative process exceeded its iteration budget.

    Carries the best iterate and the residual history so callers can
    inspect or salvage the partial result.
    """

    def __init__(self, message, best=None, history=None):
        super().__init__(message)
        self.best = best
        self.history = list(history) if history is not None else []


class ParseError(NozzleBenchError, ValueError):
    """Malformed input file; ``line`` is the 1-based offending line."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class InsufficientDataError(NozzleBenchError):
    """Not enough samples / datasets to evaluate a metric."""


class ConfigError(NozzleBenchError, ValueError):
    """Invalid run configuration; names the offending key."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class DependencyError(NozzleBenchError):
    """A pipeline command is missing an artifact from an earlier command."""

    def __init__(self, message, needed_command=None):
        super().__init__(message)
        self.needed_command = needed_command
