"""Exception types shared across the package."""


class OrliczLabError(Exception):
    """Base class for all package errors."""


class DomainError(OrliczLabError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedOperation(OrliczLabError, NotImplementedError):
    """The operation is not available for this function family."""


class NoConvergence(OrliczLabError, RuntimeError):
    """An iterative procedure failed to bracket or converge.

    ``partial`` carries whatever was known when the procedure gave up
    (a bracket, a partial value).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class PreconditionError(OrliczLabError, ValueError):
    """Inputs violate a documented precondition."""
