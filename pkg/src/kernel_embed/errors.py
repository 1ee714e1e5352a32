"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes, so every failure a caller can act on
has its own class.
"""


class KernelEmbedError(Exception):
    """Base class for all package errors."""


class InvalidArgument(KernelEmbedError, ValueError):
    pass


class ResourceLimit(KernelEmbedError):
    pass


class NumericFailure(KernelEmbedError, ArithmeticError):
    pass


class AnnotationConflict(KernelEmbedError):
    """A declared asymptotic annotation contradicts probed values."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class NotEnumerable(KernelEmbedError):
    pass


class Refused(KernelEmbedError):
    """The caller did not assert a precondition that cannot be checked."""
