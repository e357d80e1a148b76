"""Exception types shared by every module."""


class InputError(ValueError):
    """Malformed or out-of-range input."""


class PreconditionError(ValueError):
    """A documented precondition (guard) of an operation does not hold."""


class ResourceError(RuntimeError):
    """A search exceeded its configured budget.

    ``best`` carries the best bound found before giving up, when one exists.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class InternalError(AssertionError):
    """A postcondition that the construction guarantees was violated."""
