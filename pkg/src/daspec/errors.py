"""Exception hierarchy shared by all daspec modules."""


class DaspecError(Exception):
    """Base class for every error raised by this package."""


class InputError(DaspecError, ValueError):
    """An argument violates a precondition (shape, range, finiteness)."""


class NumericalError(DaspecError, RuntimeError):
    """A numerical routine failed to meet its accuracy contract.

    Carries ``worst_residual`` when the failure is a convergence problem,
    so callers can report how far off the result was.
    """

    def __init__(self, message: str, worst_residual: float | None = None):
        super().__init__(message)
        self.worst_residual = worst_residual


class DegenerateDataError(DaspecError, RuntimeError):
    """The data admits no meaningful answer (e.g. all points identical)."""
