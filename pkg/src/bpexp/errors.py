"""Exception types raised by bpexp."""


class BPExpError(Exception):
    """Base class for all library errors."""


class StencilError(BPExpError, ValueError):
    pass


class ExtensionError(BPExpError, ValueError):
    """An extension operator is incomplete or inconsistent with the stencil."""


class BoundaryBlockError(BPExpError, ValueError):
    pass


class DenseCapError(BPExpError, ValueError):
    """A dense algorithm was asked to work above its configured size cap."""


class NumericalError(BPExpError, ArithmeticError):
    """A numerical procedure failed (singular solve, root search, oracle gate)."""


class SingularStepError(NumericalError):
    pass


class BracketError(NumericalError):
    """Root search found no sign change on an interval.

    Attributes
    ----------
    interval : tuple of float
        The bracket ``(lo, hi)`` that failed.
    index : int
        Position of the bracket in the search.
    """

    def __init__(self, message, interval=None, index=None):
        super().__init__(message)
        self.interval = interval
        self.index = index


class OracleMismatchError(NumericalError):
    pass
