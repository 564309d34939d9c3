"""Exception types raised across the package."""


class PurilabError(Exception):
    """Base class for all package errors."""


class NotHermitian(PurilabError, ValueError):
    pass


class BlochLengthExceedsOne(PurilabError, ValueError):
    pass


class NegativeEigenvalue(PurilabError, ValueError):
    pass


class InvalidState(PurilabError, ValueError):
    pass


class RankDeficient(PurilabError, RuntimeError):
    pass


class ArityMismatch(PurilabError, ValueError):
    pass


class NoSolution(PurilabError):
    """A circuit template cannot reach the requested purity.

    ``purity_range`` carries the (min, max) average purity the template can
    reach, as found by dense sampling.
    """

    def __init__(self, message, purity_range=None):
        super().__init__(message)
        self.purity_range = purity_range


class InfeasibleTarget(PurilabError, ValueError):
    pass


class ConvergenceFailure(PurilabError, RuntimeError):
    pass
