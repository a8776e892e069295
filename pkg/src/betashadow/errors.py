"""Exception hierarchy shared by all modules."""


class ShadowingError(Exception):
    """Base class for every error raised by this package."""

    #: CLI exit status associated with the error family.
    exit_code = 2


class InvalidParams(ShadowingError, ValueError):
    pass


class InvalidMap(ShadowingError, ValueError):
    pass


class OutOfDomain(ShadowingError, ValueError):
    pass


class IndexOutOfRange(ShadowingError, IndexError):
    pass


class EmptySequence(ShadowingError, ValueError):
    pass


class NotFound(ShadowingError):
    exit_code = 3


class PieceExplosion(ShadowingError):
    exit_code = 3


class NoStabilization(ShadowingError):
    exit_code = 3


class EpsilonTooLarge(ShadowingError, ValueError):
    def __init__(self, constraint, message=None):
        self.constraint = constraint
        super().__init__(message or f"epsilon violates the {constraint} constraint")


class WrongCase(ShadowingError, ValueError):
    pass


class NoWitness(ShadowingError):
    """No construction applies: the map has no breakpoint or endpoint with room
    for the perturbation window (e.g. maps whose branches are all onto)."""

    exit_code = 1


class NotTransitive(ShadowingError):
    exit_code = 1


class IsTransitive(ShadowingError):
    exit_code = 1


class VerificationFailed(ShadowingError):
    exit_code = 1


class DepthExceeded(ShadowingError):
    exit_code = 3


class PointOutsideJ(ShadowingError, ValueError):
    pass
