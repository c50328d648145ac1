"""Exception and warning types raised across the package."""


class ZOSimplexError(ValueError):
    """Base class for all errors raised by zosimplex."""


class BadDimension(ZOSimplexError):
    pass


class NegativeCoordinate(ZOSimplexError):
    pass


class SumMismatch(ZOSimplexError):
    pass


class NonFiniteInput(ZOSimplexError):
    pass


class DeltaOutOfRange(ZOSimplexError):
    pass


class DimensionMismatch(ZOSimplexError):
    pass


class DegenerateDraw(ZOSimplexError):
    """Gamma variates underflowed to zero too many times in a row."""


class ObjectiveEvaluationFailure(ZOSimplexError):
    pass


class NotSymmetric(ZOSimplexError):
    pass


class NotPSD(ZOSimplexError):
    pass


class ProbeOffSimplex(ZOSimplexError):
    """A finite-difference probe would leave the simplex."""


class NonInteriorIterate(ZOSimplexError):
    pass


class EmptyTrace(ZOSimplexError):
    pass


class ConfigInvalid(ZOSimplexError):
    pass


class ObjectiveUnknown(ConfigInvalid):
    pass


class InsufficientHorizons(ZOSimplexError):
    pass


class HorizonTooSmallForStability(RuntimeWarning):
    """Step size is too large for |eta * g_i| <= 1 to be guaranteed."""
