"""Exception and warning types raised by :mod:`qmarket`."""


class QMarketError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(QMarketError, ValueError):
    pass


class ZeroAmplitudeError(QMarketError, ValueError):
    """The amplitude vanishes identically (complete destructive interference)."""


class InvalidRepresentationError(QMarketError, ValueError):
    pass


class OutOfDomainError(QMarketError, ValueError):
    pass


class DegenerateSliceError(QMarketError, ValueError):
    """A Wigner slice integrates to zero and cannot be renormalized."""


class SignIndefiniteError(QMarketError, ValueError):
    """Sampling was requested from a density that takes negative values."""


class TruncationWarning(UserWarning):
    """A grid does not cover the support of the function sampled on it."""


class ResolutionWarning(UserWarning):
    """A grid is too coarse to resolve the function sampled on it."""
