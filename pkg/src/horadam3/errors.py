"""Exception hierarchy shared by every module of the package."""


class HoradamError(ValueError):
    """Base class for domain errors (bad parameters, undefined closed forms)."""


class ZeroTError(HoradamError):
    """The trailing recurrence coefficient t is zero."""


class EmptyRangeError(HoradamError):
    """A term range was requested with lo > hi."""


class NonPositiveDiscriminantError(HoradamError):
    """The characteristic cubic does not have one real and two complex roots."""


class IndexOutOfRangeError(HoradamError):
    """An identity was asked to run outside the index range it is stated for."""


class ZeroXError(HoradamError):
    """The geometric weight x is zero."""


class RootOfNuError(HoradamError):
    """The geometric weight x is a root of the characteristic polynomial."""


class SigmaNearZeroError(HoradamError):
    """The subsequence-sum denominator is numerically zero."""


class BinetPrecisionError(HoradamError):
    """A floating-point closed form drifted outside its documented tolerance."""
