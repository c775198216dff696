"""Exception types raised by onecomp."""


class OneCompError(Exception):
    """Base class for all library errors."""


class DomainError(OneCompError, ValueError):
    """An argument lies outside the domain of an operation."""


class TruncationBudgetExceeded(OneCompError):
    """A certified tail bound cannot reach the tolerance within the index budget."""


class SpectrumHit(OneCompError):
    """A boundary point lies on (or too close to) the spectrum of an inner function."""


class Unsupported(OneCompError):
    """The operation is not available for this kind of inner function."""


class NotRadial(OneCompError):
    """A sequence was expected to be real and increasing but is not."""


class EtaOutOfRange(DomainError):
    """Hoffman eta violates 0 < eta < (1 - sqrt(1 - delta**2)) / delta."""


class DerivativeVanishes(OneCompError):
    """A boundary derivative is numerically zero where it must not be."""


class SpecError(OneCompError, ValueError):
    """A serialized function or sequence spec is malformed."""
