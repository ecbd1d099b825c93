"""Exception hierarchy shared by every catcode module."""


class CodingError(ValueError):
    """Base class for all catcode errors."""


class OutOfRange(CodingError):
    pass


class InsufficientPrimes(CodingError):
    """Fewer primes in the search window than requested; widen epsilon."""


class InsufficientModuli(CodingError):
    pass


class NotAModulus(CodingError):
    pass


class BadParameters(CodingError):
    pass


class NotCoprime(CodingError):
    pass


class ModulusTooSmall(CodingError):
    pass


class Unreachable(CodingError):
    """The site sizes cannot separate N classes (product of all sizes < N)."""


class CapExceeded(CodingError):
    pass


class ShapeMismatch(CodingError):
    pass
