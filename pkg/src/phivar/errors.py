"""Exception hierarchy shared across the package."""


class PhiVarError(Exception):
    """Base class for all library errors."""


class InvalidTolerance(PhiVarError):
    """Nonpositive tolerance passed to a series evaluation."""


class ModeError(PhiVarError):
    """Operation requires the critical scaling mode |alpha| = 1/b."""


class BaseError(PhiVarError):
    """Operation is only defined for a particular base-function kind."""


class ParityError(PhiVarError):
    """Chain operations require an odd base b >= 3."""


class PhiDomainError(PhiVarError):
    """An increment magnitude fell outside the domain [0, 1) of Phi."""


class RangeError(PhiVarError):
    """An index, bound, or exponent argument is out of range."""


class UnsupportedBase(PhiVarError):
    """No closed-form limit is known for this base function."""
