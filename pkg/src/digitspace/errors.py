"""Exception hierarchy shared by all modules."""


class DigitSpaceError(Exception):
    """Base class for library errors."""


class ArityError(DigitSpaceError, ValueError):
    """Dimension, arity or alphabet mismatch."""


class DomainError(DigitSpaceError, ValueError):
    """An argument lies outside the domain of an operation."""


class WellCoveringError(DigitSpaceError):
    """No digit range contains the requested ball."""


class ProductivityError(DigitSpaceError):
    """A step budget or read fuel ran out while forcing a lazy structure."""


class CoherenceError(DigitSpaceError):
    """A prefix chain is not coherent."""


class InconsistentOracleError(DigitSpaceError):
    """A Cauchy oracle contradicted itself or previously committed digits."""


class UnsupportedError(DigitSpaceError):
    """The construction is not available for this kind of space."""


class FormError(DigitSpaceError, ValueError):
    """A label does not have the expected shape."""


class ParseError(DigitSpaceError, ValueError):
    """Malformed text input."""
