"""Exception hierarchy shared across shiftkit."""


class ShiftkitError(Exception):
    """Base class for all shiftkit errors."""


class AlphabetMismatchError(ShiftkitError, ValueError):
    """Two words (or a word and an alphabet) do not share an alphabet."""


class ResourceLimitError(ShiftkitError, RuntimeError):
    """A configured enumeration or search budget would be exceeded."""


class PrecisionError(ShiftkitError, ArithmeticError):
    """A digit or comparison could not be certified at the available precision."""


class MembershipError(ShiftkitError, ValueError):
    """A word is not in the language (or collection) an operation requires."""


class SpecificationError(ShiftkitError, RuntimeError):
    """No admissible connecting word exists within the gap size."""


class ParameterError(ShiftkitError, ValueError):
    """Inconsistent or out-of-range parameters."""


class ConfigError(ShiftkitError, ValueError):
    """A configuration or scenario file failed to parse or validate."""
