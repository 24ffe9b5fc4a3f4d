"""shiftkit: languages, decompositions, pressure and large deviations for shift spaces."""
__version__ = "0.1.0"

from . import approach, decomp, ldp, shifts, thermo, words  # noqa: E402
from .errors import (AlphabetMismatchError, ConfigError, MembershipError,  # noqa: E402
                     ParameterError, PrecisionError, ResourceLimitError, ShiftkitError,
                     SpecificationError)

__all__ = [
    "__version__", "approach", "decomp", "ldp", "shifts", "thermo", "words",
    "AlphabetMismatchError", "ConfigError", "MembershipError", "ParameterError",
    "PrecisionError", "ResourceLimitError", "ShiftkitError", "SpecificationError",
]
