"""Exception hierarchy.

Every error raised on purpose by the package derives from ``EismuError`` so
the CLI can map it to an exit code.  Setup problems (bad triples) exit with
2; everything else is a failed computation.
"""


class EismuError(Exception):
    """Base class for all package errors."""


class ValidationError(EismuError, ValueError):
    """Malformed input such as a non-prime where a prime is required."""


class SetupError(ValidationError):
    """The triple (N, p, k0) violates the standing hypotheses."""


class DomainError(EismuError, ValueError):
    """Argument outside the domain of the operation (zero residue, wrong weight class)."""


class PrecisionError(EismuError, ArithmeticError):
    """Working precision is insufficient to certify the answer."""


class NonOrdinaryError(EismuError, ArithmeticError):
    """A Hecke eigenvalue expected to be a p-adic unit is not."""


class DegenerateInputError(EismuError, ValueError):
    """Input vanishes where a non-zero value is required."""


class UnsupportedLevelError(ValidationError):
    """Modular symbols are only implemented for prime level."""


class WrongOperatorError(EismuError, ValueError):
    """Requested a Hecke operator at a prime dividing the level."""


class WrongRankError(EismuError, ValueError):
    """Operation needs a rank-one localized space."""


class InvalidSetupError(ValidationError):
    """Axiomatic data violates its defining conditions."""


class CriteriaNotMetError(EismuError):
    """A formula was requested whose hypotheses fail for this triple."""

    def __init__(self, message, reason=None):
        super().__init__(message)
        self.reason = reason


class CacheCorruptError(EismuError):
    """A survey cache file contains a malformed line."""

    def __init__(self, path, line_number, detail):
        super().__init__(f"{path}:{line_number}: corrupt cache line ({detail})")
        self.path = path
        self.line_number = line_number
