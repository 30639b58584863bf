"""Exception hierarchy shared by every module of the package."""


class ZetaLaplaceError(Exception):
    """Base class for all errors raised by zetalaplace."""


class DomainError(ZetaLaplaceError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation exactly at a pole (e.g. gamma at a non-positive integer)."""


class BranchCutError(DomainError):
    """Evaluation on a branch cut where no continuous value is defined."""


class RangeError(DomainError):
    """Argument outside the range an evaluator is certified for."""


class ToleranceError(ZetaLaplaceError):
    """Requested accuracy cannot be certified."""


class ConvergenceError(ZetaLaplaceError):
    """An iterative or truncated procedure could not meet its tolerance."""


class CapacityError(ZetaLaplaceError):
    """Requested table would exceed the memory budget."""


class IllConditionedError(ZetaLaplaceError):
    """Least-squares system is numerically singular."""


class ParseError(ZetaLaplaceError):
    """Malformed input text.

    ``line`` is the 1-based line number of the offending record.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ZetaLaplaceError, ValueError):
    """Well-formed input that violates a data invariant."""


class NotFoundError(ZetaLaplaceError, KeyError):
    """Requested record is not present."""
