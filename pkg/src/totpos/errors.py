"""Exception hierarchy shared by all modules."""


class TotposError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(TotposError, ValueError):
    """Shape or structure mismatch (non-square, non-Hankel, asymmetric...)."""


class DomainError(TotposError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class NumericError(TotposError, ArithmeticError):
    """NaN inputs, failed convergence, exhausted iteration caps."""


class TheoremViolation(TotposError):
    """A computed result contradicts the prediction it was meant to confirm."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SignConflict(TotposError):
    """Two minors of the same order have opposite signs."""

    def __init__(self, order, first, second):
        super().__init__(
            f"minors of order {order} disagree in sign: "
            f"{first.rows}x{first.cols} is {first.sign.name}, "
            f"{second.rows}x{second.cols} is {second.sign.name}"
        )
        self.order = order
        self.first = first
        self.second = second


class ConfigError(TotposError, ValueError):
    """Malformed configuration: unknown sections or keys, unparsable values."""
