"""Exception hierarchy shared by every bfan module."""


class BfanError(ValueError):
    """Base class for all library errors."""


class LengthMismatch(BfanError):
    pass


class DimensionTooLarge(BfanError):
    pass


class DimensionMismatch(BfanError):
    pass


class NotBoolean(BfanError):
    pass


class BadDegree(BfanError):
    pass


class EmptySet(BfanError):
    pass


class IndexNotInSet(BfanError):
    pass


class BadParameters(BfanError):
    pass


class NegativeTime(BfanError):
    pass


class PreconditionViolated(BfanError):
    pass


class RangeViolation(BfanError):
    pass


class DegreeTooHigh(BfanError):
    pass


class SearchSpaceTooLarge(BfanError):
    pass


class BudgetExhausted(BfanError):
    pass


class SubcubeTooLarge(BfanError):
    pass


class UnknownSuite(BfanError):
    pass


class ParseError(BfanError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
