"""Exception hierarchy.

Validation problems (bad input shapes, values, ranges) derive from
:class:`ValidationError`; floating-point range failures derive from
:class:`NumericError`.  The CLI maps the two families to exit codes 2 and 3.
"""


class DivergenceError(Exception):
    pass


class ValidationError(DivergenceError, ValueError):
    pass


class NumericError(DivergenceError, ArithmeticError):
    pass


class NonPositiveEntry(ValidationError):
    pass


class NonFiniteEntry(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class TooShort(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class InvalidOrder(ValidationError):
    """Order parameter is NaN or infinite."""


class EqualDistributions(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class OrderViolation(ValidationError):
    """Abscissae were expected in strictly increasing order."""


class FunctionDomainError(ValidationError):
    pass


class NonConvexTable(ValidationError):
    pass


class InvalidGrid(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class UnknownCheck(ValidationError):
    pass


class DivergenceOverflow(NumericError):
    """The result exceeds the double-precision exponent range."""
