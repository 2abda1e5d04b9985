"""Error taxonomy shared by all modules.

Exit codes used by the CLI: parse errors map to 2, precondition/domain
errors to 3, resource-budget errors to 4, internal-consistency errors to 5.
"""


class DesingError(Exception):
    exit_code = 1


class ParseError(DesingError):
    """Syntax error with position information."""

    exit_code = 2

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class StructuralError(DesingError):
    """Mismatched rings, fields, shapes or variable lists."""

    exit_code = 3


class DomainError(DesingError):
    """Input violates a mathematical precondition."""

    exit_code = 3


class PrecisionError(DomainError):
    """Stated truncation precision is too small for the requested step."""

    exit_code = 3


class NonUnitError(DomainError):
    """Inversion of a series with vanishing constant term."""

    exit_code = 3


class DivisibilityError(DomainError):
    """Exact division requested where the divisor does not divide."""

    exit_code = 3


class ResourceError(DesingError):
    """A configured budget (S-pairs, subsets, iterations) was exceeded."""

    exit_code = 4


class ConsistencyError(DesingError):
    """An identity that must hold by construction failed; signals a bug upstream."""

    exit_code = 5
