"""Error classes raised by the methorious calculus."""


class DivisionByZero(ZeroDivisionError):
    """Inversion of a zero scalar or a singular matrix."""


class PrecisionExhausted(ArithmeticError):
    """Interval refinement could not separate a value from zero."""


class ConsistencyError(ArithmeticError):
    """Two independent computations of the same quantity disagree."""


class ParseError(ValueError):
    """Syntax error with a source position.

    Attributes:
        line: 1-based line of the offending token.
        column: 1-based column of the offending token.
        expected: Sorted token names that would have been accepted.

    """
    def __init__(self,
                 message: str,
                 line: int = 1,
                 column: int = 1,
                 expected: 'list[str]' = None) -> None:
        self.line = line
        self.column = column
        self.expected = sorted(set(expected or []))
        detail = f'{message} at line {line} column {column}'
        if self.expected:
            detail += f' (expected one of: {", ".join(self.expected)})'
        super().__init__(detail)


class UnsupportedOperator(ValueError):
    """No fundamental system or common multiple is computable."""


class SingularProblem(ValueError):
    """The boundary problem is not regular."""


class DependentConditions(ValueError):
    """A boundary basis is linearly dependent."""


class FactorMismatch(ValueError):
    """The given operators do not factor the problem's operator."""


class ZeroCondition(ValueError):
    """The boundary condition has zero normal form."""


class UmbralSearchExceeded(ValueError):
    """No nonvanishing monomial was found within the search bound."""


class NotLeftDivisible(ValueError):
    """An ideal element's problem has no decomposition with the given left factor."""


class DimensionMismatch(ValueError):
    """Counts of conditions and prescribed values differ."""


class DuplicatePoints(ValueError):
    """Evaluation points are not pairwise distinct."""
