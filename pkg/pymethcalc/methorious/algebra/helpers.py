"""Exact integer helpers and linear algebra over a field of exact scalars.

The matrix routines are generic: entries only need ``+ - * /``, negation
and truthiness for the zero test, so they work for `Fraction` and `Scalar`.
"""
import math
from fractions import Fraction

from ..exceptions import DivisionByZero


def to_fraction(value: 'int|str|Fraction') -> Fraction:
    """Returns an exact rational from an int, Fraction or rational string.

    Args:
        value: An ``int``, ``Fraction`` or a string such as ``'3/4'``.

    Raises:
        ValueError if the value is a float or not a rational literal.

    """
    if isinstance(value, bool):
        raise ValueError('Boolean is not a rational')
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as err:
            raise ValueError(f'Invalid rational {value}') from err
    raise ValueError(f'Invalid rational {value!r} (floats are not exact)')


def render_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


def latex_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    sign = '-' if value < 0 else ''
    return f'{sign}\\frac{{{abs(value.numerator)}}}{{{value.denominator}}}'


def falling_factorial(n: int, k: int) -> int:
    """Returns n(n-1)...(n-k+1), with the empty product 1 for k = 0."""
    if not isinstance(k, int) or k < 0:
        raise ValueError('k must be a non-negative integer')
    result = 1
    for i in range(k):
        result *= n - i
    return result


def superfactorial(i: int) -> int:
    """Returns 1!2!...i! (and 1 for i <= 0)."""
    result = 1
    for j in range(1, i + 1):
        result *= math.factorial(j)
    return result


def bareiss_det(matrix: 'list[list]', one=Fraction(1)):
    """Computes a determinant by fraction-free Bareiss elimination.

    Args:
        matrix: A square matrix as a list of rows.
        one: The unit of the entry type, returned for the empty matrix.

    Returns:
        The determinant in the entry type.

    """
    n = len(matrix)
    if n == 0:
        return one
    if any(len(row) != n for row in matrix):
        raise ValueError('Determinant requires a square matrix')
    m = [list(row) for row in matrix]
    sign = 1
    previous = one
    for k in range(n - 1):
        if not m[k][k]:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return one - one
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / previous
        previous = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def matrix_inverse(matrix: 'list[list]', one=Fraction(1)) -> 'list[list]':
    """Inverts a square matrix by Gauss-Jordan elimination.

    Raises:
        DivisionByZero if the matrix is singular.

    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError('Inverse requires a square matrix')
    if n == 0:
        return []
    zero = one - one
    m = [list(row) + [one if i == j else zero for j in range(n)]
         for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col]), None)
        if pivot is None:
            raise DivisionByZero('Singular matrix has no inverse')
        m[col], m[pivot] = m[pivot], m[col]
        lead = m[col][col]
        m[col] = [x / lead for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def mat_vec(matrix: 'list[list]', vector: list) -> list:
    result = []
    for row in matrix:
        acc = None
        for a, b in zip(row, vector):
            acc = a * b if acc is None else acc + a * b
        result.append(acc)
    return result


class EchelonBasis:
    """An incrementally reduced row basis of sparse vectors.

    Vectors are dicts from sortable keys to field elements. Rows are stored
    with a unit pivot and zero entries at the pivots of earlier rows.
    """
    def __init__(self) -> None:
        self._rows: 'list[tuple]' = []

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, vector: dict) -> dict:
        """Returns the residual of a vector after elimination."""
        residual = {k: v for k, v in vector.items() if v}
        for pivot, row in self._rows:
            c = residual.get(pivot)
            if not c:
                continue
            for k, v in row.items():
                current = residual.get(k)
                value = -(c * v) if current is None else current - c * v
                if value:
                    residual[k] = value
                else:
                    residual.pop(k, None)
        return residual

    def contains(self, vector: dict) -> bool:
        return not self.reduce(vector)

    def add(self, vector: dict) -> bool:
        """Adds a vector if it is independent of the basis.

        Returns:
            True if the rank increased.

        """
        residual = self.reduce(vector)
        if not residual:
            return False
        pivot = min(residual)
        lead = residual[pivot]
        self._rows.append((pivot, {k: v / lead for k, v in residual.items()}))
        return True


def vector_rank(vectors: 'list[dict]') -> int:
    basis = EchelonBasis()
    for v in vectors:
        basis.add(v)
    return basis.rank


def kernel_combinations(vectors: 'list[dict]', one=Fraction(1)) -> 'list[list]':
    """Returns a basis of the linear relations among sparse vectors.

    Each relation is a coefficient list c with sum(c[k] * vectors[k]) = 0.
    """
    zero = one - one
    rows = []   # (pivot, reduced vector, combination)
    relations = []
    for index, vector in enumerate(vectors):
        residual = {k: v for k, v in vector.items() if v}
        combination = [zero] * len(vectors)
        combination[index] = one
        for pivot, row, row_combination in rows:
            c = residual.get(pivot)
            if not c:
                continue
            for k, v in row.items():
                value = residual.get(k, zero) - c * v
                if value:
                    residual[k] = value
                else:
                    residual.pop(k, None)
            combination = [a - c * b for a, b in zip(combination, row_combination)]
        if not residual:
            relations.append(combination)
            continue
        pivot = min(residual)
        lead = residual[pivot]
        rows.append((pivot, {k: v / lead for k, v in residual.items()},
                     [a / lead for a in combination]))
    return relations
