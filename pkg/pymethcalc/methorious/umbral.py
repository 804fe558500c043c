"""Umbral expansions of Stieltjes conditions and the regularization step.

A condition beta is umbral when it is nonzero on some monomial x^m. Its
umbral coefficients b_k = beta(x^k/k!) are computed both directly and via
the shift expansion: each character E[a] is E[0] composed with the shift
sum a^m D^m / m!, and a global part E[a]*A*f has E[0]-relative
coefficients (-1)^j f^(-j-1)(a).
"""
import logging
import math
from fractions import Fraction

from .algebra.constant import Scalar
from .algebra.exppoly import ExpPoly
from .algebra.helpers import (bareiss_det, falling_factorial, superfactorial,
                              to_fraction)
from .constants import DEFAULT_UMBRAL_BOUND
from .exceptions import (ConsistencyError, DuplicatePoints,
                         UmbralSearchExceeded, ZeroCondition)
from .operators import StieltjesCondition, cond_apply
from .problems import (BoundaryProblem, DiffOperator, greens_operator,
                       is_regular)

_log = logging.getLogger(__name__)


def _scaled_monomial(k: int) -> ExpPoly:
    return ExpPoly.monomial(k, 0, Fraction(1, math.factorial(k)))


class UmbralExpansion:
    """The coefficients b_0 ... b_N of a condition.

    Attributes:
        source: The condition expanded.
        bound: The last index N.
        coefficients: b_k = source(x^k/k!).

    """
    __slots__ = ('source', 'bound', 'coefficients')

    def __init__(self, source: StieltjesCondition, bound: int,
                 coefficients: 'list[Scalar]') -> None:
        self.source = source
        self.bound = bound
        self.coefficients = tuple(coefficients)

    def __iter__(self):
        return iter(self.coefficients)

    def __len__(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, k: int) -> Scalar:
        return self.coefficients[k]

    def json(self) -> dict:
        return {
            'condition': self.source.render(),
            'bound': self.bound,
            'coefficients': [b.render() for b in self.coefficients],
        }


def global_shift_coefficients(point: Fraction, f: ExpPoly,
                              bound: int) -> 'list[Scalar]':
    """E[0]-relative coefficients (-1)^j f^(-j-1)(point) of E[point]*A*f."""
    result = []
    primitive = f.integrate()
    for j in range(bound + 1):
        value = primitive.evaluate(point)
        result.append(value if j % 2 == 0 else -value)
        primitive = primitive.integrate()
    return result


def _shift(point: Fraction, relative: 'dict[int, Scalar]', bound: int,
           acc: 'list[Scalar]') -> None:
    """Adds the shift sum point^m D^m/m! applied to relative coefficients."""
    for j, c in relative.items():
        if not c:
            continue
        for m in range(bound - j + 1):
            weight = point ** m / math.factorial(m) if m else Fraction(1)
            if weight:
                acc[j + m] = acc[j + m] + c * weight


def shift_route(beta: StieltjesCondition, bound: int) -> 'list[Scalar]':
    """Umbral coefficients through the shift expansion of each character."""
    acc = [Scalar(0)] * (bound + 1)
    by_point = {}
    for (a, i), c in beta.local.items():
        by_point.setdefault(a, {})
        if i <= bound:
            by_point[a][i] = by_point[a].get(i, Scalar(0)) + c
    for a, f in beta.global_functions.items():
        by_point.setdefault(a, {})
        for j, b in enumerate(global_shift_coefficients(a, f, bound)):
            by_point[a][j] = by_point[a].get(j, Scalar(0)) + b
    for a, relative in by_point.items():
        _shift(a, relative, bound, acc)
    return acc


def umbral_coefficients(beta: StieltjesCondition,
                        bound: int = DEFAULT_UMBRAL_BOUND) -> UmbralExpansion:
    """The coefficients b_k = beta(x^k/k!) for k <= bound.

    Raises:
        ValueError if bound is negative.
        ConsistencyError if the direct and shift routes disagree.

    """
    if not isinstance(bound, int) or bound < 0:
        raise ValueError('Bound must be a non-negative integer')
    direct = [cond_apply(beta, _scaled_monomial(k)) for k in range(bound + 1)]
    shifted = shift_route(beta, bound)
    for k, (b, c) in enumerate(zip(direct, shifted)):
        if b != c:
            _log.error('Umbral routes differ at k=%d for %s: %s vs %s',
                       k, beta, b, c)
            raise ConsistencyError(f'Umbral coefficient b_{k} of {beta}'
                                   f' differs: {b} vs {c}')
    return UmbralExpansion(beta, bound, direct)


def minimal_monomial(beta: StieltjesCondition,
                     bound: int = DEFAULT_UMBRAL_BOUND) -> int:
    """The least m <= bound with beta(x^m) != 0.

    Raises:
        ZeroCondition if beta is zero.
        UmbralSearchExceeded if beta vanishes on x^0 ... x^bound.

    """
    if not beta:
        raise ZeroCondition('The zero condition has no minimal monomial')
    for m in range(bound + 1):
        if cond_apply(beta, ExpPoly.monomial(m)):
            return m
    raise UmbralSearchExceeded(f'{beta} vanishes on all x^m with m <= {bound}')


def embed_single(beta: StieltjesCondition,
                 bound: int = DEFAULT_UMBRAL_BOUND) -> BoundaryProblem:
    """The regular problem (D^(k+1), [E[0], ..., E[0]*D^(k-1), beta]).

    k is the minimal monomial of beta.
    """
    k = minimal_monomial(beta, bound)
    conditions = [StieltjesCondition.evaluation(0, i) for i in range(k)]
    return BoundaryProblem(DiffOperator.power(k + 1), conditions + [beta])


def regularize(p: BoundaryProblem,
               bound: int = DEFAULT_UMBRAL_BOUND) -> BoundaryProblem:
    """A regular problem having p as a subproblem.

    Starts from the initial value problem for T and adds the conditions
    one at a time: a condition beta with nonzero gamma = beta*G is embedded
    through (T', B') = embed_single(gamma) and the current problem becomes
    (T' S, [E[0]*D^i*S for i < k] + [beta] + C) where (S, C) is the current
    problem.

    A problem that is already regular is returned unchanged.

    Raises:
        ValueError if p has order zero but carries conditions.
        UmbralSearchExceeded if some gamma fails the monomial search.

    """
    if p.order == 0:
        if p.conditions:
            raise ValueError(f'Cannot regularize {p} of order zero')
        return p
    if p.dimension == p.order and is_regular(p):
        return p
    current = BoundaryProblem.initial_value(p.operator)
    for beta in p.conditions:
        gamma = beta * greens_operator(current)
        if not gamma:
            _log.debug('%s is absorbed by %s', beta, current)
            continue
        embedding = embed_single(gamma, bound)
        k = embedding.order - 1
        s = current.operator.to_operator()
        conditions = [StieltjesCondition.evaluation(0, i) * s for i in range(k)]
        conditions.append(beta)
        conditions.extend(current.conditions)
        current = BoundaryProblem.from_conditions(
            embedding.operator.compose(current.operator), conditions)
        _log.debug('Embedded %s with k=%d: %s', beta, k, current)
    return current


def int_part_pol_check(f: ExpPoly, n: int) -> bool:
    """Checks the integration-by-parts expansion of A(f x^n).

    Compares the integral of f*x^n with
    sum_k (-1)^k n(n-1)...(n-k+1) x^(n-k) f^(-k-1).
    """
    if not isinstance(n, int) or n < 0:
        raise ValueError('n must be a non-negative integer')
    f = ExpPoly.coerce(f)
    lhs = (f * ExpPoly.monomial(n)).integrate()
    rhs = ExpPoly()
    for k in range(n + 1):
        term = ExpPoly.monomial(n - k) * f.antider(k + 1)
        rhs = rhs + term * ((-1) ** k * falling_factorial(n, k))
    return lhs == rhs


def vandermonde(points: 'list[Fraction]') -> Fraction:
    result = Fraction(1)
    for j, xj in enumerate(points):
        for xi in points[:j]:
            result *= xj - xi
    return result


def block_vandermonde_matrix(points: 'list[Fraction]',
                             s: int) -> 'list[list[Fraction]]':
    """Rows x^k/k!, columns the derivatives of order < s at each point."""
    n = len(points) * s
    matrix = []
    for k in range(n):
        row = []
        for x in points:
            for j in range(s):
                if k < j:
                    row.append(Fraction(0))
                else:
                    row.append(Fraction(x) ** (k - j) / math.factorial(k - j)
                               if k > j else Fraction(1))
        matrix.append(row)
    return matrix


def block_vandermonde_det(points: 'list[int|Fraction|str]', s: int) -> Scalar:
    """The determinant of the block matrix, checked against its closed form.

    The closed form is V^(s^2) * sf(s-1)^r / sf(n-1) with V the Vandermonde
    determinant of the r points, n = r*s and sf the superfactorial.

    Raises:
        DuplicatePoints if two points coincide.
        ConsistencyError if elimination and closed form disagree.

    """
    points = [to_fraction(x) for x in points]
    if len(set(points)) != len(points):
        raise DuplicatePoints(f'Points must be distinct: {points}')
    if not isinstance(s, int) or s < 1:
        raise ValueError('s must be a positive integer')
    r = len(points)
    det = bareiss_det(block_vandermonde_matrix(points, s))
    expected = (vandermonde(points) ** (s * s) *
                Fraction(superfactorial(s - 1) ** r, superfactorial(r * s - 1)))
    if det != expected:
        _log.error('Block determinant %s differs from closed form %s',
                   det, expected)
        raise ConsistencyError(f'Determinant {det} differs from {expected}')
    return Scalar(det)


def local_bound(beta: StieltjesCondition) -> int:
    """Monomial search bound (#points)*(max order + 1) for local conditions."""
    if not beta.is_local():
        raise ValueError(f'{beta} has a global part')
    return len(beta.points) * (beta.order + 1)


def global_not_local_witness(point: 'int|Fraction|str', f: ExpPoly,
                             order: int, bound: int = DEFAULT_UMBRAL_BOUND
                             ) -> 'int|None':
    """Finds k in (order, bound] where E[point]*A*f has a nonzero coefficient.

    A local condition at point of order <= order has vanishing
    point-relative coefficients beyond order, so a witness shows that the
    global condition has no such local equivalent.

    Returns:
        The first such k, or None if none exists up to the bound.

    """
    a = to_fraction(point)
    coefficients = global_shift_coefficients(a, ExpPoly.coerce(f), bound)
    for k in range(order + 1, bound + 1):
        if coefficients[k]:
            return k
    _log.info('No witness beyond order %d for E[%s]*A*(%s) up to %d',
              order, a, f, bound)
    return None
