"""Left Ore fractions over the monoid of regular boundary problems.

Elements of the problem ring are finite rational combinations of regular
problems (`ProblemCombination`). A `MethoriousOperator` is a left fraction
den^-1 * num. Common left multiples are built from least common multiples
of characteristic polynomials, so denominators stay in the
constant-coefficient scope.
"""
import itertools
import logging
from fractions import Fraction

import sympy

from .algebra.exppoly import ExpPoly
from .algebra.helpers import render_rational, to_fraction
from .base import BaseValue
from .constants import (DEFAULT_UMBRAL_BOUND, WITNESS_EXTRA_ORDER,
                        WITNESS_INTEGRAL_DEGREE, Verdict)
from .exceptions import SingularProblem
from .operators import StieltjesCondition
from .problems import (BoundaryProblem, DiffOperator, bp_mul, divide_left,
                       exact_right_quotient, greens_operator, is_regular)
from .umbral import regularize

_log = logging.getLogger(__name__)


def common_left_multiple(t1: DiffOperator, t2: DiffOperator
                         ) -> 'tuple[DiffOperator, DiffOperator, DiffOperator]':
    """Returns (T, C1, C2) with T = C1*T1 = C2*T2 of least order.

    Raises:
        UnsupportedOperator outside constant coefficients.

    """
    t = DiffOperator.from_poly(t1.char_poly().lcm(t2.char_poly()))
    return t, exact_right_quotient(t, t1), exact_right_quotient(t, t2)


def _require_regular(*problems: BoundaryProblem) -> None:
    for p in problems:
        if not is_regular(p):
            raise SingularProblem(f'{p} is not regular')


def ore_quadruple(p1: BoundaryProblem, p2: BoundaryProblem,
                  bound: int = DEFAULT_UMBRAL_BOUND
                  ) -> 'tuple[BoundaryProblem, BoundaryProblem]':
    """Returns regular (q1, q2) with q1*p1 = q2*p2.

    The common product regularizes (T, B1 + B2) for the common left
    multiple T; the cofactors follow by division.

    Raises:
        SingularProblem if p1 or p2 is not regular.
        UnsupportedOperator outside constant coefficients.
        UmbralSearchExceeded from the regularization.

    """
    identity = BoundaryProblem.identity()
    if p1 == p2:
        return identity, identity
    if p1.is_identity():
        return p2, identity
    if p2.is_identity():
        return identity, p1
    _require_regular(p1, p2)
    t, _, _ = common_left_multiple(p1.operator, p2.operator)
    merged = BoundaryProblem.from_conditions(
        t, list(p1.conditions) + list(p2.conditions))
    common = regularize(merged, bound)
    q1 = divide_left(exact_right_quotient(common.operator, p1.operator),
                     p1, common)
    q2 = divide_left(exact_right_quotient(common.operator, p2.operator),
                     p2, common)
    _log.debug('Ore quadruple of %s and %s over %s: %s, %s',
               p1, p2, common, q1, q2)
    return q1, q2


class ProblemCombination(BaseValue):
    """A finite combination sum c_i * p_i of regular boundary problems."""
    __slots__ = ('_terms',)

    def __init__(self, terms: 'list[tuple[Fraction, BoundaryProblem]]' = None,
                 check: bool = True) -> None:
        """Instantiates a ProblemCombination.

        Args:
            terms: Pairs (coefficient, problem); equal problems are merged.
            check: Verify regularity of every problem.

        Raises:
            SingularProblem if a problem is not regular.

        """
        merged = []
        for c, p in terms or []:
            c = to_fraction(c)
            if not isinstance(p, BoundaryProblem):
                raise ValueError(f'Invalid problem {p!r}')
            for index, (d, q) in enumerate(merged):
                if q == p:
                    merged[index] = (d + c, q)
                    break
            else:
                if check and not is_regular(p):
                    raise SingularProblem(f'{p} is not regular')
                merged.append((c, p))
        self._terms = tuple((c, p) for c, p in merged if c)

    @classmethod
    def single(cls, p: BoundaryProblem, c: 'int|Fraction' = 1
               ) -> 'ProblemCombination':
        return cls([(c, p)])

    @classmethod
    def identity(cls) -> 'ProblemCombination':
        return cls.single(BoundaryProblem.identity())

    @property
    def terms(self) -> 'tuple[tuple[Fraction, BoundaryProblem]]':
        return self._terms

    @property
    def problems(self) -> 'list[BoundaryProblem]':
        return [p for _, p in self._terms]

    def _key(self) -> tuple:
        return tuple((c, p.operator._key()) for c, p in self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProblemCombination):
            return NotImplemented
        return not (self - other)

    def __hash__(self) -> int:
        return hash(('ProblemCombination',
                     frozenset((c, hash(p)) for c, p in self._terms)))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __add__(self, other: 'ProblemCombination') -> 'ProblemCombination':
        if not isinstance(other, ProblemCombination):
            return NotImplemented
        return ProblemCombination(self._terms + other._terms, check=False)

    def __neg__(self) -> 'ProblemCombination':
        return ProblemCombination([(-c, p) for c, p in self._terms],
                                  check=False)

    def __sub__(self, other: 'ProblemCombination') -> 'ProblemCombination':
        if not isinstance(other, ProblemCombination):
            return NotImplemented
        return self + (-other)

    def scale(self, c: 'int|Fraction') -> 'ProblemCombination':
        c = to_fraction(c)
        return ProblemCombination([(c * d, p) for d, p in self._terms],
                                  check=False)

    def left_mul(self, p: BoundaryProblem) -> 'ProblemCombination':
        """The combination sum c_i * (p * p_i)."""
        return ProblemCombination([(c, bp_mul(p, q)) for c, q in self._terms],
                                  check=False)

    def right_mul(self, p: BoundaryProblem) -> 'ProblemCombination':
        """The combination sum c_i * (p_i * p)."""
        return ProblemCombination([(c, bp_mul(q, p)) for c, q in self._terms],
                                  check=False)

    def __mul__(self, other: 'ProblemCombination') -> 'ProblemCombination':
        if isinstance(other, BoundaryProblem):
            return self.right_mul(other)
        if not isinstance(other, ProblemCombination):
            return NotImplemented
        return ProblemCombination([(c * d, bp_mul(p, q))
                                   for c, p in self._terms
                                   for d, q in other._terms], check=False)

    def render(self) -> str:
        if not self._terms:
            return '0'
        text = ''
        for c, p in self._terms:
            magnitude = abs(c)
            piece = p.render() if magnitude == 1 else \
                f'{render_rational(magnitude)}*{p.render()}'
            if not text:
                text = ('-' if c < 0 else '') + piece
            else:
                text += f' {"-" if c < 0 else "+"} {piece}'
        return text

    def json(self) -> list:
        return [{'coeff': render_rational(c), 'problem': p.json()}
                for c, p in self._terms]


def ore_linear(r: ProblemCombination, s: BoundaryProblem,
               bound: int = DEFAULT_UMBRAL_BOUND
               ) -> 'tuple[BoundaryProblem, ProblemCombination]':
    """Returns (s~, r~) with s~ * r = r~ * s, coefficients unchanged.

    Cascades Ore quadruples term by term: each new left factor m
    satisfies m * (s~ r_i) = t * s and multiplies the earlier cofactors.
    """
    left = BoundaryProblem.identity()
    cofactors = []
    for _, p in r.terms:
        m, t = ore_quadruple(bp_mul(left, p), s, bound)
        cofactors = [bp_mul(m, q) for q in cofactors] + [t]
        left = bp_mul(m, left)
        _log.debug('Ore cascade step over %s: left factor %s', p, left)
    result = ProblemCombination(
        [(c, q) for (c, _), q in zip(r.terms, cofactors)], check=False)
    return left, result


class MethoriousOperator(BaseValue):
    """A left fraction den^-1 * num of the problem ring."""
    __slots__ = ('_den', '_num')

    def __init__(self, den: BoundaryProblem,
                 num: 'ProblemCombination|BoundaryProblem') -> None:
        """Instantiates a MethoriousOperator.

        Raises:
            SingularProblem if the denominator is not regular.

        """
        if not isinstance(den, BoundaryProblem):
            raise ValueError('Denominator must be a BoundaryProblem')
        if not is_regular(den):
            raise SingularProblem(f'Denominator {den} is not regular')
        if isinstance(num, BoundaryProblem):
            num = ProblemCombination.single(num)
        if not isinstance(num, ProblemCombination):
            raise ValueError('Numerator must be a ProblemCombination')
        self._den = den
        self._num = num

    @classmethod
    def from_problem(cls, p: BoundaryProblem) -> 'MethoriousOperator':
        """The embedded problem (1, O)^-1 * p."""
        return cls(BoundaryProblem.identity(), p)

    @classmethod
    def from_combination(cls, r: ProblemCombination) -> 'MethoriousOperator':
        return cls(BoundaryProblem.identity(), r)

    @classmethod
    def inverse_of(cls, p: BoundaryProblem) -> 'MethoriousOperator':
        """The fraction p^-1 * (1, O)."""
        return cls(p, BoundaryProblem.identity())

    @classmethod
    def zero(cls) -> 'MethoriousOperator':
        return cls(BoundaryProblem.identity(), ProblemCombination())

    @property
    def den(self) -> BoundaryProblem:
        return self._den

    @property
    def num(self) -> ProblemCombination:
        return self._num

    def _key(self) -> tuple:
        return (self._den._key(), self._num._key())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MethoriousOperator):
            return NotImplemented
        return self._den == other._den and self._num == other._num

    def __hash__(self) -> int:
        return hash(('MethoriousOperator', self._den._key()))

    def __neg__(self) -> 'MethoriousOperator':
        return MethoriousOperator(self._den, -self._num)

    def __add__(self, other: 'MethoriousOperator') -> 'MethoriousOperator':
        if not isinstance(other, MethoriousOperator):
            return NotImplemented
        return frac_add(self, other)

    def __sub__(self, other: 'MethoriousOperator') -> 'MethoriousOperator':
        if not isinstance(other, MethoriousOperator):
            return NotImplemented
        return frac_add(self, -other)

    def __mul__(self, other: 'MethoriousOperator') -> 'MethoriousOperator':
        if not isinstance(other, MethoriousOperator):
            return NotImplemented
        return frac_mul(self, other)

    def render(self) -> str:
        return f'inv{self._den.render()} * ({self._num.render()})'

    def json(self) -> dict:
        return {'den': self._den.json(), 'num': self._num.json()}


def frac_mul(a: MethoriousOperator, b: MethoriousOperator,
             bound: int = DEFAULT_UMBRAL_BOUND) -> MethoriousOperator:
    """The product of two fractions.

    Rewrites a.num * b.den^-1 as s~^-1 * r~ with s~ a.num = r~ b.den, so
    a*b = (s~ a.den)^-1 (r~ b.num).
    """
    s_tilde, r_tilde = ore_linear(a.num, b.den, bound)
    return MethoriousOperator(bp_mul(s_tilde, a.den), r_tilde * b.num)


def frac_add(a: MethoriousOperator, b: MethoriousOperator,
             bound: int = DEFAULT_UMBRAL_BOUND) -> MethoriousOperator:
    """The sum over the common left denominator q1*a.den = q2*b.den."""
    q1, q2 = ore_quadruple(a.den, b.den, bound)
    numerator = a.num.left_mul(q1) + b.num.left_mul(q2)
    return MethoriousOperator(bp_mul(q1, a.den), numerator)


def _condition_dictionary(points: 'list[Fraction]',
                          degree: int = WITNESS_INTEGRAL_DEGREE
                          ) -> 'list[StieltjesCondition]':
    dictionary = []
    for a in points:
        dictionary.append(StieltjesCondition.evaluation(a))
        dictionary.append(StieltjesCondition.evaluation(a, 1))
        if a != 0:
            for n in range(degree + 1):
                dictionary.append(StieltjesCondition.integral(
                    a, ExpPoly.monomial(n)))
    return dictionary


def _skeleton(r: ProblemCombination) -> 'tuple[list, list, int]':
    roots, points = {Fraction(0)}, {Fraction(0)}
    for p in r.problems:
        for root in sympy.roots(p.operator.char_poly()):
            roots.add(Fraction(int(root.p), int(root.q)))
        for beta in p.conditions:
            points.update(beta.points)
    max_order = max((p.order for p in r.problems), default=0)
    return sorted(roots), sorted(points), max_order


def _candidate_operators(roots: 'list[Fraction]',
                         max_order: int) -> 'list[DiffOperator]':
    result = []
    for order in range(1, max_order + 1):
        for multiset in itertools.combinations_with_replacement(roots, order):
            result.append(DiffOperator.from_roots(list(multiset)))
    return result


def kernel_witness(r: ProblemCombination,
                   search_orders: int = WITNESS_EXTRA_ORDER,
                   bound: int = DEFAULT_UMBRAL_BOUND
                   ) -> 'BoundaryProblem|None':
    """Searches a regular problem s with s*r = 0 in the problem ring.

    Candidates are tried in a fixed order: Ore cofactors shared by two
    terms, then regular problems over products of (D - root) with
    conditions from a dictionary of evaluations, derivatives and
    integrals over the points of r.

    Returns:
        The first witness found, or None.

    """
    if len(r.terms) <= 1:
        return None
    for (_, p1), (_, p2) in itertools.combinations(r.terms, 2):
        try:
            q1, q2 = ore_quadruple(p1, p2, bound)
        except ValueError as err:
            _log.debug('No quadruple for %s, %s: %s', p1, p2, err)
            continue
        if q1 == q2 and not r.left_mul(q1):
            _log.debug('Kernel witness from quadruple: %s', q1)
            return q1
    roots, points, max_order = _skeleton(r)
    dictionary = _condition_dictionary(points)
    for operator in _candidate_operators(roots, max_order + search_orders):
        for conditions in itertools.combinations(dictionary, operator.order):
            try:
                candidate = BoundaryProblem(operator, list(conditions))
            except ValueError:
                continue
            if not is_regular(candidate):
                continue
            if not r.left_mul(candidate):
                _log.debug('Kernel witness from dictionary: %s', candidate)
                return candidate
    return None


def kernel_consistency(r: ProblemCombination) -> bool:
    """Checks that sum c_i G_i has only boundary terms."""
    total = None
    for c, p in r.terms:
        term = c * greens_operator(p)
        total = term if total is None else total + term
    if total is None or total.is_boundary():
        return True
    _log.error('Green combination of %s has non-boundary terms: %s', r, total)
    return False


def right_multiple_search(p1: BoundaryProblem, p2: BoundaryProblem,
                          max_order: int = 2
                          ) -> 'list[dict]':
    """Searches right factors (S, C1), (S, C2) with p1 (S, C1) = p2 (S, C2).

    S ranges over products of (D - root) up to max_order and the Ci over
    subsets of at most ord S conditions from the condition dictionary.

    Returns:
        Each solution as a dict with the factors and their regularity.

    """
    r = ProblemCombination([(1, p1), (1, p2)], check=False)
    roots, points, _ = _skeleton(r)
    dictionary = _condition_dictionary(points)
    solutions = []
    for operator in _candidate_operators(roots, max_order):
        subsets = [list(c) for size in range(operator.order + 1)
                   for c in itertools.combinations(dictionary, size)]
        factors = []
        for subset in subsets:
            try:
                factors.append(BoundaryProblem(operator, subset))
            except ValueError:
                continue
        lefts = [(f, bp_mul(p1, f)) for f in factors]
        rights = [(f, bp_mul(p2, f)) for f in factors]
        for c1, product1 in lefts:
            for c2, product2 in rights:
                if product1 == product2:
                    solutions.append({
                        'S': operator,
                        'C1': c1,
                        'C2': c2,
                        'regular': (is_regular(c1), is_regular(c2)),
                    })
    return solutions


def frac_eq(a: MethoriousOperator, b: MethoriousOperator,
            oracle=None, bound: int = DEFAULT_UMBRAL_BOUND) -> Verdict:
    """Three-valued equality of fractions.

    Equal when the difference has a zero numerator or a kernel witness.
    Otherwise the optional oracle decides on the difference a - b; it
    returns NOT_EQUAL when the difference acts nontrivially.

    Args:
        a: First fraction.
        b: Second fraction.
        oracle: Callable taking a MethoriousOperator, returning a Verdict.

    """
    if a.den == b.den and a.num == b.num:
        return Verdict.EQUAL
    difference = frac_add(a, -b, bound)
    if not difference.num:
        return Verdict.EQUAL
    if kernel_witness(difference.num, bound=bound) is not None:
        return Verdict.EQUAL
    if oracle is not None:
        verdict = oracle(difference)
        if verdict == Verdict.NOT_EQUAL:
            return verdict
    return Verdict.UNKNOWN
