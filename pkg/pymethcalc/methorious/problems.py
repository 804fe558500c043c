"""Boundary problems (T, B), their monoid product and Green's operators.

A boundary problem pairs a monic differential operator T with a finite
basis B of Stieltjes conditions. Regular problems have a unique Green's
operator G = (1 - P) T^, where T^ is the fundamental right inverse
(variation of constants) and P the projector onto Ker T along B-perp.
"""
import logging
import threading
from fractions import Fraction

import sympy

from .algebra.constant import Scalar
from .algebra.exppoly import ExpPoly
from .algebra.helpers import (EchelonBasis, bareiss_det, kernel_combinations,
                              matrix_inverse, to_fraction)
from .base import BaseValue, ConditionList
from .constants import TermKind
from .exceptions import (DivisionByZero, FactorMismatch, SingularProblem,
                         UnsupportedOperator)
from .operators import (IntDiffOperator, StieltjesCondition, cond_apply,
                        join_signed, power_text, product_text, reduce_basis,
                        same_space)

_log = logging.getLogger(__name__)

_LAMBDA = sympy.Symbol('lambda')

_CACHE_LOCK = threading.Lock()


def _sympy_rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _fraction(value: sympy.Rational) -> Fraction:
    return Fraction(int(value.p), int(value.q))


class DiffOperator(BaseValue):
    """A monic linear differential operator D^n + c_{n-1} D^{n-1} + ... + c_0.

    Attributes:
        supported_kwargs: Optional keyword arguments of the constructor.

    """
    __slots__ = ('_coefficients', '_fundamental', '_cache')

    supported_kwargs = ['fundamental_system']

    def __init__(self, coefficients: 'list[ExpPoly]' = None, **kwargs) -> None:
        """Instantiates a DiffOperator.

        Args:
            coefficients: The lower coefficients c_0 ... c_{n-1}; the leading
                coefficient 1 is implicit.

        Keyword Args:
            fundamental_system (list[ExpPoly]): A user-supplied basis of
                Ker T, required for operators outside constant coefficients.

        """
        for key in kwargs:
            if key not in self.supported_kwargs:
                raise ValueError(f'Unsupported keyword argument {key}')
        self._coefficients = tuple(ExpPoly.coerce(c) for c in coefficients or [])
        user = kwargs.get('fundamental_system')
        self._fundamental = (tuple(ExpPoly.coerce(u) for u in user)
                             if user is not None else None)
        self._cache = {}

    @classmethod
    def power(cls, n: int) -> 'DiffOperator':
        """The operator D^n."""
        return cls([ExpPoly()] * n)

    @classmethod
    def identity(cls) -> 'DiffOperator':
        return cls([])

    @classmethod
    def from_roots(cls, roots: 'list[int|Fraction]') -> 'DiffOperator':
        """The constant-coefficient operator prod (D - root)."""
        result = cls.identity()
        for root in roots:
            result = cls([ExpPoly.constant(-to_fraction(root))]).compose(result)
        return result

    @classmethod
    def from_poly(cls, poly: sympy.Poly) -> 'DiffOperator':
        """Builds the operator with a given characteristic polynomial."""
        coeffs = poly.monic().all_coeffs()
        lower = [ExpPoly.constant(_fraction(sympy.Rational(c)))
                 for c in reversed(coeffs[1:])]
        return cls(lower)

    @classmethod
    def from_operator(cls, op: IntDiffOperator, **kwargs) -> 'DiffOperator':
        """Converts a monic differential element of the operator ring.

        Raises:
            ValueError if the operator has integral or boundary terms or is
                not monic.

        """
        if not op.is_differential():
            raise ValueError(f'{op} is not a differential operator')
        entries = op.entries
        if not entries:
            raise ValueError('Zero is not a monic differential operator')
        n = max(key[1] for key in entries)
        if entries[(TermKind.DIFF, n)] != ExpPoly.constant(1):
            raise ValueError(f'{op} is not monic')
        return cls([entries.get((TermKind.DIFF, i), ExpPoly())
                    for i in range(n)], **kwargs)

    @property
    def order(self) -> int:
        return len(self._coefficients)

    @property
    def coefficients(self) -> 'tuple[ExpPoly]':
        return self._coefficients

    @property
    def user_fundamental_system(self) -> 'tuple[ExpPoly]|None':
        return self._fundamental

    def _key(self) -> tuple:
        return tuple(c._key() for c in self._coefficients)

    def to_operator(self) -> IntDiffOperator:
        entries = {(TermKind.DIFF, i): c
                   for i, c in enumerate(self._coefficients) if c}
        entries[(TermKind.DIFF, self.order)] = ExpPoly.constant(1)
        return IntDiffOperator(entries)

    def is_constant_coefficient(self) -> bool:
        return all(c.is_constant() and c.constant_value().is_rational()
                   for c in self._coefficients)

    def char_poly(self) -> sympy.Poly:
        """The characteristic polynomial of a constant-coefficient operator.

        Raises:
            UnsupportedOperator if some coefficient is not a rational constant.

        """
        if not self.is_constant_coefficient():
            raise UnsupportedOperator(f'{self} has non-constant coefficients')
        coeffs = [sympy.Integer(1)]
        for c in reversed(self._coefficients):
            coeffs.append(_sympy_rational(c.constant_value().to_fraction()
                                          if c else Fraction(0)))
        return sympy.Poly(coeffs, _LAMBDA, domain='QQ')

    def compose(self, other: 'DiffOperator') -> 'DiffOperator':
        """The product self*other, carrying user fundamental systems."""
        product = self.to_operator() * other.to_operator()
        if self._fundamental is None and other._fundamental is None:
            return DiffOperator.from_operator(product)
        right_inverse = fundamental_right_inverse(other)
        functions = [right_inverse.apply(u)
                     for u in fundamental_system(self).functions]
        functions += list(fundamental_system(other).functions)
        return DiffOperator.from_operator(product, fundamental_system=functions)

    def __mul__(self, other: 'DiffOperator') -> 'DiffOperator':
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self.compose(other)

    def apply(self, f: ExpPoly) -> ExpPoly:
        return self.to_operator().apply(f)

    def right_divide(self, divisor: 'DiffOperator'
                     ) -> 'tuple[IntDiffOperator, IntDiffOperator]':
        """Returns (Q, R) with self = Q*divisor + R and ord R < ord divisor."""
        return _divide(self.to_operator(), divisor, right=True)

    def left_divide(self, divisor: 'DiffOperator'
                    ) -> 'tuple[IntDiffOperator, IntDiffOperator]':
        """Returns (Q, R) with self = divisor*Q + R and ord R < ord divisor."""
        return _divide(self.to_operator(), divisor, right=False)

    def render(self) -> str:
        if self.order == 0:
            return '1'
        pieces = [(False, power_text('D', self.order))]
        for i in reversed(range(self.order)):
            c = self._coefficients[i]
            if c:
                pieces.append(product_text(c, power_text('D', i)))
        return join_signed(pieces)

    def latex(self) -> str:
        return self.to_operator().latex()


def _order(op: IntDiffOperator) -> int:
    return max((key[1] for key in op.entries), default=-1)


def _divide(dividend: IntDiffOperator, divisor: DiffOperator,
            right: bool) -> 'tuple[IntDiffOperator, IntDiffOperator]':
    d = divisor.to_operator()
    m = divisor.order
    quotient = IntDiffOperator()
    remainder = dividend
    while _order(remainder) >= m:
        k = _order(remainder)
        lead = remainder.entries[(TermKind.DIFF, k)]
        term = IntDiffOperator({(TermKind.DIFF, k - m): lead})
        quotient = quotient + term
        remainder = remainder - (term * d if right else d * term)
    return quotient, remainder


def exact_right_quotient(dividend: DiffOperator,
                         divisor: DiffOperator) -> DiffOperator:
    """Returns Q with dividend = Q*divisor.

    Raises:
        FactorMismatch if the division leaves a remainder.

    """
    quotient, remainder = dividend.right_divide(divisor)
    if remainder:
        raise FactorMismatch(f'{divisor} does not right-divide {dividend}')
    return DiffOperator.from_operator(quotient)


def exact_left_quotient(dividend: DiffOperator,
                        divisor: DiffOperator) -> DiffOperator:
    quotient, remainder = dividend.left_divide(divisor)
    if remainder:
        raise FactorMismatch(f'{divisor} does not left-divide {dividend}')
    return DiffOperator.from_operator(quotient)


def _laplace(rows: list, start: int, cols: tuple, memo: dict) -> ExpPoly:
    """Determinant of rows[start:] restricted to cols, by first-row expansion."""
    if start == len(rows):
        return ExpPoly.constant(1)
    key = (start, cols)
    if key in memo:
        return memo[key]
    total = ExpPoly()
    for pos, col in enumerate(cols):
        entry = rows[start][col]
        if not entry:
            continue
        minor = _laplace(rows, start + 1, cols[:pos] + cols[pos + 1:], memo)
        total = total + entry * minor if pos % 2 == 0 else total - entry * minor
    memo[key] = total
    return total


class FundamentalSystem:
    """A basis u_1 ... u_n of Ker T with its Wronskian data.

    Attributes:
        functions: The basis functions.
        wronskian: The Wronskian determinant.
        wronskian_inverse: Its inverse, an exponential c*exp(nu*x).

    """
    __slots__ = ('functions', 'matrix', 'wronskian', 'wronskian_inverse')

    def __init__(self, functions: 'list[ExpPoly]',
                 operator: 'DiffOperator|None' = None) -> None:
        """Instantiates a FundamentalSystem.

        Args:
            functions: The candidate basis.
            operator: If given, each function is checked to solve T u = 0.

        Raises:
            UnsupportedOperator if a function is not a solution, the basis
                has the wrong size or the Wronskian is not invertible.

        """
        self.functions = tuple(ExpPoly.coerce(u) for u in functions)
        if operator is not None:
            if len(self.functions) != operator.order:
                raise UnsupportedOperator(
                    f'{operator} needs {operator.order} basis functions')
            for u in self.functions:
                if operator.apply(u):
                    raise UnsupportedOperator(f'{u} does not solve {operator}')
        n = len(self.functions)
        self.matrix = [[u.derive_n(k) for u in self.functions]
                       for k in range(n)]
        self.wronskian = _laplace(self.matrix, 0, tuple(range(n)), {})
        self.wronskian_inverse = _exp_inverse(self.wronskian)

    @property
    def order(self) -> int:
        return len(self.functions)

    def cofactors(self) -> 'list[ExpPoly]':
        """Cofactors of the last Wronskian row."""
        n = self.order
        rows = self.matrix[:-1]
        memo = {}
        result = []
        for i in range(n):
            cols = tuple(c for c in range(n) if c != i)
            minor = _laplace(rows, 0, cols, memo)
            result.append(minor if (n - 1 + i) % 2 == 0 else -minor)
        return result

    def json(self) -> dict:
        return {
            'functions': [u.render() for u in self.functions],
            'wronskian': self.wronskian.render(),
        }


def _exp_inverse(w: ExpPoly) -> ExpPoly:
    if len(w.terms) != 1 or w.terms[0][0][0] != 0:
        raise UnsupportedOperator(f'Wronskian {w} is not invertible')
    (_, nu), c = w.terms[0]
    return ExpPoly.monomial(0, -nu, c.inverse())


def _memoized(operator: DiffOperator, key: str, build):
    """Reads or fills the per-operator cache under the module lock.

    The build runs outside the lock, so it may itself use the cache.
    """
    with _CACHE_LOCK:
        if key in operator._cache:
            return operator._cache[key]
    result = build()
    with _CACHE_LOCK:
        return operator._cache.setdefault(key, result)


def fundamental_system(operator: DiffOperator) -> FundamentalSystem:
    """A basis of Ker T.

    Constant-coefficient operators with rational characteristic roots get
    the basis x^k exp(r x)/k!, roots ascending; otherwise the user-supplied
    system is used.

    Raises:
        UnsupportedOperator if neither route applies.

    """
    return _memoized(operator, 'fs', lambda: _build_fundamental(operator))


def _build_fundamental(operator: DiffOperator) -> FundamentalSystem:
    if operator.user_fundamental_system is not None:
        result = FundamentalSystem(operator.user_fundamental_system, operator)
    else:
        poly = operator.char_poly()
        roots = sympy.roots(poly)
        if sum(roots.values()) != operator.order or \
                not all(r.is_Rational for r in roots):
            raise UnsupportedOperator(
                f'{operator} has no rational factorization of {poly.as_expr()}')
        functions = []
        for root in sorted(roots, key=_fraction):
            for k in range(roots[root]):
                functions.append(ExpPoly.monomial(k, _fraction(root),
                                                  Fraction(1, _factorial(k))))
        result = FundamentalSystem(functions)
    _log.debug('Fundamental system of %s: %s', operator,
               [str(u) for u in result.functions])
    return result


def _factorial(k: int) -> int:
    result = 1
    for i in range(2, k + 1):
        result *= i
    return result


def fundamental_right_inverse(operator: DiffOperator) -> IntDiffOperator:
    """The Green's operator T^ of the initial value problem at 0.

    Variation of constants: T^ = sum u_i * A * (W_i / W) with W_i the
    cofactors of the last Wronskian row.
    """
    return _memoized(operator, 'fri', lambda: _build_right_inverse(operator))


def _build_right_inverse(operator: DiffOperator) -> IntDiffOperator:
    fs = fundamental_system(operator)
    result = IntDiffOperator()
    for u, cofactor in zip(fs.functions, fs.cofactors()):
        right = cofactor * fs.wronskian_inverse
        if right:
            result = result + u * (IntDiffOperator.integral()
                                   * IntDiffOperator.multiplication(right))
    return result


class BoundaryProblem(BaseValue):
    """A pair (T, B) of a monic operator and a boundary-space basis.

    Two problems are equal when they share the operator and span the same
    boundary space.
    """
    __slots__ = ('_operator', '_conditions')

    def __init__(self, operator: DiffOperator,
                 conditions: 'list[StieltjesCondition]' = None) -> None:
        """Instantiates a BoundaryProblem.

        Raises:
            ValueError if the operator is not a DiffOperator.
            DependentConditions if the conditions are linearly dependent.

        """
        if not isinstance(operator, DiffOperator):
            raise ValueError('Operator must be a DiffOperator')
        basis = ConditionList(StieltjesCondition)
        basis.extend_independent(conditions or [])
        self._operator = operator
        self._conditions = tuple(basis)

    @classmethod
    def from_conditions(cls, operator: DiffOperator,
                        conditions: 'list[StieltjesCondition]'
                        ) -> 'BoundaryProblem':
        """Builds a problem keeping the first-occurring independent conditions."""
        return cls(operator, list(reduce_basis(conditions)))

    @classmethod
    def identity(cls) -> 'BoundaryProblem':
        """The neutral element (1, O)."""
        return cls(DiffOperator.identity(), [])

    @classmethod
    def initial_value(cls, operator: DiffOperator) -> 'BoundaryProblem':
        """The problem (T, [E[0], E[0]*D, ..., E[0]*D^(n-1)])."""
        return cls(operator, [StieltjesCondition.evaluation(0, i)
                              for i in range(operator.order)])

    @property
    def operator(self) -> DiffOperator:
        return self._operator

    @property
    def conditions(self) -> 'tuple[StieltjesCondition]':
        return self._conditions

    @property
    def order(self) -> int:
        return self._operator.order

    @property
    def dimension(self) -> int:
        return len(self._conditions)

    def is_identity(self) -> bool:
        return self.order == 0 and not self._conditions

    def _key(self) -> tuple:
        return self._operator._key()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoundaryProblem):
            return NotImplemented
        return (self._operator == other._operator and
                same_space(self._conditions, other._conditions))

    def __hash__(self) -> int:
        return hash(('BoundaryProblem', self._operator._key()))

    def __mul__(self, other: 'BoundaryProblem') -> 'BoundaryProblem':
        if not isinstance(other, BoundaryProblem):
            return NotImplemented
        return bp_mul(self, other)

    def render(self) -> str:
        conditions = ', '.join(c.render() for c in self._conditions)
        return f'({self._operator.render()}, [{conditions}])'

    def latex(self) -> str:
        conditions = ', '.join(c.latex() for c in self._conditions)
        return f'\\left({self._operator.latex()}, [{conditions}]\\right)'

    def json(self) -> dict:
        return {
            'T': self._operator.render(),
            'conditions': [c.render() for c in self._conditions],
        }


def bp_mul(p1: BoundaryProblem, p2: BoundaryProblem) -> BoundaryProblem:
    """The product (T1 T2, B1 T2 + B2)."""
    if p1.is_identity():
        return p2
    if p2.is_identity():
        return p1
    t2 = p2.operator.to_operator()
    conditions = [beta * t2 for beta in p1.conditions] + list(p2.conditions)
    return BoundaryProblem.from_conditions(p1.operator.compose(p2.operator),
                                           conditions)


def evaluation_matrix(p: BoundaryProblem,
                      fs: 'FundamentalSystem|None' = None) -> 'list[list[Scalar]]':
    """The matrix [beta_i(u_j)]."""
    fs = fs or fundamental_system(p.operator)
    return [[cond_apply(beta, u) for u in fs.functions]
            for beta in p.conditions]


def is_regular(p: BoundaryProblem) -> bool:
    """True iff ord T = dim B and the evaluation matrix is invertible."""
    if p.order != p.dimension:
        return False
    return bool(bareiss_det(evaluation_matrix(p), one=Scalar(1)))


def is_well_posed(p: BoundaryProblem) -> bool:
    """True iff p is regular with all conditions of order below ord T."""
    if not is_regular(p):
        return False
    high = EchelonBasis()
    for beta in p.conditions:
        high.add({k: c for k, c in beta.coordinates().items()
                  if k[0] == TermKind.LOCAL and k[2] >= p.order})
    return high.rank == 0


def _require_regular(p: BoundaryProblem) -> None:
    if not is_regular(p):
        raise SingularProblem(f'{p} is not regular')


def _inverse_matrix(p: BoundaryProblem) -> 'list[list[Scalar]]':
    try:
        return matrix_inverse(evaluation_matrix(p), one=Scalar(1))
    except DivisionByZero as err:
        raise SingularProblem(f'{p} is not regular') from err


def projector(p: BoundaryProblem) -> IntDiffOperator:
    """The projector P onto Ker T along the B-orthogonal.

    Raises:
        SingularProblem if p is not regular.

    """
    _require_regular(p)
    fs = fundamental_system(p.operator)
    inverse = _inverse_matrix(p)
    result = IntDiffOperator()
    for i, u in enumerate(fs.functions):
        for j, beta in enumerate(p.conditions):
            if inverse[i][j]:
                result = result + (u * inverse[i][j]) * beta.to_operator()
    return result


def greens_operator(p: BoundaryProblem) -> IntDiffOperator:
    """The Green's operator G = (1 - P) T^ of a regular problem.

    Raises:
        SingularProblem if p is not regular.

    """
    _require_regular(p)
    right_inverse = fundamental_right_inverse(p.operator)
    if not p.conditions:
        return right_inverse
    return right_inverse - projector(p) * right_inverse


def divide_left(t1: DiffOperator, p2: BoundaryProblem,
                p: BoundaryProblem) -> BoundaryProblem:
    """The unique left factor (T1, B1) of p over a regular right problem.

    B1 consists of the conditions gamma with gamma*T2 in B. It is computed
    as beta*G2 over the combinations beta of B whose image beta*P2 stays
    in B.

    Raises:
        FactorMismatch if T1*T2 differs from the operator of p.
        SingularProblem if p or p2 is not regular.

    """
    if t1.compose(p2.operator) != p.operator:
        raise FactorMismatch(f'{t1} * {p2.operator} is not {p.operator}')
    _require_regular(p)
    _require_regular(p2)
    if t1.order == 0:
        return BoundaryProblem.identity()
    g2 = greens_operator(p2)
    p2_projector = projector(p2)
    space = reduce_basis(p.conditions)
    residuals = []
    for beta in p.conditions:
        image = beta * p2_projector
        residuals.append(space.residual(image))
    one = Scalar(1)
    conditions = []
    for relation in kernel_combinations(residuals, one=one):
        beta = StieltjesCondition()
        for c, b in zip(relation, p.conditions):
            if c:
                beta = beta + b * c
        gamma = beta * g2
        if gamma:
            conditions.append(gamma.monic())
    result = BoundaryProblem.from_conditions(t1, conditions)
    _log.debug('Left factor of %s over %s: %s', p, p2, result)
    return result


def lift_factorization(p: BoundaryProblem, t1: DiffOperator,
                       t2: DiffOperator
                       ) -> 'tuple[BoundaryProblem, BoundaryProblem]':
    """Lifts T = T1 T2 to p = (T1, B1)(T2, B2) with B2 inside B if possible.

    B2 is chosen greedily in basis order among the conditions of p whose
    rows on Ker T2 are independent.

    Raises:
        FactorMismatch if T1*T2 differs from the operator of p.
        SingularProblem if p is not regular.

    """
    if t1.compose(t2) != p.operator:
        raise FactorMismatch(f'{t1} * {t2} is not {p.operator}')
    _require_regular(p)
    if t1.order == 0:
        return BoundaryProblem.identity(), p
    fs2 = fundamental_system(t2)
    rows = EchelonBasis()
    selected = []
    for beta in p.conditions:
        if len(selected) == t2.order:
            break
        row = {j: cond_apply(beta, u) for j, u in enumerate(fs2.functions)}
        if rows.add(row):
            selected.append(beta)
    if len(selected) == t2.order:
        p2 = BoundaryProblem(t2, selected)
    else:
        _log.warning('No regular right factor inside %s, using initial'
                     ' conditions', p)
        p2 = BoundaryProblem.initial_value(t2)
    return divide_left(t1, p2, p), p2


def is_subproblem(small: BoundaryProblem, big: BoundaryProblem) -> bool:
    """True iff small.T right-divides big.T and small.B lies in big.B."""
    _, remainder = big.operator.right_divide(small.operator)
    if remainder:
        return False
    space = reduce_basis(big.conditions)
    return all(space.spans(beta) for beta in small.conditions)


def product_projector(p1: BoundaryProblem,
                      p2: BoundaryProblem) -> IntDiffOperator:
    """The projector of p1*p2 assembled as P2 + G2 P1 T2."""
    t2 = p2.operator.to_operator()
    return projector(p2) + greens_operator(p2) * projector(p1) * t2


def greens_of_product(p1: BoundaryProblem,
                      p2: BoundaryProblem) -> IntDiffOperator:
    """The Green's operator of p1*p2 assembled as G2 G1."""
    return greens_operator(p2) * greens_operator(p1)


def product_evaluation_blocks(p1: BoundaryProblem, p2: BoundaryProblem
                              ) -> 'dict[str, list[list[Scalar]]]':
    """Evaluation matrix of p1*p2 in block form.

    Rows are B1 T2 then B2; columns are T2^(u) for u in Ker T1, then Ker T2.
    The upper-right block is zero.
    """
    right_inverse = fundamental_right_inverse(p2.operator)
    lifted = [right_inverse.apply(u)
              for u in fundamental_system(p1.operator).functions]
    kernel2 = list(fundamental_system(p2.operator).functions)
    t2 = p2.operator.to_operator()
    upper = [beta * t2 for beta in p1.conditions]

    def block(rows: list, cols: list) -> list:
        return [[cond_apply(beta, u) for u in cols] for beta in rows]

    return {
        'upper_left': block(upper, lifted),
        'upper_right': block(upper, kernel2),
        'lower_left': block(p2.conditions, lifted),
        'lower_right': block(p2.conditions, kernel2),
    }
