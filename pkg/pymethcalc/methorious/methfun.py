"""Methorious functions: smooth functions plus ideal elements g:(T, B).

An ideal element g:(T, B) with T g = 0 records the boundary data of a
problem. The module is F + I/I0, where I0 identifies g:(q) with
G~g:(q q~) for regular q~ with Green's operator G~. Each pair (q, q q~)
inflates through one cofactor, the trailing conditions of q q~ when they
fit, and `apply_inverse` divides through the same one. Regular problems
act by

    (T, B) . f        = T f + (P f):(T, B)
    (T, B) . g:(q)    = g:((T, B) q)

and fractions act through `hyper_act`.
"""
import itertools
import logging

from .algebra.constant import Scalar
from .algebra.exppoly import ExpPoly
from .algebra.helpers import kernel_combinations, mat_vec, matrix_inverse
from .base import BaseValue
from .constants import (DEFAULT_UMBRAL_BOUND, INFLATION_EXTRA_ORDER,
                        PROBE_FUNCTIONS, Verdict)
from .exceptions import (DimensionMismatch, FactorMismatch, NotLeftDivisible,
                         SingularProblem, UnsupportedOperator)
from .operators import StieltjesCondition, cond_apply
from .ore import (MethoriousOperator, common_left_multiple, frac_eq,
                  ore_quadruple)
from .parser import parse_expr
from .problems import (BoundaryProblem, DiffOperator, bp_mul,
                       evaluation_matrix, exact_left_quotient,
                       fundamental_system, greens_operator, is_regular)

_log = logging.getLogger(__name__)


def _require_regular(p: BoundaryProblem) -> None:
    if not is_regular(p):
        raise SingularProblem(f'{p} is not regular')


def _kernel_part(p: BoundaryProblem, f: ExpPoly) -> ExpPoly:
    """P f as an explicit element of Ker T, sum u_i (M^-1 beta(f))_i."""
    fs = fundamental_system(p.operator)
    inverse = matrix_inverse(evaluation_matrix(p, fs), one=Scalar(1))
    weights = mat_vec(inverse, [cond_apply(beta, f) for beta in p.conditions])
    result = ExpPoly()
    for u, c in zip(fs.functions, weights):
        result = result + u * c
    return result


class IdealElement(BaseValue):
    """A generator coefficient * g:(T, B) with T g = 0."""
    __slots__ = ('_g', '_problem', '_coefficient')

    def __init__(self, g: ExpPoly, problem: BoundaryProblem,
                 coefficient: 'Scalar|int' = 1) -> None:
        """Instantiates an IdealElement.

        Raises:
            ValueError if T g != 0.
            SingularProblem if the problem is not regular.

        """
        g = ExpPoly.coerce(g)
        if problem.operator.apply(g):
            raise ValueError(f'{g} is not in the kernel of {problem.operator}')
        _require_regular(problem)
        self._g = g
        self._problem = problem
        self._coefficient = Scalar.coerce(coefficient)

    @property
    def g(self) -> ExpPoly:
        return self._g

    @property
    def problem(self) -> BoundaryProblem:
        return self._problem

    @property
    def coefficient(self) -> Scalar:
        return self._coefficient

    def value(self) -> ExpPoly:
        """The function with the coefficient folded in."""
        return self._g * self._coefficient

    def kernel_coordinates(self) -> 'list[Scalar]':
        """Coordinates of the value in the fundamental system of T."""
        functions = list(fundamental_system(self._problem.operator).functions)
        vectors = [u.coordinates() for u in functions]
        vectors.append(self.value().coordinates())
        for relation in kernel_combinations(vectors, one=Scalar(1)):
            last = relation[-1]
            if last:
                return [-c / last for c in relation[:-1]]
        return [Scalar(0)] * len(functions)

    def _key(self) -> tuple:
        return (self.value()._key(), self._problem._key())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IdealElement):
            return NotImplemented
        return self._problem == other._problem and self.value() == other.value()

    def __hash__(self) -> int:
        return hash(('IdealElement', self._problem._key()))

    def render(self) -> str:
        value = self.value()
        text = value.render()
        if len(value.terms) > 1:
            text = f'({text})'
        return f'{text}:{self._problem.render()}'

    def json(self) -> dict:
        obj = self._problem.json()
        return {
            'coeff': self._coefficient.render(),
            'g': self._g.render(),
            'T': obj['T'],
            'B': obj['conditions'],
        }


class MethoriousFunction(BaseValue):
    """A smooth part plus a list of ideal elements, merged by problem."""
    __slots__ = ('_smooth', '_ideal')

    def __init__(self, smooth: 'ExpPoly|int' = None,
                 ideal: 'list[IdealElement]' = None) -> None:
        self._smooth = ExpPoly.coerce(smooth) if smooth is not None else ExpPoly()
        merged = []
        for element in ideal or []:
            if not isinstance(element, IdealElement):
                raise ValueError(f'Invalid ideal element {element!r}')
            for index, (problem, value) in enumerate(merged):
                if problem == element.problem:
                    merged[index] = (problem, value + element.value())
                    break
            else:
                merged.append((element.problem, element.value()))
        self._ideal = tuple(IdealElement(value, problem)
                            for problem, value in merged if value)

    @classmethod
    def delta(cls, p: BoundaryProblem, g: 'ExpPoly|int' = 1
              ) -> 'MethoriousFunction':
        """The pure ideal element g:(p)."""
        return cls(ExpPoly(), [IdealElement(ExpPoly.coerce(g), p)])

    @property
    def smooth(self) -> ExpPoly:
        return self._smooth

    @property
    def ideal(self) -> 'tuple[IdealElement]':
        return self._ideal

    def is_zero(self) -> bool:
        """Representation-level zero test."""
        return not self._smooth and not self._ideal

    def __bool__(self) -> bool:
        return not self.is_zero()

    def _key(self) -> tuple:
        return (self._smooth._key(), tuple(e._key() for e in self._ideal))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MethoriousFunction):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self) -> int:
        return hash(('MethoriousFunction', self._smooth._key()))

    def __add__(self, other) -> 'MethoriousFunction':
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return MethoriousFunction(self._smooth + other._smooth,
                                  self._ideal + other._ideal)

    __radd__ = __add__

    def __neg__(self) -> 'MethoriousFunction':
        return self.scale(-1)

    def __sub__(self, other) -> 'MethoriousFunction':
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def scale(self, c: 'Scalar|int') -> 'MethoriousFunction':
        c = Scalar.coerce(c)
        return MethoriousFunction(
            self._smooth * c,
            [IdealElement(e.value() * c, e.problem) for e in self._ideal])

    def render(self) -> str:
        pieces = []
        if self._smooth:
            pieces.append(self._smooth.render())
        pieces.extend(e.render() for e in self._ideal)
        return ' + '.join(pieces) if pieces else '0'

    def json(self) -> dict:
        return {
            'smooth': self._smooth.render(),
            'ideal': [e.json() for e in self._ideal],
        }


def _coerce(value) -> 'MethoriousFunction|None':
    if isinstance(value, MethoriousFunction):
        return value
    try:
        return MethoriousFunction(ExpPoly.coerce(value))
    except (TypeError, ValueError):
        return None


def act(p: BoundaryProblem, m: 'MethoriousFunction|ExpPoly') -> MethoriousFunction:
    """The action of a regular problem on a methorious function.

    Raises:
        SingularProblem if p is not regular.

    """
    m = _coerce(m)
    if p.is_identity():
        return m
    _require_regular(p)
    ideal = []
    kernel = _kernel_part(p, m.smooth)
    if kernel:
        ideal.append(IdealElement(kernel, p))
    for element in m.ideal:
        ideal.append(IdealElement(element.value(), bp_mul(p, element.problem)))
    return MethoriousFunction(p.operator.apply(m.smooth), ideal)


def _right_cofactor(q: BoundaryProblem, target: BoundaryProblem
                    ) -> 'BoundaryProblem|None':
    """The regular q~ with q*q~ = target used for inflation and division.

    The trailing conditions of target are tried first, which recovers q2
    for any product bp_mul(q1, q2). Otherwise the first admissible subset
    of target's basis is taken, so each pair has exactly one cofactor.
    """
    if q == target:
        return BoundaryProblem.identity()
    try:
        t_tilde = exact_left_quotient(target.operator, q.operator)
    except (FactorMismatch, ValueError):
        return None
    conditions = list(target.conditions)
    if t_tilde.order > len(conditions):
        return None
    trailing = tuple(conditions[len(conditions) - t_tilde.order:])
    subsets = itertools.chain(
        [trailing], itertools.combinations(conditions, t_tilde.order))
    for subset in subsets:
        try:
            candidate = BoundaryProblem(t_tilde, list(subset))
        except ValueError:
            continue
        if is_regular(candidate) and bp_mul(q, candidate) == target:
            return candidate
    return None


def _inflate(element: IdealElement, target: BoundaryProblem) -> 'ExpPoly|None':
    q_tilde = _right_cofactor(element.problem, target)
    if q_tilde is None:
        return None
    if q_tilde.is_identity():
        return element.value()
    return greens_operator(q_tilde).apply(element.value())


def _inflation_targets(m: MethoriousFunction,
                       budget: int) -> 'list[BoundaryProblem]':
    problems = [e.problem for e in m.ideal]
    targets = list(problems)
    for q in problems:
        for j in range(1, budget + 1):
            targets.append(bp_mul(q, BoundaryProblem.initial_value(
                DiffOperator.power(j))))
    for q1, q2 in itertools.combinations(problems, 2):
        if q1.operator == q2.operator:
            continue
        try:
            _, c1, c2 = common_left_multiple(q1.operator, q2.operator)
        except UnsupportedOperator:
            continue
        # constant coefficients commute, so the cofactors act on the right
        targets.append(bp_mul(q1, BoundaryProblem.initial_value(c1)))
        targets.append(bp_mul(q2, BoundaryProblem.initial_value(c2)))
    unique = []
    for t in sorted(targets, key=lambda q: q.order):
        if not any(t == u for u in unique):
            unique.append(t)
    return unique


def mf_eq(a: 'MethoriousFunction|ExpPoly', b: 'MethoriousFunction|ExpPoly',
          budget: int = INFLATION_EXTRA_ORDER) -> Verdict:
    """Three-valued equality modulo I0.

    Smooth parts are compared exactly. The ideal part of the difference is
    inflated to common target problems; it is zero when the inflated
    functions cancel at some target. A nonzero total at every target ends
    UNKNOWN, as other cofactors give other representatives. Distinct
    boundary spaces over one operator without a common inflation are
    reported as not equal.
    """
    difference = _coerce(a) - _coerce(b)
    if difference.smooth:
        return Verdict.NOT_EQUAL
    if not difference.ideal:
        return Verdict.EQUAL
    found_common = False
    for target in _inflation_targets(difference, budget):
        total = ExpPoly()
        for element in difference.ideal:
            inflated = _inflate(element, target)
            if inflated is None:
                break
            total = total + inflated
        else:
            found_common = True
            _log.debug('Inflated %s to %s: %s', difference, target, total)
            if not total:
                return Verdict.EQUAL
    problems = [e.problem for e in difference.ideal]
    if (not found_common and len(problems) > 1 and
            all(q.operator == problems[0].operator for q in problems)):
        return Verdict.NOT_EQUAL
    return Verdict.UNKNOWN


def apply_inverse(p: BoundaryProblem,
                  m: 'MethoriousFunction|ExpPoly') -> MethoriousFunction:
    """The action of p^-1.

    A smooth f maps to G f. An ideal element g:(p q) maps to
    k + (g - G_q k):(q) with k = T' g, where T' is the operator of q.

    Raises:
        SingularProblem if p is not regular.
        NotLeftDivisible if an ideal element has no factorization p*q.

    """
    m = _coerce(m)
    if p.is_identity():
        return m
    _require_regular(p)
    smooth = greens_operator(p).apply(m.smooth)
    ideal = []
    for element in m.ideal:
        q = _right_cofactor(p, element.problem)
        if q is None:
            raise NotLeftDivisible(f'{p} does not left-divide {element.problem}')
        g = element.value()
        if q.is_identity():
            smooth = smooth + g
            continue
        k = q.operator.apply(g)
        smooth = smooth + k
        remainder = g - greens_operator(q).apply(k)
        if remainder:
            ideal.append(IdealElement(remainder, q))
    return MethoriousFunction(smooth, ideal)


def solve_bvp(operator: DiffOperator, conditions: 'list[StieltjesCondition]',
              f: ExpPoly, values: 'list[Scalar]') -> ExpPoly:
    """The solution of T u = f with beta_i(u) = c_i.

    Raises:
        DimensionMismatch if the value count differs from the condition count.
        SingularProblem if the problem is not regular.

    """
    if len(values) != len(conditions):
        raise DimensionMismatch(f'{len(values)} values for'
                                f' {len(conditions)} conditions')
    p = BoundaryProblem(operator, conditions)
    _require_regular(p)
    fs = fundamental_system(operator)
    inverse = matrix_inverse(evaluation_matrix(p, fs), one=Scalar(1))
    weights = mat_vec(inverse, [Scalar.coerce(c) for c in values])
    u = greens_operator(p).apply(ExpPoly.coerce(f))
    for basis_function, c in zip(fs.functions, weights):
        u = u + basis_function * c
    return u


class MethoriousHyperfunction(BaseValue):
    """A formal fraction den^-1 * value of the localized module."""
    __slots__ = ('_den', '_value')

    def __init__(self, den: BoundaryProblem, value: MethoriousFunction) -> None:
        _require_regular(den)
        self._den = den
        self._value = _coerce(value)

    @property
    def den(self) -> BoundaryProblem:
        return self._den

    @property
    def value(self) -> MethoriousFunction:
        return self._value

    def is_formal(self) -> bool:
        return not self._den.is_identity()

    def _key(self) -> tuple:
        return (self._den._key(), self._value._key())

    def render(self) -> str:
        if not self.is_formal():
            return self._value.render()
        return f'inv{self._den.render()} * ({self._value.render()})'

    def json(self) -> dict:
        return {'den': self._den.json(), 'value': self._value.json()}


def hyper_act(frac: MethoriousOperator,
              m: 'MethoriousFunction|ExpPoly') -> MethoriousHyperfunction:
    """The action of a fraction, simplified through apply_inverse if possible."""
    m = _coerce(m)
    value = MethoriousFunction()
    for c, p in frac.num.terms:
        value = value + act(p, m).scale(c)
    if frac.den.is_identity():
        return MethoriousHyperfunction(frac.den, value)
    try:
        value = apply_inverse(frac.den, value)
    except NotLeftDivisible as err:
        _log.debug('Keeping formal fraction: %s', err)
        return MethoriousHyperfunction(frac.den, value)
    return MethoriousHyperfunction(BoundaryProblem.identity(), value)


def hyper_eq(a: MethoriousHyperfunction, b: MethoriousHyperfunction,
             bound: int = DEFAULT_UMBRAL_BOUND) -> Verdict:
    """Three-valued equality in the localized module.

    Both values are brought to a common denominator q1*a.den = q2*b.den
    and compared with `mf_eq`. The module of methorious functions embeds
    into its fractions, so a NOT_EQUAL verdict carries over.
    """
    q1, q2 = ore_quadruple(a.den, b.den, bound)
    return mf_eq(act(q1, a.value), act(q2, b.value))


def probe_oracle(probes: 'list[ExpPoly]' = None):
    """Builds a frac_eq oracle acting on probe functions."""
    if probes is None:
        probes = [parse_expr(text) for text in PROBE_FUNCTIONS]

    def oracle(difference: MethoriousOperator) -> Verdict:
        zero = MethoriousHyperfunction(BoundaryProblem.identity(),
                                       MethoriousFunction())
        for f in probes:
            if hyper_eq(hyper_act(difference, f), zero) == Verdict.NOT_EQUAL:
                return Verdict.NOT_EQUAL
        return Verdict.UNKNOWN

    return oracle


def methorious_frac_eq(a: MethoriousOperator,
                       b: MethoriousOperator) -> Verdict:
    """Fraction equality with the probe-function oracle."""
    return frac_eq(a, b, oracle=probe_oracle())


class FundamentalFormula:
    """The action of (D, [beta]) on smooth f: f' + beta(f)/beta(1) * 1:(D, [beta]).

    Attributes:
        condition: The condition beta.
        problem: The problem (D, [beta]).
        weight: beta(1), nonzero.

    """
    __slots__ = ('condition', 'problem', 'weight')

    def __init__(self, condition: StieltjesCondition) -> None:
        self.condition = condition
        self.problem = BoundaryProblem(DiffOperator.power(1), [condition])
        self.weight = cond_apply(condition, ExpPoly.constant(1))
        if not self.weight:
            raise SingularProblem(f'{self.problem} is not regular')

    def apply(self, f: ExpPoly) -> MethoriousFunction:
        f = ExpPoly.coerce(f)
        element = IdealElement(ExpPoly.constant(1), self.problem,
                               cond_apply(self.condition, f) / self.weight)
        return MethoriousFunction(f.derive(), [element])

    def render(self) -> str:
        scale = '' if self.weight == 1 else f'1/({self.weight.render()})*'
        return (f'{self.problem.render()} . f = f\' + '
                f'{scale}[{self.condition.render()}](f) * 1:{self.problem.render()}')


def fundamental_formula(beta: StieltjesCondition) -> FundamentalFormula:
    """The fundamental formula of a condition with beta(1) != 0."""
    return FundamentalFormula(beta)
