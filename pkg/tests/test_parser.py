import logging
import os
from fractions import Fraction

import pytest

from pymethcalc.methorious import (BoundaryProblem, DiffOperator, ExpPoly,
                                   IntDiffOperator, MethoriousOperator,
                                   ParseError, ProblemCombination,
                                   ProblemSpec, Scalar,
                                   StieltjesCondition, greens_operator,
                                   parse_combination, parse_condition,
                                   parse_expr, parse_fraction, parse_op,
                                   parse_problem)
from pymethcalc.methorious.parser import (parse_diff_operator,
                                          parse_problem_text, parse_scalar)

logging.basicConfig()
logger = logging.getLogger()

EXPORT_DIR = os.getenv('EXPORT_DIR', 'tests/examples')

X = ExpPoly.x()
E0 = StieltjesCondition.evaluation(0)
E1 = StieltjesCondition.evaluation(1)
I01 = StieltjesCondition.integral(1)


@pytest.fixture
def example_path():
    """Returns a builder of paths into the example directory."""
    def _example_path(filename: str) -> str:
        return os.path.join(os.getcwd(), EXPORT_DIR, filename)
    return _example_path


@pytest.fixture
def second_order():
    return BoundaryProblem(DiffOperator.power(2), [E0, E1])


def test_parse_expr():
    f = parse_expr('x^2/2 - x/2')
    assert f == X * X * Fraction(1, 2) - X * Fraction(1, 2)
    assert f.render() == 'x^2/2 - x/2'
    assert parse_expr('exp(2*x + 1)') == ExpPoly.exp(2) * Scalar.exp(1)
    assert parse_expr('-x*exp(-x)') == X * ExpPoly.exp(-1) * -1
    with pytest.raises(ParseError):
        parse_expr('D')
    with pytest.raises(ParseError):
        parse_expr('exp(x^2)')


def test_parse_scalar():
    assert parse_scalar('exp(1) - 1') == Scalar.exp(1) - 1
    assert parse_scalar('3/4') == Fraction(3, 4)
    with pytest.raises(ParseError):
        parse_scalar('x')
    with pytest.raises(ParseError):
        parse_scalar('1/0')


def test_parse_op(second_order):
    g = greens_operator(second_order)
    assert parse_op(g.render()) == g
    assert parse_op('D*A') == IntDiffOperator.identity()
    assert parse_op('I[0,1]') == parse_op('E[1]*A')
    assert parse_op('D^3') == parse_op('D*D*D')
    with pytest.raises(ParseError):
        parse_op('D^-1')
    with pytest.raises(ParseError):
        parse_op('D^x')


def test_parse_condition():
    beta = parse_condition('E[0]*D - 2*I[0,1]*x')
    assert beta == StieltjesCondition.evaluation(0, 1) - \
        StieltjesCondition.integral(1, X) * 2
    assert parse_condition('E[1/2]') == \
        StieltjesCondition.evaluation(Fraction(1, 2))
    assert parse_condition('E[-1]*D^2') == StieltjesCondition.evaluation(-1, 2)
    with pytest.raises(ParseError):
        parse_condition('D')
    with pytest.raises(ParseError):
        parse_condition('x*E[0]')


def test_parse_diff_operator():
    assert parse_diff_operator('D^2 - 3*D + 2') == \
        DiffOperator.from_roots([1, 2])
    with pytest.raises(ParseError):
        parse_diff_operator('2*D')
    with pytest.raises(ParseError):
        parse_diff_operator('A')


def test_parse_problem_text(second_order):
    assert parse_problem_text('(D^2, [E[0], E[1]])') == second_order
    assert parse_problem_text(second_order.render()) == second_order
    assert parse_problem_text('(1, [])').is_identity()
    with pytest.raises(ParseError):
        parse_problem_text('(D, [E[0], E[0]])')
    with pytest.raises(ParseError):
        parse_problem_text('(A, [E[0]])')
    with pytest.raises(ParseError):
        parse_problem_text('(D, [x])')


def test_parse_combination():
    p0 = BoundaryProblem(DiffOperator.power(1), [E0])
    p1 = BoundaryProblem(DiffOperator.power(1), [E1])
    assert parse_combination('(D, [E[0]]) - (D, [E[1]])') == \
        ProblemCombination([(1, p0), (-1, p1)])
    assert parse_combination('2*(D, [E[0]])') == ProblemCombination([(2, p0)])
    assert parse_combination('(D, [I[0,1]])*(D, [E[0]])') == \
        ProblemCombination.single(BoundaryProblem(DiffOperator.power(2),
                                                  [E0, E1]))
    with pytest.raises(ParseError):
        parse_combination('x')


def test_parse_fraction():
    p0 = BoundaryProblem(DiffOperator.power(1), [E0])
    p1 = BoundaryProblem(DiffOperator.power(1), [E1])
    frac = parse_fraction('inv(D, [E[0]]) * ((D, [E[1]]))')
    assert frac == MethoriousOperator(p0, p1)
    product = parse_fraction('inv(D, [E[0]]) * inv(D, [E[1]])')
    assert product.den == BoundaryProblem(
        DiffOperator.power(2), [E0, StieltjesCondition.evaluation(1, 1)])
    assert parse_fraction('(D, [E[0]])') == MethoriousOperator.from_problem(p0)
    with pytest.raises(ParseError):
        parse_fraction('inv(x)')


def test_parse_errors():
    with pytest.raises(ParseError) as exc:
        parse_op('x +')
    assert (exc.value.line, exc.value.column) == (1, 4)
    assert 'name' in exc.value.expected
    with pytest.raises(ParseError) as exc:
        parse_op('x +\n ]')
    assert (exc.value.line, exc.value.column) == (2, 2)
    with pytest.raises(ParseError) as exc:
        parse_op('x $')
    assert exc.value.column == 3
    with pytest.raises(ParseError) as exc:
        parse_op('foo')
    assert 'exp' in exc.value.expected
    with pytest.raises(ParseError):
        parse_op('')


def test_problem_spec_dict(second_order):
    spec = {'T': 'D^2', 'conditions': ['E[0]', 'E[1]']}
    assert parse_problem(spec) == second_order
    user = dict(spec, fundamental_system=['1 + x', 'x'])
    p = parse_problem(user)
    assert p == second_order
    assert greens_operator(p) == greens_operator(second_order)
    with pytest.raises(ParseError):
        parse_problem({'conditions': []})
    with pytest.raises(ParseError):
        parse_problem({'T': 'D', 'bogus': 1})
    with pytest.raises(ParseError) as exc:
        parse_problem({'T': 'D^2', 'conditions': ['E[0]', 'E[']})
    assert 'conditions' in str(exc.value)


def test_problem_spec_json(example_path, second_order):
    spec = ProblemSpec.from_json(example_path('second_order.json'))
    assert spec.problem() == second_order
    assert spec.json() == {'T': 'D^2', 'conditions': ['E[0]', 'E[1]']}
    ill_posed = ProblemSpec.from_json(example_path('ill_posed.json')).problem()
    assert greens_operator(ill_posed) == \
        parse_op('exp(x)*A*exp(-x) - exp(x)*E[0] - exp(x)*E[0]*D')
    inline = ProblemSpec.from_json('{"T": "D", "conditions": ["I[0,1]"]}')
    assert inline.problem() == BoundaryProblem(DiffOperator.power(1), [I01])
    inhomogeneous = ProblemSpec.from_json(example_path('inhomogeneous.json'))
    assert inhomogeneous.boundary_values() == [0, 1]
    assert inhomogeneous.forcing() == ExpPoly.constant(1)
    with pytest.raises(ParseError) as exc:
        ProblemSpec.from_json('{"T": "D",\n "conditions": [}')
    assert exc.value.line == 2


def test_problem_spec_from_problem(second_order):
    spec = ProblemSpec.from_problem(second_order)
    assert parse_problem(spec) == second_order
    assert parse_problem(second_order.render()) == second_order
