import logging
import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest

from pymethcalc.methorious import (BoundaryProblem, DependentConditions,
                                   DiffOperator, ExpPoly, FactorMismatch,
                                   IntDiffOperator, SingularProblem,
                                   StieltjesCondition, UnsupportedOperator,
                                   bp_mul, divide_left,
                                   fundamental_right_inverse,
                                   fundamental_system, greens_operator,
                                   is_regular, is_well_posed, parse_op,
                                   projector)
from pymethcalc.methorious.problems import (evaluation_matrix,
                                            exact_right_quotient,
                                            greens_of_product, is_subproblem,
                                            lift_factorization,
                                            product_evaluation_blocks,
                                            product_projector)
from pymethcalc.methorious.sampling import random_exppoly, random_problem

logging.basicConfig()
logger = logging.getLogger()

X = ExpPoly.x()
E0 = StieltjesCondition.evaluation(0)
E1 = StieltjesCondition.evaluation(1)
I01 = StieltjesCondition.integral(1)


@pytest.fixture
def problem():
    """Returns a builder of boundary problems from characteristic roots."""
    def _problem(roots: 'list[int|Fraction]',
                 conditions: 'list[StieltjesCondition]') -> BoundaryProblem:
        return BoundaryProblem(DiffOperator.from_roots(roots), conditions)
    return _problem


@pytest.fixture
def second_order(problem):
    return problem([0, 0], [E0, E1])


@pytest.fixture
def ill_posed(problem):
    return problem([1], [StieltjesCondition.evaluation(0, 2)])


def test_diff_operator():
    t = DiffOperator.from_roots([1, 2])
    assert t.coefficients == (ExpPoly.constant(2), ExpPoly.constant(-3))
    assert t.render() == 'D^2 - 3*D + 2'
    assert t.order == 2
    assert DiffOperator.power(2) == DiffOperator.from_roots([0, 0])
    assert DiffOperator.identity().render() == '1'
    assert DiffOperator.from_operator(IntDiffOperator.diff(1) - 1) == \
        DiffOperator.from_roots([1])
    with pytest.raises(ValueError):
        DiffOperator.from_operator(IntDiffOperator.diff(1) * 2)
    with pytest.raises(ValueError):
        DiffOperator.from_operator(IntDiffOperator.integral())
    with pytest.raises(ValueError):
        DiffOperator([], unknown=True)


def test_operator_division():
    t = DiffOperator.from_roots([1, 2])
    assert exact_right_quotient(t, DiffOperator.from_roots([2])) == \
        DiffOperator.from_roots([1])
    with pytest.raises(FactorMismatch):
        exact_right_quotient(DiffOperator.power(2), DiffOperator.from_roots([1]))
    quotient, remainder = DiffOperator.power(2).right_divide(
        DiffOperator.from_roots([1]))
    assert quotient * (IntDiffOperator.diff(1) - 1) + remainder == \
        IntDiffOperator.diff(2)


def test_fundamental_system():
    assert fundamental_system(DiffOperator.power(2)).functions == \
        (ExpPoly.constant(1), X)
    assert fundamental_system(DiffOperator.from_roots([1])).functions == \
        (ExpPoly.exp(1),)
    fs = fundamental_system(DiffOperator.from_roots([1, 2]))
    assert fs.functions == (ExpPoly.exp(1), ExpPoly.exp(2))
    assert fs.wronskian == ExpPoly.exp(3)
    with pytest.raises(UnsupportedOperator):
        fundamental_system(DiffOperator([ExpPoly.constant(1), ExpPoly()]))
    with pytest.raises(UnsupportedOperator):
        fundamental_system(DiffOperator([X]))


def test_user_fundamental_system(second_order):
    t = DiffOperator([ExpPoly(), ExpPoly()], fundamental_system=[X + 1, X])
    p = BoundaryProblem(t, [E0, E1])
    assert greens_operator(p) == greens_operator(second_order)
    wrong = DiffOperator([ExpPoly()], fundamental_system=[X])
    with pytest.raises(UnsupportedOperator):
        fundamental_system(wrong)


def test_product_fundamental_system():
    t = DiffOperator([ExpPoly(), ExpPoly()], fundamental_system=[X + 1, X])
    product = t.compose(DiffOperator.power(1))
    assert product == DiffOperator.power(3)
    functions = fundamental_system(product).functions
    assert len(functions) == 3
    assert all(not product.apply(u) for u in functions)
    assert ExpPoly.constant(1) in functions


def test_fundamental_right_inverse():
    assert fundamental_right_inverse(DiffOperator.power(1)) == \
        IntDiffOperator.integral()
    assert fundamental_right_inverse(DiffOperator.power(2)) == \
        parse_op('x*A - A*x')
    assert fundamental_right_inverse(DiffOperator.from_roots([1])) == \
        parse_op('exp(x)*A*exp(-x)')


def test_evaluation_matrix(problem, second_order):
    assert evaluation_matrix(second_order) == [[1, 0], [1, 1]]
    initial = BoundaryProblem.initial_value(DiffOperator.power(3))
    assert evaluation_matrix(initial) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert evaluation_matrix(problem([0, 0], [E1 - E0])) == [[0, 1]]


def test_regularity(problem, second_order, ill_posed):
    assert is_regular(second_order)
    assert not is_regular(problem([0], [E1 - E0]))
    assert is_regular(ill_posed)
    assert is_well_posed(second_order)
    assert not is_well_posed(ill_posed)
    assert not is_well_posed(problem(
        [0, 0], [StieltjesCondition.evaluation(0, 2) + E0, E1]))
    with pytest.raises(DependentConditions):
        problem([0, 0], [E0, E0])


def test_projector(second_order):
    p = projector(second_order)
    assert p.apply(X * X) == X
    u = ExpPoly.exp(1)
    expected = (1 - X) + X * u.evaluate(1)
    assert p.apply(u) == expected


def test_greens_second_order(second_order):
    g = greens_operator(second_order)
    assert g.render() == 'x*A - A*x - x*E[1]*A + x*E[1]*A*x'
    assert g.apply(1) == X * X * Fraction(1, 2) - X * Fraction(1, 2)
    assert IntDiffOperator.diff(2) * g == IntDiffOperator.identity()
    for beta in second_order.conditions:
        assert not beta * g


def test_greens_ill_posed(ill_posed):
    g = greens_operator(ill_posed)
    assert g == parse_op('exp(x)*A*exp(-x) - exp(x)*E[0] - exp(x)*E[0]*D')
    assert (IntDiffOperator.diff(1) - 1) * g == IntDiffOperator.identity()


def test_singular_greens(problem):
    with pytest.raises(SingularProblem):
        greens_operator(problem([0], [E1 - E0]))
    with pytest.raises(SingularProblem):
        projector(problem([0, 0], [E0]))


def test_product(problem, second_order):
    assert bp_mul(problem([0], [I01]), problem([0], [E0])) == second_order
    identity = BoundaryProblem.identity()
    assert bp_mul(identity, second_order) == second_order
    assert bp_mul(second_order, identity) == second_order
    degenerate = bp_mul(problem([0], [I01]), problem([0], [E1 - E0]))
    assert degenerate == problem([0, 0], [E1 - E0])
    assert degenerate.dimension == 1
    assert not is_regular(degenerate)


def test_problem_equality(problem, second_order):
    assert problem([0, 0], [E0, E1 - E0]) == second_order
    assert problem([0, 0], [E1, E0]) == second_order
    assert problem([0, 1], [E0, E1]) != second_order
    assert second_order.render() == '(D^2, [E[0], E[1]])'
    assert BoundaryProblem.identity().render() == '(1, [])'


def test_anti_isomorphism():
    rng = random.Random(11)
    for _ in range(5):
        p1, p2 = random_problem(rng), random_problem(rng)
        product = bp_mul(p1, p2)
        assert is_regular(product)
        assert greens_of_product(p1, p2) == greens_operator(product)
        assert product_projector(p1, p2) == projector(product)
        blocks = product_evaluation_blocks(p1, p2)
        assert all(not v for row in blocks['upper_right'] for v in row)


def test_greens_is_right_inverse():
    rng = random.Random(5)
    for _ in range(10):
        p = random_problem(rng, max_order=3)
        g = greens_operator(p)
        f = random_exppoly(rng, degree=2, frequency=2)
        u = g.apply(f)
        assert p.operator.apply(u) == f
        assert all(not beta(u) for beta in p.conditions)


def test_divide_left(problem, second_order):
    left = divide_left(DiffOperator.power(1), problem([0], [E0]), second_order)
    assert left == problem([0], [I01])
    identity = divide_left(DiffOperator.identity(), second_order, second_order)
    assert identity.is_identity()
    p = problem([1, 0], [E0, E1])
    right = problem([0], [E0])
    left = divide_left(DiffOperator.from_roots([1]), right, p)
    assert bp_mul(left, right) == p
    with pytest.raises(FactorMismatch):
        divide_left(DiffOperator.from_roots([1]), right, second_order)


def test_lift_factorization(problem, second_order):
    d = DiffOperator.power(1)
    p1, p2 = lift_factorization(second_order, d, d)
    assert p1 == problem([0], [I01])
    assert p2 == problem([0], [E0])
    p1, p2 = lift_factorization(second_order, DiffOperator.identity(),
                                second_order.operator)
    assert p1.is_identity()
    assert p2 == second_order
    p = problem([1, 0], [E0, E1])
    p1, p2 = lift_factorization(p, DiffOperator.from_roots([1]), d)
    assert p2 == problem([0], [E0])
    assert bp_mul(p1, p2) == p


def test_subproblem(problem, second_order):
    assert is_subproblem(problem([0], [E0]), second_order)
    assert not is_subproblem(problem([1], [E0]), second_order)
    assert not is_subproblem(problem([0], [StieltjesCondition.evaluation(0, 1)]),
                             second_order)


def test_shared_operator_cache():
    t = DiffOperator.from_roots([1, 0, 2])
    with ThreadPoolExecutor(max_workers=8) as pool:
        systems = list(pool.map(fundamental_system, [t] * 16))
        inverses = list(pool.map(fundamental_right_inverse, [t] * 16))
    assert all(fs is systems[0] for fs in systems)
    assert all(inv is inverses[0] for inv in inverses)
    assert fundamental_system(t) is systems[0]
