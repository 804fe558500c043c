import logging

import pytest

from pymethcalc.methorious import (BoundaryProblem, DiffOperator,
                                   MethoriousOperator, ProblemCombination,
                                   SingularProblem, StieltjesCondition,
                                   Verdict, bp_mul, frac_add, frac_eq,
                                   frac_mul, kernel_witness, ore_quadruple)
from pymethcalc.methorious.ore import (common_left_multiple,
                                       kernel_consistency, ore_linear,
                                       right_multiple_search)
from pymethcalc.methorious.problems import is_regular

logging.basicConfig()
logger = logging.getLogger()

E0 = StieltjesCondition.evaluation(0)
E1 = StieltjesCondition.evaluation(1)
I01 = StieltjesCondition.integral(1)


@pytest.fixture
def problem():
    """Returns a builder of boundary problems from characteristic roots."""
    def _problem(roots: list, conditions: list) -> BoundaryProblem:
        return BoundaryProblem(DiffOperator.from_roots(roots), conditions)
    return _problem


@pytest.fixture
def combination():
    """Returns a builder of problem combinations from (coeff, problem)."""
    def _combination(*terms) -> ProblemCombination:
        return ProblemCombination(list(terms))
    return _combination


def test_common_left_multiple():
    d = DiffOperator.power(1)
    assert common_left_multiple(d, d) == (d, DiffOperator.identity(),
                                          DiffOperator.identity())
    t, c1, c2 = common_left_multiple(d, DiffOperator.from_roots([1]))
    assert t == DiffOperator.from_roots([0, 1])
    assert c1 == DiffOperator.from_roots([1])
    assert c2 == d
    t, c1, c2 = common_left_multiple(DiffOperator.from_roots([1]),
                                     DiffOperator.from_roots([1, -1]))
    assert t == DiffOperator.from_roots([1, -1])
    assert c1 == DiffOperator.from_roots([-1])
    assert c2 == DiffOperator.identity()


def test_ore_quadruple(problem):
    p1, p2 = problem([0], [E0]), problem([0], [E1])
    q1, q2 = ore_quadruple(p1, p2)
    assert q1 == problem([0], [I01])
    assert q2 == problem([0], [I01])
    assert bp_mul(q1, p1) == bp_mul(q2, p2) == problem([0, 0], [E0, E1])
    identity = BoundaryProblem.identity()
    assert ore_quadruple(p1, p1) == (identity, identity)
    assert ore_quadruple(identity, p1) == (p1, identity)


def test_ore_quadruple_distinct_operators(problem):
    p1, p2 = problem([0], [E0]), problem([1], [E0])
    q1, q2 = ore_quadruple(p1, p2)
    assert q1 == problem([1], [E0])
    assert q2 == problem([0], [E0])
    common = bp_mul(q1, p1)
    assert common == bp_mul(q2, p2)
    assert common == problem([0, 1], [E0, StieltjesCondition.evaluation(0, 1)])
    assert is_regular(q1) and is_regular(q2)


def test_ore_quadruple_singular(problem):
    with pytest.raises(SingularProblem):
        ore_quadruple(problem([0], [E1 - E0]), problem([0], [E0]))


def test_ore_linear(problem, combination):
    s = problem([0], [E1])
    s_tilde, r_tilde = ore_linear(combination((1, problem([0], [E0]))), s)
    assert s_tilde == problem([0], [I01])
    assert r_tilde == combination((1, problem([0], [I01])))
    r = combination((1, problem([0], [E0])), (-1, problem([0], [E1])))
    s_tilde, r_tilde = ore_linear(r, problem([0], [E0]))
    assert s_tilde == problem([0], [I01])
    assert not r_tilde


def test_combination_algebra(problem, combination):
    p = problem([0], [E0])
    r = combination((1, p), (2, p))
    assert r == combination((3, p))
    assert not (r - r)
    assert r.render() == '3*(D, [E[0]])'
    assert combination((1, p), (-1, problem([0], [E1]))).render() == \
        '(D, [E[0]]) - (D, [E[1]])'
    with pytest.raises(SingularProblem):
        combination((1, problem([0], [E1 - E0])))


def test_combination_hash(problem, combination):
    p, q = problem([0], [E0]), problem([1], [E0])
    assert hash(combination((1, p), (2, q))) == \
        hash(combination((2, q), (1, p)))
    assert hash(combination((1, p))) != hash(combination((2, p)))
    assert hash(combination((1, p))) != hash(combination((1, q)))
    assert len({combination((c, p)) for c in range(1, 6)}) == 5


def test_frac_add(problem):
    a = MethoriousOperator.inverse_of(problem([0], [E0]))
    b = MethoriousOperator.inverse_of(problem([0], [E1]))
    total = frac_add(a, b)
    assert total.den == problem([0, 0], [E0, E1])
    assert total.num == ProblemCombination([(2, problem([0], [I01]))])
    assert (a + b) == total


def test_frac_mul(problem):
    a = MethoriousOperator.inverse_of(problem([0], [E0]))
    b = MethoriousOperator.inverse_of(problem([0], [E1]))
    product = frac_mul(a, b)
    assert product.den == problem(
        [0, 0], [E0, StieltjesCondition.evaluation(1, 1)])
    assert product.num == ProblemCombination.identity()
    unit = MethoriousOperator.from_problem(BoundaryProblem.identity())
    assert frac_mul(unit, a) == a
    with pytest.raises(SingularProblem):
        MethoriousOperator.inverse_of(problem([0], [E1 - E0]))


def test_kernel_witness(problem, combination):
    r = combination((1, problem([0], [E0])), (-1, problem([0], [E1])))
    witness = kernel_witness(r)
    assert witness == problem([0], [I01])
    assert witness.render() == '(D, [I[0,1]])'
    assert not r.left_mul(witness)
    scaled = combination((2, problem([0], [E0])), (-2, problem([0], [E1])))
    assert kernel_witness(scaled) == witness
    assert kernel_witness(ProblemCombination.identity()) is None
    assert kernel_consistency(r)


def test_right_multiple_search(problem):
    solutions = right_multiple_search(problem([0], [E0]), problem([0], [E1]))
    assert solutions
    for solution in solutions:
        assert not all(solution['regular'])
        assert bp_mul(problem([0], [E0]), solution['C1']) == \
            bp_mul(problem([0], [E1]), solution['C2'])


def test_frac_eq(problem):
    a = MethoriousOperator.from_problem(problem([0], [E0]))
    b = MethoriousOperator.from_problem(problem([0], [E1]))
    assert frac_eq(a, a) == Verdict.EQUAL
    assert frac_eq(a, b) == Verdict.EQUAL
    c = MethoriousOperator.from_problem(problem([0, 0], [E0, E1]))
    assert frac_eq(a, c) == Verdict.UNKNOWN
    assert frac_eq(a, c, oracle=lambda _: Verdict.NOT_EQUAL) == \
        Verdict.NOT_EQUAL
