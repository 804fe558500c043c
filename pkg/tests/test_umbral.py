import logging
import math
import random
from fractions import Fraction

import pytest

from pymethcalc.methorious import (BoundaryProblem, DiffOperator,
                                   DuplicatePoints, ExpPoly,
                                   StieltjesCondition, UmbralSearchExceeded,
                                   ZeroCondition, block_vandermonde_det,
                                   is_regular, minimal_monomial, regularize,
                                   umbral_coefficients)
from pymethcalc.methorious.algebra import superfactorial
from pymethcalc.methorious.problems import is_subproblem
from pymethcalc.methorious.sampling import (random_exppoly, random_rational,
                                            random_singular_problem)
from pymethcalc.methorious.umbral import (embed_single,
                                          global_not_local_witness,
                                          int_part_pol_check, local_bound,
                                          shift_route, vandermonde)

logging.basicConfig()
logger = logging.getLogger()

E0 = StieltjesCondition.evaluation(0)
E1 = StieltjesCondition.evaluation(1)
I01 = StieltjesCondition.integral(1)


@pytest.fixture
def local_condition():
    """Returns a builder of random local conditions over distinct points."""
    def _local_condition(rng: random.Random, points: 'list[Fraction]',
                         max_order: int) -> StieltjesCondition:
        while True:
            beta = StieltjesCondition()
            for a in points:
                for i in range(max_order + 1):
                    if rng.random() < 0.5:
                        beta = beta + StieltjesCondition.evaluation(
                            a, i, random_rational(rng))
            if beta:
                return beta
    return _local_condition


def test_umbral_coefficients():
    assert list(umbral_coefficients(E0, 3)) == [1, 0, 0, 0]
    expansion = umbral_coefficients(E1 - E0, 2)
    assert list(expansion) == [0, 1, Fraction(1, 2)]
    assert expansion.json()['coefficients'] == ['0', '1', '1/2']
    with pytest.raises(ValueError):
        umbral_coefficients(E0, -1)


def test_umbral_routes_agree():
    rng = random.Random(2)
    for _ in range(10):
        a = rng.choice([Fraction(1, 2), Fraction(1), Fraction(2)])
        f = random_exppoly(rng, degree=2, frequency=1)
        beta = StieltjesCondition.integral(a, f) + E1 * random_rational(rng)
        expansion = umbral_coefficients(beta, 10)
        shifted = shift_route(beta, 10)
        assert len(expansion) == len(shifted) == 11
        for k, (b, c) in enumerate(zip(expansion, shifted)):
            monomial = ExpPoly.monomial(k, 0, Fraction(1, math.factorial(k)))
            assert b == c == beta(monomial)


def test_minimal_monomial():
    assert minimal_monomial(E1 - E0) == 1
    assert minimal_monomial(E0) == 0
    assert minimal_monomial(StieltjesCondition.evaluation(0, 2)) == 2
    assert minimal_monomial(I01) == 0
    with pytest.raises(ZeroCondition):
        minimal_monomial(StieltjesCondition())
    with pytest.raises(UmbralSearchExceeded):
        minimal_monomial(StieltjesCondition.evaluation(0, 3), bound=2)


def test_local_conditions_are_umbral(local_condition):
    rng = random.Random(4)
    points = [Fraction(0), Fraction(1, 2), Fraction(1)]
    for _ in range(20):
        beta = local_condition(rng, points[:rng.randint(1, 3)],
                               rng.randint(0, 2))
        assert minimal_monomial(beta, local_bound(beta)) <= local_bound(beta)
    with pytest.raises(ValueError):
        local_bound(I01)


def test_embed_single():
    d2 = DiffOperator.power(2)
    assert embed_single(E1 - E0) == BoundaryProblem(d2, [E0, E1])
    assert embed_single(E0) == BoundaryProblem(DiffOperator.power(1), [E0])
    assert embed_single(I01) == BoundaryProblem(DiffOperator.power(1), [I01])


def test_regularize():
    d1, d2 = DiffOperator.power(1), DiffOperator.power(2)
    assert regularize(BoundaryProblem(d1, [E0, E1])) == \
        BoundaryProblem(d2, [E0, E1])
    regular = BoundaryProblem(d2, [E0, E1])
    assert regularize(regular) == regular
    over = BoundaryProblem(d2, [E0, E1, StieltjesCondition.evaluation(0, 1)])
    result = regularize(over)
    assert is_regular(result)
    assert result.order == 3
    assert is_subproblem(over, result)
    with pytest.raises(ValueError):
        regularize(BoundaryProblem(DiffOperator.identity(), [E0]))


def test_regularize_singular():
    p = BoundaryProblem(DiffOperator.from_roots([1, 0]), [E1 - E0])
    result = regularize(p)
    assert is_regular(result)
    assert is_subproblem(p, result)


def test_regularize_random_singular():
    for seed in range(10):
        p = random_singular_problem(random.Random(seed))
        assert not is_regular(p)
        result = regularize(p)
        logger.debug('%s -> %s', p, result)
        assert is_regular(result)
        assert is_subproblem(p, result)


def test_integration_by_parts_expansion():
    rng = random.Random(6)
    for n in range(6):
        assert int_part_pol_check(random_exppoly(rng), n)
    assert int_part_pol_check(1, 1)
    assert int_part_pol_check(ExpPoly.exp(1), 2)
    with pytest.raises(ValueError):
        int_part_pol_check(1, -1)


def test_block_vandermonde():
    assert block_vandermonde_det([0, 1], 2) == Fraction(1, 12)
    assert block_vandermonde_det([5], 3) == 1
    assert block_vandermonde_det([2, 7], 1) == 5
    points = [Fraction(0), Fraction(1, 2), Fraction(2)]
    for r in range(1, 4):
        for s in range(1, 4):
            expected = (vandermonde(points[:r]) ** (s * s) *
                        Fraction(superfactorial(s - 1) ** r,
                                 superfactorial(r * s - 1)))
            assert block_vandermonde_det(points[:r], s) == expected
    with pytest.raises(DuplicatePoints):
        block_vandermonde_det([1, 1], 2)


def test_global_not_local():
    assert global_not_local_witness(1, ExpPoly.constant(1), 1) == 2
    rng = random.Random(8)
    for _ in range(5):
        f = random_exppoly(rng, degree=2, frequency=1)
        witness = global_not_local_witness(1, f, 2, bound=20)
        if witness is None:
            logger.warning('No witness for E[1]*A*(%s) up to 20', f)
        else:
            assert witness > 2
