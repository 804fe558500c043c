import logging
import math
import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest
from mpmath import iv

from pymethcalc.methorious import (Character, DivisionByZero, ExpConstant,
                                   ExpPoly, PrecisionExhausted, Scalar,
                                   eval_float)
from pymethcalc.methorious.algebra import (bareiss_det, falling_factorial,
                                           matrix_inverse, superfactorial,
                                           to_fraction)
from pymethcalc.methorious.algebra.helpers import kernel_combinations
from pymethcalc.methorious.cli import axiom_failures
from pymethcalc.methorious.sampling import random_exppoly

logging.basicConfig()
logger = logging.getLogger()


@pytest.fixture
def exppoly():
    """Returns a builder of single-term exponential polynomials."""
    def _exppoly(n: int = 0, mu: 'int|Fraction' = 0,
                 c: 'int|Fraction' = 1) -> ExpPoly:
        return ExpPoly.monomial(n, mu, c)
    return _exppoly


def test_to_fraction():
    assert to_fraction('3/4') == Fraction(3, 4)
    assert to_fraction(2) == Fraction(2)
    with pytest.raises(ValueError):
        to_fraction(0.5)
    with pytest.raises(ValueError):
        to_fraction('x')
    with pytest.raises(ValueError):
        to_fraction(True)


def test_factorials():
    assert falling_factorial(5, 2) == 20
    assert falling_factorial(3, 0) == 1
    assert superfactorial(3) == 12
    assert superfactorial(0) == 1


def test_exp_constant_multiplication():
    product = ExpConstant.exp(1) * ExpConstant.exp(2)
    assert product == ExpConstant.exp(3)
    assert ExpConstant.exp(0) == ExpConstant.rational(1)
    assert ExpConstant.exp(1, 2).render() == '2*exp(1)'


def test_scalar_inverse():
    s = Scalar.exp(1) - 1
    inverse = s.inverse()
    assert inverse.render() == '1/(exp(1) - 1)'
    assert s * inverse == 1
    with pytest.raises(DivisionByZero):
        Scalar(0).inverse()
    with pytest.raises(DivisionByZero):
        Scalar(1, 0)


def test_scalar_cross_multiplication():
    a = (Scalar.exp(2) - 1) / (Scalar.exp(1) - 1)
    assert a == Scalar.exp(1) + 1
    assert hash(a) == hash(Scalar.exp(1) + 1)
    assert Scalar(Fraction(1, 2)) + Scalar(Fraction(1, 3)) == Fraction(5, 6)


def test_eval_float():
    assert abs(eval_float(Scalar.exp(1)) - 2.718281828459045) < 1e-12
    value = (Scalar.exp(1) - 1).inverse()
    assert abs(eval_float(value) - 0.5819767068693265) < 1e-12
    assert eval_float(Fraction(1, 4)) == 0.25


def test_eval_float_exhausted():
    prec = iv.prec
    with pytest.raises(PrecisionExhausted):
        eval_float(Fraction(1, 3), tol=0)
    assert iv.prec == prec


def test_eval_float_threads():
    prec = iv.prec
    values = [Scalar.exp(Fraction(k, 4)) for k in range(12)]
    with ThreadPoolExecutor(max_workers=6) as pool:
        results = list(pool.map(eval_float, values))
    for k, result in enumerate(results):
        assert abs(result - math.exp(k / 4)) < 1e-12
    assert iv.prec == prec


def test_exppoly_arithmetic(exppoly):
    x = exppoly(1)
    f = x * x * Fraction(1, 2) - x * Fraction(1, 2)
    assert f.render() == 'x^2/2 - x/2'
    assert f.degree == 2
    assert (exppoly(0, 1) * exppoly(0, -1)) == ExpPoly.constant(1)
    assert not (f - f)
    with pytest.raises(ValueError):
        ExpPoly([((-1, 0), 1)])


def test_exppoly_derive(exppoly):
    f = exppoly(2, 2)
    expected = exppoly(1, 2, 2) + exppoly(2, 2, 2)
    assert f.derive() == expected
    assert exppoly(3).derive_n(3) == ExpPoly.constant(6)


def test_exppoly_integrate(exppoly):
    assert ExpPoly.constant(1).integrate() == exppoly(1)
    assert exppoly(0, 1).integrate() == exppoly(0, 1) - 1
    xe = exppoly(1, 1).integrate()
    assert xe == exppoly(1, 1) - exppoly(0, 1) + 1
    assert xe.evaluate(0) == 0
    assert exppoly(0).antider(2) == exppoly(2, 0, Fraction(1, 2))


def test_exppoly_evaluate(exppoly):
    assert exppoly(2, 1).evaluate(1) == Scalar.exp(1)
    assert exppoly(1, 1).evaluate(Fraction(1, 2)) == \
        Scalar(ExpConstant.exp(Fraction(1, 2), Fraction(1, 2)))
    ev = Character(2)
    assert ev(exppoly(2)) == 4
    assert Character(0) < Character(1)
    assert ev.render() == 'E[2]'


def test_character_multiplicative(exppoly):
    rng = random.Random(3)
    ev = Character(Fraction(1, 2))
    for _ in range(20):
        f, g = random_exppoly(rng), random_exppoly(rng)
        assert ev(f * g) == ev(f) * ev(g)


def test_integro_differential_identities():
    rng = random.Random(0)
    for _ in range(30):
        f, g = random_exppoly(rng), random_exppoly(rng)
        assert axiom_failures(f, g) == []


def test_evaluation_projector(exppoly):
    rng = random.Random(1)
    for _ in range(10):
        f = random_exppoly(rng)
        e_f = f - f.derive().integrate()
        assert e_f.is_constant()
        assert e_f - e_f.derive().integrate() == e_f


def test_exact_linear_algebra():
    matrix = [[Fraction(2), Fraction(1)], [Fraction(4), Fraction(3)]]
    assert bareiss_det(matrix) == 2
    inverse = matrix_inverse(matrix)
    assert inverse == [[Fraction(3, 2), Fraction(-1, 2)],
                       [Fraction(-2), Fraction(1)]]
    with pytest.raises(DivisionByZero):
        matrix_inverse([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]])
    assert bareiss_det([[Fraction(1), Fraction(2)],
                        [Fraction(2), Fraction(4)]]) == 0


def test_kernel_combinations():
    vectors = [{'a': Fraction(1)}, {'b': Fraction(1)},
               {'a': Fraction(2), 'b': Fraction(-1)}]
    relations = kernel_combinations(vectors)
    assert len(relations) == 1
    relation = relations[0]
    total = {}
    for c, v in zip(relation, vectors):
        for k, value in v.items():
            total[k] = total.get(k, 0) + c * value
    assert all(v == 0 for v in total.values())
    assert relation[2] != 0
