"""Seeded random values for property checks and the selftest command.

Every generator takes a `random.Random` so that a suite run is
reproducible from its seed.
"""
import random
from fractions import Fraction

from .algebra.exppoly import ExpPoly
from .operators import StieltjesCondition
from .problems import (BoundaryProblem, DiffOperator, fundamental_system,
                       is_regular)

SAMPLE_POINTS = (Fraction(0), Fraction(1, 2), Fraction(1))
SAMPLE_ROOTS = (Fraction(-1), Fraction(0), Fraction(1), Fraction(2))
MAX_ATTEMPTS = 100


def random_rational(rng: random.Random, size: int = 5,
                    allow_zero: bool = True) -> Fraction:
    while True:
        value = Fraction(rng.randint(-size, size), rng.randint(1, 3))
        if value or allow_zero:
            return value


def random_exppoly(rng: random.Random, degree: int = 4, frequency: int = 3,
                   terms: int = 3) -> ExpPoly:
    """A nonzero exponential polynomial with integer frequencies.

    Args:
        rng: The random source.
        degree: Maximum polynomial degree of a term.
        frequency: Maximum absolute frequency of a term.
        terms: Maximum number of terms.

    """
    while True:
        result = ExpPoly()
        for _ in range(rng.randint(1, terms)):
            result = result + ExpPoly.monomial(
                rng.randint(0, degree), rng.randint(-frequency, frequency),
                random_rational(rng, allow_zero=False))
        if result:
            return result


def random_operator(rng: random.Random, max_order: int = 2) -> DiffOperator:
    """A monic constant-coefficient operator with roots in SAMPLE_ROOTS."""
    order = rng.randint(1, max_order)
    return DiffOperator.from_roots([rng.choice(SAMPLE_ROOTS)
                                    for _ in range(order)])


def random_condition(rng: random.Random, max_order: int = 1,
                     points: 'tuple[Fraction]' = SAMPLE_POINTS
                     ) -> StieltjesCondition:
    """A nonzero combination of evaluations, derivatives and integrals."""
    while True:
        beta = StieltjesCondition()
        for _ in range(rng.randint(1, 2)):
            a = rng.choice(points)
            c = random_rational(rng, allow_zero=False)
            if a and rng.random() < 0.25:
                beta = beta + StieltjesCondition.integral(
                    a, ExpPoly.monomial(rng.randint(0, 1))) * c
            else:
                beta = beta + StieltjesCondition.evaluation(
                    a, rng.randint(0, max_order), c)
        if beta:
            return beta


def random_problem(rng: random.Random, max_order: int = 2,
                   regular: bool = True) -> BoundaryProblem:
    """A problem with as many independent conditions as its order.

    Raises:
        ValueError if no regular sample is found within MAX_ATTEMPTS.

    """
    for _ in range(MAX_ATTEMPTS):
        operator = random_operator(rng, max_order)
        conditions = [random_condition(rng, operator.order - 1)
                      for _ in range(operator.order)]
        p = BoundaryProblem.from_conditions(operator, conditions)
        if p.dimension != operator.order:
            continue
        if not regular or is_regular(p):
            return p
    raise ValueError(f'No regular problem found in {MAX_ATTEMPTS} attempts')


def random_singular_problem(rng: random.Random, max_order: int = 2,
                            max_conditions: int = 3) -> BoundaryProblem:
    """A problem that is not regular, with up to max_conditions conditions."""
    for _ in range(MAX_ATTEMPTS):
        operator = random_operator(rng, max_order)
        conditions = [random_condition(rng)
                      for _ in range(rng.randint(1, max_conditions))]
        p = BoundaryProblem.from_conditions(operator, conditions)
        if not is_regular(p):
            return p
    raise ValueError(f'No singular problem found in {MAX_ATTEMPTS} attempts')


def random_kernel_function(rng: random.Random, p: BoundaryProblem) -> ExpPoly:
    """A nonzero combination of the fundamental system of p's operator."""
    while True:
        result = ExpPoly()
        for u in fundamental_system(p.operator).functions:
            result = result + u * random_rational(rng)
        if result:
            return result
