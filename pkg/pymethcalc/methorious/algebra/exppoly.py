"""Exponential polynomials with derivation, integral from 0 and point evaluation."""
import math
from fractions import Fraction

import mpmath

from ..base import BaseValue
from .constant import ExpConstant, Scalar, eval_float
from .helpers import latex_rational, render_rational, to_fraction


def _power(base: Fraction, n: int) -> Fraction:
    return Fraction(1) if n == 0 else base ** n


class ExpPoly(BaseValue):
    """A finite sum of c * x^n * exp(mu*x) with Scalar c and rational mu.

    Terms are keyed by (n, mu) and kept sorted by frequency, then degree.
    """
    __slots__ = ('_terms',)

    def __init__(self, terms: 'dict|list|tuple' = None) -> None:
        """Instantiates an ExpPoly.

        Args:
            terms: A mapping or iterable of ((degree, frequency), coefficient).

        """
        acc = {}
        items = terms.items() if isinstance(terms, dict) else (terms or [])
        for (n, mu), c in items:
            if not isinstance(n, int) or n < 0:
                raise ValueError(f'Invalid degree {n}')
            key = (n, to_fraction(mu))
            c = Scalar.coerce(c)
            acc[key] = acc[key] + c if key in acc else c
        self._terms = tuple(sorted(((k, c) for k, c in acc.items() if c),
                                   key=lambda kc: (kc[0][1], kc[0][0])))

    @classmethod
    def monomial(cls, n: int = 0, mu: 'int|Fraction' = 0,
                 c: 'Scalar|int|Fraction' = 1) -> 'ExpPoly':
        return cls([((n, mu), c)])

    @classmethod
    def constant(cls, c: 'Scalar|int|Fraction') -> 'ExpPoly':
        return cls([((0, 0), c)])

    @classmethod
    def x(cls) -> 'ExpPoly':
        return cls.monomial(1)

    @classmethod
    def exp(cls, mu: 'int|Fraction') -> 'ExpPoly':
        return cls.monomial(0, mu)

    @classmethod
    def coerce(cls, value) -> 'ExpPoly':
        if isinstance(value, ExpPoly):
            return value
        return cls.constant(Scalar.coerce(value))

    @property
    def terms(self) -> 'tuple':
        """Pairs ((degree, frequency), coefficient)."""
        return self._terms

    def _key(self) -> tuple:
        return tuple((k, c._key()) for k, c in self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coordinates(self) -> dict:
        return {(mu, n): c for (n, mu), c in self._terms}

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k, _ in self._terms)

    def constant_value(self) -> Scalar:
        if not self.is_constant():
            raise ValueError(f'{self} is not constant')
        return self._terms[0][1] if self._terms else Scalar(0)

    @property
    def degree(self) -> int:
        return max((n for (n, _), _ in self._terms), default=-1)

    @property
    def frequencies(self) -> 'list[Fraction]':
        return sorted({mu for (_, mu), _ in self._terms})

    def __add__(self, other) -> 'ExpPoly':
        try:
            other = ExpPoly.coerce(other)
        except ValueError:
            return NotImplemented
        return ExpPoly(self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self) -> 'ExpPoly':
        return ExpPoly([(k, -c) for k, c in self._terms])

    def __sub__(self, other) -> 'ExpPoly':
        try:
            other = ExpPoly.coerce(other)
        except ValueError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> 'ExpPoly':
        return ExpPoly.coerce(other) - self

    def __mul__(self, other) -> 'ExpPoly':
        if isinstance(other, ExpPoly):
            return ExpPoly([((n1 + n2, m1 + m2), c1 * c2)
                            for (n1, m1), c1 in self._terms
                            for (n2, m2), c2 in other._terms])
        try:
            s = Scalar.coerce(other)
        except ValueError:
            return NotImplemented
        return ExpPoly([(k, c * s) for k, c in self._terms])

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> 'ExpPoly':
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError('Exponent must be a non-negative integer')
        result = ExpPoly.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def derive(self) -> 'ExpPoly':
        """The derivative, term-wise n*x^(n-1)e^(mu x) + mu*x^n e^(mu x)."""
        out = []
        for (n, mu), c in self._terms:
            if n:
                out.append(((n - 1, mu), c * n))
            if mu:
                out.append(((n, mu), c * mu))
        return ExpPoly(out)

    def derive_n(self, k: int) -> 'ExpPoly':
        result = self
        for _ in range(k):
            result = result.derive()
        return result

    def integrate(self) -> 'ExpPoly':
        """The integral from 0, so that the result vanishes at 0."""
        out = []
        for (n, mu), c in self._terms:
            if mu == 0:
                out.append(((n + 1, mu), c * Fraction(1, n + 1)))
                continue
            for k in range(n + 1):
                factor = Fraction((-1) ** k * math.factorial(n),
                                  math.factorial(n - k)) / mu ** (k + 1)
                out.append(((n - k, mu), c * factor))
            at_zero = Fraction((-1) ** n * math.factorial(n)) / mu ** (n + 1)
            out.append(((0, Fraction(0)), c * -at_zero))
        return ExpPoly(out)

    def antider(self, k: int) -> 'ExpPoly':
        """The k-fold iterated integral from 0."""
        if not isinstance(k, int) or k < 0:
            raise ValueError('k must be a non-negative integer')
        result = self
        for _ in range(k):
            result = result.integrate()
        return result

    def evaluate(self, point: 'Character|int|Fraction') -> Scalar:
        """The value at a rational point: x^n e^(mu x) -> a^n E(mu a)."""
        a = point.point if isinstance(point, Character) else to_fraction(point)
        result = Scalar(0)
        for (n, mu), c in self._terms:
            result = result + c * Scalar(ExpConstant.exp(mu * a, _power(a, n)))
        return result

    def evaluate_float(self, x: 'float|mpmath.mpf') -> mpmath.mpf:
        x = mpmath.mpf(x)
        total = mpmath.mpf(0)
        for (n, mu), c in self._terms:
            total += eval_float(c) * x ** n * mpmath.exp(mpmath.mpf(mu.numerator) / mu.denominator * x)
        return total

    def _body(self, n: int, mu: Fraction, latex: bool = False) -> str:
        parts = []
        if n:
            if latex:
                parts.append('x' if n == 1 else f'x^{{{n}}}')
            else:
                parts.append('x' if n == 1 else f'x^{n}')
        if mu:
            if latex:
                freq = '' if mu == 1 else ('-' if mu == -1 else latex_rational(mu))
                parts.append(f'e^{{{freq}x}}')
            else:
                freq = '' if mu == 1 else ('-' if mu == -1 else f'{render_rational(mu)}*')
                parts.append(f'exp({freq}x)')
        return (' ' if latex else '*').join(parts)

    def _ordered(self) -> list:
        return sorted(self._terms, key=lambda kc: (kc[0][1], -kc[0][0]))

    def render(self) -> str:
        if not self._terms:
            return '0'
        text = ''
        for (n, mu), c in self._ordered():
            body = self._body(n, mu)
            negative, piece = _coefficient_piece(c, body)
            if not text:
                text = ('-' if negative else '') + piece
            else:
                text += f' {"-" if negative else "+"} {piece}'
        return text

    def latex(self) -> str:
        if not self._terms:
            return '0'
        text = ''
        for (n, mu), c in self._ordered():
            body = self._body(n, mu, latex=True)
            if c.is_rational():
                q = c.to_fraction()
                negative = q < 0
                if body and abs(q) == 1:
                    piece = body
                else:
                    piece = f'{latex_rational(abs(q))} {body}'.strip()
            else:
                negative = False
                piece = f'\\left({c.latex()}\\right) {body}'.strip()
            if not text:
                text = ('-' if negative else '') + piece
            else:
                text += f' {"-" if negative else "+"} {piece}'
        return text


def _coefficient_piece(c: Scalar, body: str) -> 'tuple[bool, str]':
    """Splits a coefficient into (negative, unsigned text) for rendering."""
    if c.is_rational():
        q = c.to_fraction()
        p, d = abs(q.numerator), q.denominator
        if not body:
            return q < 0, render_rational(abs(q))
        piece = body if p == 1 else f'{p}*{body}'
        if d != 1:
            piece += f'/{d}'
        return q < 0, piece
    if c.den == ExpConstant.rational(1) and c.num.is_monomial():
        mu, q = c.num.terms[0]
        magnitude = ExpConstant.exp(mu, abs(q)).render()
        return q < 0, f'{magnitude}*{body}' if body else magnitude
    return False, f'({c.render()})*{body}' if body else f'({c.render()})'


class Character(BaseValue):
    """The point evaluation ev_a at a rational point a."""
    __slots__ = ('_point',)

    def __init__(self, point: 'int|Fraction|str' = 0) -> None:
        self._point = to_fraction(point)

    @property
    def point(self) -> Fraction:
        return self._point

    def _key(self) -> tuple:
        return (self._point,)

    def __lt__(self, other: 'Character') -> bool:
        return self._point < other._point

    def __call__(self, f: ExpPoly) -> Scalar:
        return ExpPoly.coerce(f).evaluate(self._point)

    def render(self) -> str:
        return f'E[{render_rational(self._point)}]'

    def latex(self) -> str:
        return f'\\mathrm{{ev}}_{{{latex_rational(self._point)}}}'


def evaluate(f: ExpPoly, ch: Character) -> Scalar:
    return ch(f)


def derive(f: ExpPoly) -> ExpPoly:
    return f.derive()


def integrate(f: ExpPoly) -> ExpPoly:
    return f.integrate()


def antider(f: ExpPoly, k: int) -> ExpPoly:
    return f.antider(k)
