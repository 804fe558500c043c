"""Exact constants: exponential sums and their fractions.

An `ExpConstant` is a finite sum of q*E(mu) with rational q and mu, an
element of the group algebra of (Q, +) over Q with E(mu)*E(nu) = E(mu+nu).
A `Scalar` is a fraction of two of them. Distinct E(mu) are treated as
linearly independent, a faithful model of the real numbers exp(mu).
"""
import logging
import math
import threading
from fractions import Fraction

import sympy
from mpmath import iv

from ..base import BaseValue
from ..constants import (DEFAULT_FLOAT_TOL, MAX_PRECISION_DOUBLINGS,
                         START_PRECISION)
from ..exceptions import DivisionByZero, PrecisionExhausted
from .helpers import latex_rational, render_rational, to_fraction

_log = logging.getLogger(__name__)

_LAURENT_VAR = sympy.Symbol('t')

# iv.prec is process-wide
_PRECISION_LOCK = threading.Lock()


class ExpConstant(BaseValue):
    """A finite formal sum of q*E(mu)."""
    __slots__ = ('_terms',)

    def __init__(self, terms: 'dict|list|tuple' = None) -> None:
        """Instantiates an ExpConstant.

        Args:
            terms: A mapping or iterable of (exponent, coefficient) pairs.
                Coefficients of equal exponents are added.

        """
        acc = {}
        items = terms.items() if isinstance(terms, dict) else (terms or [])
        for mu, q in items:
            mu = to_fraction(mu)
            acc[mu] = acc.get(mu, 0) + to_fraction(q)
        self._terms = tuple(sorted((mu, q) for mu, q in acc.items() if q))

    @classmethod
    def exp(cls, mu: 'int|Fraction', q: 'int|Fraction' = 1) -> 'ExpConstant':
        return cls([(mu, q)])

    @classmethod
    def rational(cls, q: 'int|Fraction|str') -> 'ExpConstant':
        return cls([(0, to_fraction(q))])

    @classmethod
    def coerce(cls, value) -> 'ExpConstant':
        if isinstance(value, ExpConstant):
            return value
        return cls.rational(value)

    @property
    def terms(self) -> 'tuple[tuple[Fraction, Fraction]]':
        return self._terms

    def _key(self) -> tuple:
        return self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_rational(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and
                                   self._terms[0][0] == 0)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f'{self} is not rational')
        return self._terms[0][1] if self._terms else Fraction(0)

    def __add__(self, other) -> 'ExpConstant':
        if isinstance(other, Scalar):
            return NotImplemented
        other = ExpConstant.coerce(other)
        return ExpConstant(self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self) -> 'ExpConstant':
        return ExpConstant([(mu, -q) for mu, q in self._terms])

    def __sub__(self, other) -> 'ExpConstant':
        if isinstance(other, Scalar):
            return NotImplemented
        return self + (-ExpConstant.coerce(other))

    def __rsub__(self, other) -> 'ExpConstant':
        return ExpConstant.coerce(other) - self

    def __mul__(self, other) -> 'ExpConstant':
        if isinstance(other, Scalar):
            return NotImplemented
        other = ExpConstant.coerce(other)
        return ExpConstant([(m1 + m2, q1 * q2)
                            for m1, q1 in self._terms
                            for m2, q2 in other._terms])

    __rmul__ = __mul__

    def shift(self, mu: Fraction) -> 'ExpConstant':
        """Multiplies by E(mu)."""
        return ExpConstant([(m + mu, q) for m, q in self._terms])

    def render(self) -> str:
        if not self._terms:
            return '0'
        parts = []
        for mu, q in reversed(self._terms):
            if mu == 0:
                body = render_rational(abs(q))
            else:
                body = f'exp({render_rational(mu)})'
                if abs(q) != 1:
                    body = f'{render_rational(abs(q))}*{body}'
            parts.append(('-' if q < 0 else '+', body))
        text = ('-' if parts[0][0] == '-' else '') + parts[0][1]
        for sign, body in parts[1:]:
            text += f' {sign} {body}'
        return text

    def latex(self) -> str:
        if not self._terms:
            return '0'
        text = ''
        for mu, q in reversed(self._terms):
            if mu == 0:
                body = latex_rational(abs(q))
            else:
                body = f'e^{{{latex_rational(mu)}}}'
                if abs(q) != 1:
                    body = f'{latex_rational(abs(q))} {body}'
            if not text:
                text = ('-' if q < 0 else '') + body
            else:
                text += f' {"-" if q < 0 else "+"} {body}'
        return text


def _laurent_denominator(*values: ExpConstant) -> int:
    dens = [mu.denominator for v in values for mu, _ in v.terms]
    return math.lcm(*dens) if dens else 1


def _to_poly(value: ExpConstant, scale: int) -> 'tuple[sympy.Poly, Fraction]':
    """Maps an ExpConstant to (polynomial in t = E(1/scale), lowest exponent)."""
    low = value.terms[0][0]
    rep = {(int((mu - low) * scale),): sympy.Rational(q.numerator, q.denominator)
           for mu, q in value.terms}
    return sympy.Poly.from_dict(rep, _LAURENT_VAR, domain='QQ'), low


def _from_poly(poly: sympy.Poly, scale: int, low: Fraction) -> ExpConstant:
    return ExpConstant([(Fraction(k, scale) + low,
                         Fraction(int(c.p), int(c.q)))
                        for (k,), c in poly.terms()])


def _reduce(num: ExpConstant,
            den: ExpConstant) -> 'tuple[ExpConstant, ExpConstant]':
    """Cancels common factors and normalizes the denominator.

    The denominator's lowest exponent becomes 0 and its highest
    coefficient 1, which makes the representation canonical.
    """
    if not num:
        return ExpConstant(), ExpConstant.rational(1)
    if den.is_monomial():
        mu, q = den.terms[0]
        return num.shift(-mu) * (1 / q), ExpConstant.rational(1)
    scale = _laurent_denominator(num, den)
    p_num, low_num = _to_poly(num, scale)
    p_den, low_den = _to_poly(den, scale)
    common = p_num.gcd(p_den)
    if common.degree() > 0:
        p_num = p_num.exquo(common)
        p_den = p_den.exquo(common)
    num = _from_poly(p_num, scale, low_num - low_den)
    den = _from_poly(p_den, scale, Fraction(0))
    mu, q = den.terms[0][0], den.terms[-1][1]
    if den.is_monomial():
        return num.shift(-mu) * (1 / q), ExpConstant.rational(1)
    return num.shift(-mu) * (1 / q), den.shift(-mu) * (1 / q)


class Scalar(BaseValue):
    """An element of the constant field: a fraction of ExpConstants.

    Equality is decided by cross-multiplication. The stored fraction is
    reduced so that equal scalars also hash equally.
    """
    __slots__ = ('_num', '_den')

    def __init__(self,
                 num: 'ExpConstant|int|Fraction|str' = 0,
                 den: 'ExpConstant|int|Fraction|str' = 1) -> None:
        if isinstance(num, Scalar) or isinstance(den, Scalar):
            raise ValueError('Use Scalar arithmetic to combine scalars')
        num = ExpConstant.coerce(num)
        den = ExpConstant.coerce(den)
        if not den:
            raise DivisionByZero('Scalar denominator is zero')
        self._num, self._den = _reduce(num, den)

    @classmethod
    def coerce(cls, value) -> 'Scalar':
        if isinstance(value, Scalar):
            return value
        return cls(value)

    @classmethod
    def exp(cls, mu: 'int|Fraction') -> 'Scalar':
        """The constant E(mu), standing for exp(mu)."""
        return cls(ExpConstant.exp(mu))

    @property
    def num(self) -> ExpConstant:
        return self._num

    @property
    def den(self) -> ExpConstant:
        return self._den

    def _key(self) -> tuple:
        return (self._num.terms, self._den.terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, ExpConstant)):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self._num * other._den == other._num * self._den

    def __hash__(self) -> int:
        return hash(('Scalar', self._key()))

    def __bool__(self) -> bool:
        return bool(self._num)

    def is_rational(self) -> bool:
        return self._num.is_rational() and self._den.is_rational()

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f'{self} is not rational')
        return self._num.to_fraction() / self._den.to_fraction()

    def __add__(self, other) -> 'Scalar':
        try:
            other = Scalar.coerce(other)
        except ValueError:
            return NotImplemented
        if self._den == other._den:
            return Scalar(self._num + other._num, self._den)
        return Scalar(self._num * other._den + other._num * self._den,
                      self._den * other._den)

    __radd__ = __add__

    def __neg__(self) -> 'Scalar':
        return Scalar(-self._num, self._den)

    def __sub__(self, other) -> 'Scalar':
        try:
            other = Scalar.coerce(other)
        except ValueError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> 'Scalar':
        return Scalar.coerce(other) - self

    def __mul__(self, other) -> 'Scalar':
        try:
            other = Scalar.coerce(other)
        except ValueError:
            return NotImplemented
        return Scalar(self._num * other._num, self._den * other._den)

    __rmul__ = __mul__

    def inverse(self) -> 'Scalar':
        if not self._num:
            raise DivisionByZero('Zero scalar has no inverse')
        return Scalar(self._den, self._num)

    def __truediv__(self, other) -> 'Scalar':
        try:
            other = Scalar.coerce(other)
        except ValueError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> 'Scalar':
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> 'Scalar':
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inverse()
        result = Scalar(1)
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def is_negative_literal(self) -> bool:
        """True if the rendering starts with a minus sign."""
        return self.render().startswith('-')

    def render(self) -> str:
        if self._den == ExpConstant.rational(1):
            return self._num.render()
        num = self._num.render()
        if not self._num.is_monomial():
            num = f'({num})'
        return f'{num}/({self._den.render()})'

    def latex(self) -> str:
        if self._den == ExpConstant.rational(1):
            return self._num.latex()
        return f'\\frac{{{self._num.latex()}}}{{{self._den.latex()}}}'


def scalar_inv(s: Scalar) -> Scalar:
    """Inverts a nonzero scalar.

    Raises:
        DivisionByZero if the scalar is zero.

    """
    return Scalar.coerce(s).inverse()


def _interval(value: ExpConstant):
    acc = iv.mpf(0)
    for mu, q in value.terms:
        coeff = iv.mpf(q.numerator) / q.denominator
        if mu:
            coeff = coeff * iv.exp(iv.mpf(mu.numerator) / mu.denominator)
        acc = acc + coeff
    return acc


def eval_float(value: 'Scalar|ExpConstant|int|Fraction',
               tol: float = DEFAULT_FLOAT_TOL) -> float:
    """Evaluates a scalar to a float within a guaranteed tolerance.

    Uses interval arithmetic, doubling the working precision until the
    enclosing interval is narrower than `tol`.

    Args:
        value: The exact value.
        tol: Maximum absolute error.

    Raises:
        PrecisionExhausted if the denominator cannot be separated from zero
            or the width target is not met within the doubling cap.

    """
    s = value if isinstance(value, Scalar) else Scalar(value)
    prec = START_PRECISION
    with _PRECISION_LOCK:
        saved = iv.prec
        try:
            for _ in range(MAX_PRECISION_DOUBLINGS):
                iv.prec = prec
                den = _interval(s.den)
                if 0 not in den:
                    enclosure = _interval(s.num) / den
                    if float(enclosure.delta) < tol:
                        return float(enclosure.mid)
                _log.debug('Refining %s beyond %d bits', s, prec)
                prec *= 2
        finally:
            iv.prec = saved
    raise PrecisionExhausted(f'Could not evaluate {s} to within {tol}')
