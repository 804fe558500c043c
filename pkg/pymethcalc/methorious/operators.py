"""Integro-differential operators in normal form and Stieltjes conditions.

Every operator is stored in the direct sum F[D] + F[A] + (Phi) through four
kinds of basis terms, each carrying a left function f:

* ``DIFF i``             f * D^i
* ``INTEG m``            f * A * m
* ``LOCAL (a, i)``       f * E[a] * D^i
* ``GLOBAL (a, m)``      f * E[a] * A * m

where ``m`` is a monomial x^n exp(mu x) with coefficient 1, so the
representation is unique. Products are computed by pushing the right
factor through D, A and E[a] with the rewrite rules

    D f = f D + f'          D A = 1          D E[a] = 0
    E[a] f = f(a) E[a]      E[a] E[b] = E[b]  E[0] A = 0
    A f D = f - A f' - f(0) E[0]
    A f A = (A f) A - A (A f)
    A f E[a] = (A f) E[a]

applied from the innermost composition outward. Each rule lowers the
number of D/A alternations or keeps it and lowers the term count, so the
reduction terminates.
"""
import logging
from fractions import Fraction

from .algebra.constant import ExpConstant, Scalar
from .algebra.exppoly import Character, ExpPoly
from .algebra.helpers import latex_rational, render_rational, to_fraction, vector_rank
from .base import BaseValue, ConditionList
from .constants import TermKind

_log = logging.getLogger(__name__)

DIFF, INTEG, LOCAL, GLOBAL = (TermKind.DIFF, TermKind.INTEG,
                              TermKind.LOCAL, TermKind.GLOBAL)


def _monomial(key: 'tuple[int, Fraction]') -> ExpPoly:
    return ExpPoly.monomial(key[0], key[1])


def _accumulate(acc: dict, key: tuple, left: ExpPoly) -> None:
    if not left:
        return
    if key[0] == GLOBAL and key[1] == 0:
        return   # E[0] A = 0
    total = acc[key] + left if key in acc else left
    if total:
        acc[key] = total
    else:
        acc.pop(key, None)


def _split_right(acc: dict, kind: TermKind, prefix: tuple,
                 left: ExpPoly, right: ExpPoly) -> None:
    """Adds left * (kind) * right with right split into monomials."""
    for (n, mu), c in right.terms:
        _accumulate(acc, (kind,) + prefix + ((n, mu),), left * c)


def _left_multiply(f: ExpPoly, terms: dict) -> dict:
    out = {}
    for key, left in terms.items():
        _accumulate(out, key, f * left)
    return out


def _derive_left(terms: dict) -> dict:
    """D composed with an operator from the left."""
    out = {}
    for key, f in terms.items():
        _accumulate(out, key, f.derive())
        if key[0] == DIFF:
            _accumulate(out, (DIFF, key[1] + 1), f)
        elif key[0] == INTEG:
            _accumulate(out, (DIFF, 0), f * _monomial(key[1]))
    return out


def _evaluate_left(point: Fraction, terms: dict) -> dict:
    """E[point] composed with an operator from the left."""
    out = {}
    for key, f in terms.items():
        value = f.evaluate(point)
        if not value:
            continue
        c = ExpPoly.constant(value)
        if key[0] == DIFF:
            _accumulate(out, (LOCAL, point, key[1]), c)
        elif key[0] == INTEG:
            _accumulate(out, (GLOBAL, point, key[1]), c)
        else:
            _accumulate(out, key, c)
    return out


def _integrate_left(terms: dict) -> dict:
    """A composed with an operator from the left."""
    out = {}
    for key, h in terms.items():
        kind = key[0]
        if kind == DIFF:
            j = key[1]
            sign = 1
            current = h
            for k in range(j):
                _accumulate(out, (DIFF, j - 1 - k), current * sign)
                at_zero = current.evaluate(0)
                if at_zero:
                    _accumulate(out, (LOCAL, Fraction(0), j - 1 - k),
                                ExpPoly.constant(at_zero * -sign))
                current = current.derive()
                sign = -sign
            _split_right(out, INTEG, (), ExpPoly.constant(sign), current)
        elif kind == INTEG:
            primitive = h.integrate()
            _accumulate(out, key, primitive)
            _split_right(out, INTEG, (), ExpPoly.constant(-1),
                         primitive * _monomial(key[1]))
        else:
            _accumulate(out, key, h.integrate())
    return out


def _compose(p: dict, q: dict) -> dict:
    out = {}
    powers = [q]

    def derived(i: int) -> dict:
        while len(powers) <= i:
            powers.append(_derive_left(powers[-1]))
        return powers[i]

    for key, f in p.items():
        kind = key[0]
        if kind == DIFF:
            part = derived(key[1])
        elif kind == INTEG:
            part = _integrate_left(_left_multiply(_monomial(key[1]), q))
        elif kind == LOCAL:
            part = _evaluate_left(key[1], derived(key[2]))
        else:
            part = _evaluate_left(
                key[1], _integrate_left(_left_multiply(_monomial(key[2]), q)))
        for k, g in part.items():
            _accumulate(out, k, f * g)
    return out


def scaled_text(c: Scalar, body: str) -> 'tuple[bool, str]':
    """Returns (negative, text) for the product c * body."""
    if c.is_rational():
        q = c.to_fraction()
        if not body:
            return q < 0, render_rational(abs(q))
        if abs(q) == 1:
            return q < 0, body
        return q < 0, f'{render_rational(abs(q))}*{body}'
    if c.den == ExpConstant.rational(1) and c.num.is_monomial():
        mu, q = c.num.terms[0]
        text = ExpConstant.exp(mu, abs(q)).render()
        return q < 0, f'{text}*{body}' if body else text
    return False, f'({c.render()})*{body}' if body else f'({c.render()})'


def product_text(f: ExpPoly, body: str) -> 'tuple[bool, str]':
    """Returns (negative, text) for the product f * body."""
    if len(f.terms) == 1:
        (n, mu), c = f.terms[0]
        fbody = f._body(n, mu)
        inner = '*'.join(x for x in (fbody, body) if x)
        return scaled_text(c, inner)
    if not body:
        return False, f'({f.render()})'
    return False, f'({f.render()})*{body}'


def _right_body(key: 'tuple[int, Fraction]') -> str:
    return ExpPoly.monomial(0)._body(key[0], key[1])


def power_text(symbol: str, i: int) -> str:
    if i == 0:
        return ''
    return symbol if i == 1 else f'{symbol}^{i}'


def join_signed(pieces: 'list[tuple[bool, str]]') -> str:
    if not pieces:
        return '0'
    text = ('-' if pieces[0][0] else '') + pieces[0][1]
    for negative, piece in pieces[1:]:
        text += f' {"-" if negative else "+"} {piece}'
    return text


class OperatorTerm(BaseValue):
    """A single basis term of an integro-differential operator."""
    __slots__ = ('_kind', '_left', '_order', '_right', '_char')

    def __init__(self, kind: TermKind, left: ExpPoly, **kwargs) -> None:
        """Instantiates an OperatorTerm.

        Args:
            kind: The term kind.
            left: The nonzero left coefficient function f.

        Keyword Args:
            order (int): The derivative order i (DIFF, LOCAL).
            right (ExpPoly): The nonzero right function g (INTEG, GLOBAL).
            char (Character): The character (LOCAL, GLOBAL).

        """
        if not isinstance(kind, TermKind):
            raise ValueError(f'Invalid term kind {kind}')
        left = ExpPoly.coerce(left)
        if not left:
            raise ValueError('Left coefficient must be nonzero')
        self._kind = kind
        self._left = left
        self._order = kwargs.pop('order', None)
        self._right = kwargs.pop('right', None)
        self._char = kwargs.pop('char', None)
        if kind in (DIFF, LOCAL):
            if not isinstance(self._order, int) or self._order < 0:
                raise ValueError('Order must be a non-negative integer')
        if kind in (INTEG, GLOBAL):
            self._right = ExpPoly.coerce(self._right)
            if not self._right:
                raise ValueError('Right function must be nonzero')
        if kind in (LOCAL, GLOBAL) and not isinstance(self._char, Character):
            raise ValueError('Boundary terms need a Character')

    @classmethod
    def diff(cls, f: ExpPoly, i: int) -> 'OperatorTerm':
        return cls(DIFF, f, order=i)

    @classmethod
    def integral(cls, f: ExpPoly, g: ExpPoly) -> 'OperatorTerm':
        return cls(INTEG, f, right=g)

    @classmethod
    def local(cls, f: ExpPoly, char: Character, i: int) -> 'OperatorTerm':
        return cls(LOCAL, f, char=char, order=i)

    @classmethod
    def glob(cls, f: ExpPoly, char: Character, g: ExpPoly) -> 'OperatorTerm':
        return cls(GLOBAL, f, char=char, right=g)

    @property
    def kind(self) -> TermKind:
        return self._kind

    @property
    def left(self) -> ExpPoly:
        return self._left

    @property
    def order(self) -> 'int|None':
        return self._order

    @property
    def right(self) -> 'ExpPoly|None':
        return self._right

    @property
    def char(self) -> 'Character|None':
        return self._char

    def _key(self) -> tuple:
        return (self._kind, self._left._key(), self._order,
                self._right._key() if self._right is not None else None,
                self._char._key() if self._char is not None else None)

    def _entries(self) -> dict:
        acc = {}
        if self._kind == DIFF:
            _accumulate(acc, (DIFF, self._order), self._left)
        elif self._kind == INTEG:
            _split_right(acc, INTEG, (), self._left, self._right)
        elif self._kind == LOCAL:
            _accumulate(acc, (LOCAL, self._char.point, self._order), self._left)
        else:
            _split_right(acc, GLOBAL, (self._char.point,), self._left,
                         self._right)
        return acc

    def render(self) -> str:
        return IntDiffOperator([self]).render()


class IntDiffOperator(BaseValue):
    """An element of the integro-differential operator ring in normal form."""
    __slots__ = ('_entries',)

    def __init__(self, terms: 'list[OperatorTerm]|dict' = None) -> None:
        if isinstance(terms, dict):
            entries = {}
            for key, left in terms.items():
                _accumulate(entries, key, left)
        else:
            entries = {}
            for term in terms or []:
                if not isinstance(term, OperatorTerm):
                    raise ValueError(f'Invalid operator term {term!r}')
                for key, left in term._entries().items():
                    _accumulate(entries, key, left)
        self._entries = dict(sorted(entries.items()))

    @classmethod
    def identity(cls) -> 'IntDiffOperator':
        return cls({(DIFF, 0): ExpPoly.constant(1)})

    @classmethod
    def zero(cls) -> 'IntDiffOperator':
        return cls()

    @classmethod
    def diff(cls, i: int = 1) -> 'IntDiffOperator':
        return cls({(DIFF, i): ExpPoly.constant(1)})

    @classmethod
    def integral(cls) -> 'IntDiffOperator':
        return cls({(INTEG, (0, Fraction(0))): ExpPoly.constant(1)})

    @classmethod
    def evaluation(cls, point: 'int|Fraction|Character') -> 'IntDiffOperator':
        a = point.point if isinstance(point, Character) else to_fraction(point)
        return cls({(LOCAL, a, 0): ExpPoly.constant(1)})

    @classmethod
    def multiplication(cls, f: 'ExpPoly|Scalar|int|Fraction') -> 'IntDiffOperator':
        return cls({(DIFF, 0): ExpPoly.coerce(f)})

    @classmethod
    def coerce(cls, value) -> 'IntDiffOperator':
        if isinstance(value, IntDiffOperator):
            return value
        if isinstance(value, StieltjesCondition):
            return value.to_operator()
        return cls.multiplication(value)

    @property
    def entries(self) -> dict:
        """The normal form as a mapping from basis key to left function."""
        return dict(self._entries)

    @property
    def terms(self) -> 'tuple[OperatorTerm]':
        result = []
        for key, f in self._entries.items():
            if key[0] == DIFF:
                result.append(OperatorTerm.diff(f, key[1]))
            elif key[0] == INTEG:
                result.append(OperatorTerm.integral(f, _monomial(key[1])))
            elif key[0] == LOCAL:
                result.append(OperatorTerm.local(f, Character(key[1]), key[2]))
            else:
                result.append(OperatorTerm.glob(f, Character(key[1]),
                                                _monomial(key[2])))
        return tuple(result)

    def _key(self) -> tuple:
        return tuple((k, f._key()) for k, f in self._entries.items())

    def __bool__(self) -> bool:
        return bool(self._entries)

    def kinds(self) -> 'set[TermKind]':
        return {k[0] for k in self._entries}

    def is_boundary(self) -> bool:
        """True if every term lies in the ideal (Phi)."""
        return self.kinds() <= {LOCAL, GLOBAL}

    def is_differential(self) -> bool:
        return self.kinds() <= {DIFF}

    def part(self, *kinds: TermKind) -> 'IntDiffOperator':
        return IntDiffOperator({k: f for k, f in self._entries.items()
                                if k[0] in kinds})

    def __add__(self, other) -> 'IntDiffOperator':
        other = IntDiffOperator.coerce(other)
        acc = dict(self._entries)
        for key, f in other._entries.items():
            _accumulate(acc, key, f)
        return IntDiffOperator(acc)

    __radd__ = __add__

    def __neg__(self) -> 'IntDiffOperator':
        return IntDiffOperator({k: -f for k, f in self._entries.items()})

    def __sub__(self, other) -> 'IntDiffOperator':
        return self + (-IntDiffOperator.coerce(other))

    def __rsub__(self, other) -> 'IntDiffOperator':
        return IntDiffOperator.coerce(other) - self

    def __mul__(self, other) -> 'IntDiffOperator':
        if isinstance(other, (IntDiffOperator, StieltjesCondition)):
            return op_mul(self, IntDiffOperator.coerce(other))
        if isinstance(other, (ExpPoly, Scalar, int, Fraction)):
            return op_mul(self, IntDiffOperator.multiplication(other))
        return NotImplemented

    def __rmul__(self, other) -> 'IntDiffOperator':
        if isinstance(other, (ExpPoly, Scalar, int, Fraction)):
            return IntDiffOperator(_left_multiply(ExpPoly.coerce(other),
                                                  self._entries))
        return NotImplemented

    def __pow__(self, exponent: int) -> 'IntDiffOperator':
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError('Exponent must be a non-negative integer')
        result = IntDiffOperator.identity()
        for _ in range(exponent):
            result = op_mul(result, self)
        return result

    def apply(self, f: ExpPoly) -> ExpPoly:
        return op_apply(self, f)

    def render(self) -> str:
        pieces = []
        for key, f in self._entries.items():
            kind = key[0]
            if kind == DIFF:
                body = power_text('D', key[1])
            elif kind == INTEG:
                body = '*'.join(x for x in ('A', _right_body(key[1])) if x)
            elif kind == LOCAL:
                body = '*'.join(x for x in (f'E[{render_rational(key[1])}]',
                                            power_text('D', key[2])) if x)
            else:
                body = '*'.join(x for x in (f'E[{render_rational(key[1])}]',
                                            'A', _right_body(key[2])) if x)
            pieces.append(product_text(f, body))
        return join_signed(pieces)

    def latex(self) -> str:
        pieces = []
        for key, f in self._entries.items():
            kind = key[0]
            if kind == DIFF:
                body = '' if key[1] == 0 else (
                    '\\partial' if key[1] == 1 else f'\\partial^{{{key[1]}}}')
            elif kind == INTEG:
                body = f'\\int {_monomial(key[1]).latex()}'
            elif kind == LOCAL:
                body = f'\\mathrm{{ev}}_{{{latex_rational(key[1])}}}'
                if key[2]:
                    body += ' \\partial' + (f'^{{{key[2]}}}' if key[2] > 1 else '')
            else:
                body = (f'\\mathrm{{ev}}_{{{latex_rational(key[1])}}} \\int '
                        f'{_monomial(key[2]).latex()}')
            factor = f.latex()
            if len(f.terms) > 1:
                factor = f'\\left({factor}\\right)'
            if factor == '1' and body:
                factor = ''
            pieces.append(f'{factor} {body}'.strip())
        return ' + '.join(pieces) if pieces else '0'

    def json(self) -> dict:
        return {
            'text': self.render(),
            'terms': [_term_json(t) for t in self.terms],
        }


def _term_json(term: OperatorTerm) -> dict:
    names = {DIFF: 'D', INTEG: 'I', LOCAL: 'BL', GLOBAL: 'BG'}
    obj = {'kind': names[term.kind], 'f': term.left.render()}
    if term.order is not None:
        obj['i'] = term.order
    if term.char is not None:
        obj['point'] = render_rational(term.char.point)
    if term.right is not None:
        obj['g'] = term.right.render()
    return obj


class StieltjesCondition(BaseValue):
    """A boundary condition sum a_{phi,i} E[phi] D^i + sum E[phi] A f_phi.

    Stored as coordinates over the functional basis E[a] D^i and
    E[a] A x^n exp(mu x).
    """
    __slots__ = ('_coords',)

    def __init__(self, coordinates: dict = None) -> None:
        coords = {}
        for key, value in (coordinates or {}).items():
            if key[0] not in (LOCAL, GLOBAL):
                raise ValueError(f'Invalid condition coordinate {key}')
            if key[0] == GLOBAL and key[1] == 0:
                continue
            value = Scalar.coerce(value)
            total = coords[key] + value if key in coords else value
            if total:
                coords[key] = total
            else:
                coords.pop(key, None)
        self._coords = dict(sorted(coords.items()))

    @classmethod
    def evaluation(cls, point: 'int|Fraction|str', i: int = 0,
                   coefficient: 'Scalar|int|Fraction' = 1) -> 'StieltjesCondition':
        """The local condition coefficient * E[point] * D^i."""
        return cls({(LOCAL, to_fraction(point), i): coefficient})

    @classmethod
    def integral(cls, point: 'int|Fraction|str',
                 f: 'ExpPoly|int' = 1) -> 'StieltjesCondition':
        """The global condition E[point] * A * f, the integral over [0, point]."""
        coords = {}
        for (n, mu), c in ExpPoly.coerce(f).terms:
            coords[(GLOBAL, to_fraction(point), (n, mu))] = c
        return cls(coords)

    @classmethod
    def from_operator(cls, op: IntDiffOperator) -> 'StieltjesCondition':
        """Converts a boundary operator with constant left coefficients.

        Raises:
            ValueError if the operator is not a functional.

        """
        if not op.is_boundary():
            raise ValueError(f'{op} is not a boundary functional')
        coords = {}
        for key, f in op.entries.items():
            if not f.is_constant():
                raise ValueError(f'{op} has non-constant left coefficients')
            coords[key] = f.constant_value()
        return cls(coords)

    def to_operator(self) -> IntDiffOperator:
        return IntDiffOperator({k: ExpPoly.constant(c)
                                for k, c in self._coords.items()})

    def coordinates(self) -> dict:
        return dict(self._coords)

    def _key(self) -> tuple:
        return tuple((k, c._key()) for k, c in self._coords.items())

    def __bool__(self) -> bool:
        return bool(self._coords)

    @property
    def local(self) -> 'dict[tuple[Fraction, int], Scalar]':
        return {(k[1], k[2]): c for k, c in self._coords.items()
                if k[0] == LOCAL}

    @property
    def global_functions(self) -> 'dict[Fraction, ExpPoly]':
        result = {}
        for k, c in self._coords.items():
            if k[0] == GLOBAL:
                term = ExpPoly.monomial(k[2][0], k[2][1], c)
                result[k[1]] = result[k[1]] + term if k[1] in result else term
        return result

    @property
    def points(self) -> 'list[Fraction]':
        return sorted({k[1] for k in self._coords})

    @property
    def order(self) -> int:
        """The highest derivative order of the local part, -1 if none."""
        return max((k[2] for k in self._coords if k[0] == LOCAL), default=-1)

    def is_local(self) -> bool:
        return all(k[0] == LOCAL for k in self._coords)

    def __add__(self, other: 'StieltjesCondition') -> 'StieltjesCondition':
        if not isinstance(other, StieltjesCondition):
            return NotImplemented
        coords = dict(self._coords)
        for k, c in other._coords.items():
            coords[k] = coords[k] + c if k in coords else c
        return StieltjesCondition(coords)

    def __neg__(self) -> 'StieltjesCondition':
        return StieltjesCondition({k: -c for k, c in self._coords.items()})

    def __sub__(self, other: 'StieltjesCondition') -> 'StieltjesCondition':
        if not isinstance(other, StieltjesCondition):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> 'StieltjesCondition':
        if isinstance(other, IntDiffOperator):
            return cond_compose(self, other)
        if isinstance(other, ExpPoly):
            return cond_compose(self, IntDiffOperator.multiplication(other))
        try:
            s = Scalar.coerce(other)
        except ValueError:
            return NotImplemented
        return StieltjesCondition({k: c * s for k, c in self._coords.items()})

    def __rmul__(self, other) -> 'StieltjesCondition':
        try:
            s = Scalar.coerce(other)
        except ValueError:
            return NotImplemented
        return StieltjesCondition({k: c * s for k, c in self._coords.items()})

    def monic(self) -> 'StieltjesCondition':
        """Scales so that the first coordinate in canonical order is 1."""
        if not self._coords:
            return self
        lead = next(iter(self._coords.values()))
        return self * lead.inverse()

    def __call__(self, f: ExpPoly) -> Scalar:
        return cond_apply(self, f)

    def render(self) -> str:
        pieces = []
        for (a, i), c in self.local.items():
            body = '*'.join(x for x in (f'E[{render_rational(a)}]',
                                        power_text('D', i)) if x)
            pieces.append(scaled_text(c, body))
        for a, f in self.global_functions.items():
            token = f'I[0,{render_rational(a)}]'
            if len(f.terms) == 1:
                (n, mu), c = f.terms[0]
                body = '*'.join(x for x in (token, f._body(n, mu)) if x)
                pieces.append(scaled_text(c, body))
            else:
                pieces.append((False, f'{token}*({f.render()})'))
        return join_signed(pieces)

    def latex(self) -> str:
        return self.to_operator().latex()

    def json(self) -> dict:
        return {
            'text': self.render(),
            'local': [{'point': render_rational(a), 'i': i, 'coeff': c.render()}
                      for (a, i), c in self.local.items()],
            'global': [{'point': render_rational(a), 'f': f.render()}
                       for a, f in self.global_functions.items()],
        }


def op_mul(p: IntDiffOperator, q: IntDiffOperator) -> IntDiffOperator:
    """The normal form of the composition p*q."""
    return IntDiffOperator(_compose(p._entries, q._entries))


def op_apply(p: IntDiffOperator, f: ExpPoly) -> ExpPoly:
    """Applies an operator to an exponential polynomial."""
    f = ExpPoly.coerce(f)
    result = ExpPoly()
    for key, left in p._entries.items():
        kind = key[0]
        if kind == DIFF:
            result = result + left * f.derive_n(key[1])
        elif kind == INTEG:
            result = result + left * (_monomial(key[1]) * f).integrate()
        elif kind == LOCAL:
            result = result + left * f.derive_n(key[2]).evaluate(key[1])
        else:
            value = (_monomial(key[2]) * f).integrate().evaluate(key[1])
            result = result + left * value
    return result


def cond_apply(beta: StieltjesCondition, f: ExpPoly) -> Scalar:
    """Evaluates a boundary condition on an exponential polynomial."""
    f = ExpPoly.coerce(f)
    total = Scalar(0)
    derivatives = {}
    for key, c in beta._coords.items():
        if key[0] == LOCAL:
            i = key[2]
            if i not in derivatives:
                derivatives[i] = f.derive_n(i)
            total = total + c * derivatives[i].evaluate(key[1])
        else:
            total = total + c * (_monomial(key[2]) * f).integrate().evaluate(key[1])
    return total


def cond_compose(beta: StieltjesCondition,
                 p: IntDiffOperator) -> StieltjesCondition:
    """The condition beta*p, again a Stieltjes condition."""
    return StieltjesCondition.from_operator(op_mul(beta.to_operator(), p))


def cond_independent(bs: 'list[StieltjesCondition]') -> bool:
    """True iff the conditions are linearly independent."""
    return vector_rank([b.coordinates() for b in bs]) == len(bs)


def reduce_basis(conditions: 'list[StieltjesCondition]') -> ConditionList:
    """Keeps the first-occurring independent conditions."""
    return ConditionList(StieltjesCondition,
                         strict=False).extend_independent(conditions)


def span_contains(basis: 'list[StieltjesCondition]',
                  beta: StieltjesCondition) -> bool:
    return reduce_basis(basis).spans(beta)


def same_space(b1: 'list[StieltjesCondition]',
               b2: 'list[StieltjesCondition]') -> bool:
    """True iff two bases span the same boundary space."""
    l1, l2 = reduce_basis(b1), reduce_basis(b2)
    return (l1.rank == l2.rank and
            all(l1.spans(b) for b in b2) and all(l2.spans(b) for b in b1))
