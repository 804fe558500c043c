"""Parsers for the text forms produced by `render`.

Every expression is read as an element of the operator ring: `x`, numbers
and `exp(...)` are multiplication operators, `D` differentiates, `A`
integrates from 0, `E[a]` evaluates at a and `I[a,b]` is E[b]*A - E[a]*A.
Products are compositions, so `x*A*exp(-x)` is the usual normal form term.
On top of operators the grammar reads boundary problems `(T, [B...])`,
rational combinations of problems and fractions `inv(T, [B...]) * (...)`.

The parser is a top-down operator precedence parser with one symbol class
per token kind.
"""
import json
import logging
import os
import re
import sys
from fractions import Fraction
from typing import Any, Iterator, NamedTuple

from .algebra.constant import Scalar
from .algebra.exppoly import ExpPoly
from .constants import TermKind
from .exceptions import ParseError
from .operators import IntDiffOperator, StieltjesCondition
from .ore import MethoriousOperator, ProblemCombination
from .problems import BoundaryProblem, DiffOperator

_log = logging.getLogger(__name__)

TOKENS = {
    'number': r'\d+',
    'name': r'[A-Za-z_][A-Za-z0-9_]*',
    'lpar': r'\(',
    'rpar': r'\)',
    'lbrack': r'\[',
    'rbrack': r'\]',
    'comma': r',',
    'plus': r'\+',
    'minus': r'-',
    'mul': r'\*',
    'div': r'/',
    'pow': r'\^',
    'newline': r'\n',
    'skip': r'[ \t\r]+',
    'error': r'.',
}
TOKEN_NAMES = {
    'number': 'number', 'name': 'name', 'lpar': "'('", 'rpar': "')'",
    'lbrack': "'['", 'rbrack': "']'", 'comma': "','", 'plus': "'+'",
    'minus': "'-'", 'mul': "'*'", 'div': "'/'", 'pow': "'^'", 'end': 'end',
}
_MULTIPLICATION = (TermKind.DIFF, 0)
OPERAND_START = ['number', 'name', "'('", "'-'"]
_REGEX = re.compile('|'.join(f'(?P<{k}>{v})' for k, v in TOKENS.items()))


class Token(NamedTuple):
    kind: str
    value: str
    line: int
    column: int


def tokenize(source: str) -> Iterator[Token]:
    """Yields the tokens of a source text with 1-based positions.

    Raises:
        ParseError on a character outside the grammar.

    """
    line, line_start = 1, 0
    for mo in _REGEX.finditer(source):
        kind = mo.lastgroup
        column = mo.start() - line_start + 1
        if kind == 'newline':
            line, line_start = line + 1, mo.end()
            continue
        if kind == 'skip':
            continue
        if kind == 'error':
            raise ParseError(f'Unexpected character {mo.group()!r}',
                             line, column)
        yield Token(kind, mo.group(), line, column)


def _function(value: Any) -> 'ExpPoly|None':
    """The function of a multiplication operator, else None."""
    if isinstance(value, IntDiffOperator):
        entries = value.entries
        if not entries:
            return ExpPoly()
        if list(entries) == [_MULTIPLICATION]:
            return entries[_MULTIPLICATION]
    return None


def _constant(value: Any) -> 'Scalar|None':
    """The scalar of a constant multiplication operator, else None."""
    f = _function(value)
    if f is None or not f.is_constant():
        return None
    return f.constant_value() if f else Scalar(0)


def _to_combination(value: Any) -> 'ProblemCombination|None':
    if isinstance(value, ProblemCombination):
        return value
    if isinstance(value, BoundaryProblem):
        return ProblemCombination.single(value)
    c = _constant(value)
    if c is not None and c.is_rational():
        if not c:
            return ProblemCombination()
        return ProblemCombination.single(BoundaryProblem.identity(),
                                         c.to_fraction())
    return None


class Symbol:
    """A token bound into the parse with null and left denotations."""
    kind = ''
    lbp = 0

    def __init__(self, parser: 'Parser', token: Token) -> None:
        self.parser = parser
        self.token = token

    def nud(self) -> Any:
        raise self.parser.error(f'Unexpected {TOKEN_NAMES[self.kind]}',
                                self.token, OPERAND_START)

    def led(self, left: Any) -> Any:
        raise self.parser.error(f'Unexpected {TOKEN_NAMES[self.kind]}',
                                self.token)


class End(Symbol):
    kind = 'end'


class Number(Symbol):
    kind = 'number'

    def nud(self) -> Any:
        return IntDiffOperator.multiplication(int(self.token.value))


class Name(Symbol):
    kind = 'name'

    def nud(self) -> Any:
        name = self.token.value
        parser = self.parser
        if name == 'x':
            return IntDiffOperator.multiplication(ExpPoly.x())
        if name == 'D':
            return IntDiffOperator.diff(1)
        if name == 'A':
            return IntDiffOperator.integral()
        if name == 'E':
            parser.advance('lbrack')
            point = parser.point()
            parser.advance('rbrack')
            return IntDiffOperator.evaluation(point)
        if name == 'I':
            parser.advance('lbrack')
            a = parser.point()
            parser.advance('comma')
            b = parser.point()
            parser.advance('rbrack')
            integral = IntDiffOperator.integral()
            return (IntDiffOperator.evaluation(b) * integral -
                    IntDiffOperator.evaluation(a) * integral)
        if name == 'exp':
            parser.advance('lpar')
            argument = parser.expression(0)
            parser.advance('rpar')
            return IntDiffOperator.multiplication(
                _exponential(argument, parser, self.token))
        if name == 'inv':
            start = parser.token.token
            p = parser.problem_value(parser.primary(), start)
            return MethoriousOperator.inverse_of(p)
        raise parser.error(f'Unknown name {name!r}', self.token,
                           ['x', 'D', 'A', 'E', 'I', 'exp', 'inv'])


def _exponential(argument: Any, parser: 'Parser', token: Token) -> ExpPoly:
    """exp(mu*x + nu) as E(nu)*exp(mu*x) for rational mu and nu."""
    f = _function(argument)
    mu, nu = Fraction(0), Fraction(0)
    for (n, freq), c in (f.terms if f is not None else ()):
        if freq or n > 1 or not c.is_rational():
            f = None
            break
        if n:
            mu = c.to_fraction()
        else:
            nu = c.to_fraction()
    if f is None:
        raise parser.error('exp() needs a rational linear argument', token)
    return ExpPoly.monomial(0, mu, Scalar.exp(nu) if nu else 1)


class LeftParen(Symbol):
    kind = 'lpar'

    def nud(self) -> Any:
        parser = self.parser
        first = parser.expression(0)
        if parser.token.kind == 'comma':
            parser.advance('comma')
            parser.advance('lbrack')
            conditions = []
            if parser.token.kind != 'rbrack':
                conditions.append(parser.condition_value(parser.expression(0)))
                while parser.token.kind == 'comma':
                    parser.advance('comma')
                    conditions.append(
                        parser.condition_value(parser.expression(0)))
            parser.advance('rbrack')
            parser.advance('rpar')
            return parser.build_problem(first, conditions, self.token)
        parser.advance('rpar')
        return first


class Infix(Symbol):
    right_assoc = False

    def led(self, left: Any) -> Any:
        right = self.parser.expression(self.lbp - int(self.right_assoc))
        return self.parser.combine(self, left, right)


class Plus(Infix):
    kind = 'plus'
    lbp = 10


class Minus(Infix):
    kind = 'minus'
    lbp = 10

    def nud(self) -> Any:
        value = self.parser.expression(30)
        return self.parser.combine(self, IntDiffOperator.zero(), value)


class Mul(Infix):
    kind = 'mul'
    lbp = 20


class Div(Infix):
    kind = 'div'
    lbp = 20


class Pow(Infix):
    kind = 'pow'
    lbp = 40
    right_assoc = True

    def led(self, left: Any) -> Any:
        token = self.parser.token.token
        exponent = _constant(self.parser.expression(self.lbp - 1))
        if (exponent is None or not exponent.is_rational() or
                exponent.to_fraction().denominator != 1 or
                exponent.to_fraction() < 0):
            raise self.parser.error('Exponent must be a non-negative integer',
                                    token)
        if not isinstance(left, IntDiffOperator):
            raise self.parser.error('Only operators can be raised to a power',
                                    self.token)
        return left ** int(exponent.to_fraction())


class Passive(Symbol):
    """Delimiters that end an expression."""


SYMBOLS = {
    'end': End, 'number': Number, 'name': Name, 'lpar': LeftParen,
    'plus': Plus, 'minus': Minus, 'mul': Mul, 'div': Div, 'pow': Pow,
}
for _kind in ('rpar', 'lbrack', 'rbrack', 'comma'):
    SYMBOLS[_kind] = type(f'Passive_{_kind}', (Passive,), {'kind': _kind})


class Parser:
    """Parses one source text into an operator-ring value."""

    def __init__(self, source: str) -> None:
        self.source = source
        self._tokens = tokenize(source)
        self._last = Token('end', '', 1, 1)
        self.token: Symbol = None
        self.advance()

    def error(self, message: str, token: Token,
              expected: 'list[str]' = None) -> ParseError:
        return ParseError(message, token.line, token.column, expected)

    def advance(self, kind: str = None) -> Symbol:
        """Checks the current token kind, then moves to the next token."""
        if kind is not None and self.token.kind != kind:
            raise self.error(f'Unexpected {TOKEN_NAMES[self.token.kind]}',
                             self.token.token, [TOKEN_NAMES[kind]])
        try:
            token = next(self._tokens)
        except StopIteration:
            end = self._last
            token = Token('end', '', end.line,
                          end.column + len(end.value))
        self._last = token
        self.token = SYMBOLS[token.kind](self, token)
        return self.token

    def expression(self, rbp: int = 0) -> Any:
        symbol = self.token
        self.advance()
        left = symbol.nud()
        while rbp < self.token.lbp:
            symbol = self.token
            self.advance()
            left = symbol.led(left)
        return left

    def primary(self) -> Any:
        return self.expression(50)

    def parse(self) -> Any:
        if self.token.kind == 'end':
            raise self.error('Empty input', self.token.token, OPERAND_START)
        value = self.expression(0)
        if self.token.kind != 'end':
            raise self.error(f'Unexpected {TOKEN_NAMES[self.token.kind]}',
                             self.token.token,
                             ["'+'", "'-'", "'*'", "'/'", "'^'", 'end'])
        return value

    def point(self) -> Fraction:
        """A signed rational literal inside brackets."""
        negative = self.token.kind == 'minus'
        if negative:
            self.advance()
        token = self.token.token
        self.advance('number')
        value = Fraction(int(token.value))
        if self.token.kind == 'div':
            self.advance()
            token = self.token.token
            self.advance('number')
            if int(token.value) == 0:
                raise self.error('Zero denominator', token)
            value /= int(token.value)
        return -value if negative else value

    def condition_value(self, value: Any) -> StieltjesCondition:
        if isinstance(value, IntDiffOperator) and value.is_boundary():
            try:
                return StieltjesCondition.from_operator(value)
            except ValueError as err:
                raise self.error(str(err), self._last) from err
        raise self.error(f'{_describe(value)} is not a boundary condition',
                         self._last)

    def build_problem(self, operator: Any,
                      conditions: 'list[StieltjesCondition]',
                      token: Token) -> BoundaryProblem:
        if not isinstance(operator, IntDiffOperator):
            raise self.error('Problem operator must be differential', token)
        try:
            return BoundaryProblem(DiffOperator.from_operator(operator),
                                   conditions)
        except ValueError as err:
            raise self.error(str(err), token) from err

    def problem_value(self, value: Any, token: Token) -> BoundaryProblem:
        if not isinstance(value, BoundaryProblem):
            raise self.error(f'Expected a boundary problem, got'
                             f' {_describe(value)}', token)
        return value

    def combination(self, value: Any, token: Token) -> ProblemCombination:
        result = _to_combination(value)
        if result is not None:
            return result
        raise self.error(f'Expected a problem combination, got'
                         f' {_describe(value)}', token)

    def fraction(self, value: Any, token: Token) -> MethoriousOperator:
        if isinstance(value, MethoriousOperator):
            return value
        return MethoriousOperator.from_combination(
            self.combination(value, token))

    def combine(self, symbol: Symbol, left: Any, right: Any) -> Any:
        """Applies an infix operator across the value layers."""
        kind = symbol.kind
        token = symbol.token
        operators = (isinstance(left, IntDiffOperator) and
                     isinstance(right, IntDiffOperator))
        if kind == 'div':
            divisor = _constant(right)
            if divisor is None:
                raise self.error('Divisor must be a constant', token)
            if not divisor:
                raise self.error('Division by zero', token)
            if isinstance(left, IntDiffOperator):
                return IntDiffOperator.multiplication(divisor.inverse()) * left
            return self.combine(Mul(self, token),
                                IntDiffOperator.multiplication(
                                    divisor.inverse()), left)
        if operators:
            if kind == 'plus':
                return left + right
            if kind == 'minus':
                return left - right
            return left * right
        if isinstance(left, MethoriousOperator) or \
                isinstance(right, MethoriousOperator):
            a, b = self.fraction(left, token), self.fraction(right, token)
            if kind == 'plus':
                return a + b
            if kind == 'minus':
                return a - b
            if a.num == ProblemCombination.identity() and b.den.is_identity():
                return MethoriousOperator(a.den, b.num)
            return a * b
        a, b = self.combination(left, token), self.combination(right, token)
        if kind == 'plus':
            return a + b
        if kind == 'minus':
            return a - b
        return a * b


def _describe(value: Any) -> str:
    if isinstance(value, IntDiffOperator):
        return f'operator {value.render()}'
    return f'{value.__class__.__name__} {value.render()}'


def _parse(source: str) -> Any:
    return Parser(source).parse()


def _wrong_type(source: str, what: str, value: Any) -> ParseError:
    return ParseError(f'{source!r} is not {what}: {_describe(value)}')


def parse_op(source: str) -> IntDiffOperator:
    """Parses an integro-differential operator.

    Raises:
        ParseError with position and expected tokens.

    """
    value = _parse(source)
    if not isinstance(value, IntDiffOperator):
        raise _wrong_type(source, 'an operator', value)
    return value


def parse_expr(source: str) -> ExpPoly:
    """Parses an exponential polynomial such as `x^2/2 - x*exp(-x)`."""
    value = _parse(source)
    f = _function(value)
    if f is None:
        raise _wrong_type(source, 'a function', value)
    return f


def parse_scalar(source: str) -> Scalar:
    """Parses a constant such as `1/2` or `exp(1) - 1`."""
    value = _parse(source)
    c = _constant(value)
    if c is None:
        raise _wrong_type(source, 'a constant', value)
    return c


def parse_condition(source: str) -> StieltjesCondition:
    """Parses a Stieltjes condition such as `E[0]*D - 2*I[0,1]*x`."""
    value = _parse(source)
    if isinstance(value, IntDiffOperator) and value.is_boundary():
        try:
            return StieltjesCondition.from_operator(value)
        except ValueError as err:
            raise ParseError(str(err)) from err
    raise _wrong_type(source, 'a boundary condition', value)


def parse_diff_operator(source: str, **kwargs) -> DiffOperator:
    """Parses a monic differential operator such as `D^2 - 1`."""
    op = parse_op(source)
    try:
        return DiffOperator.from_operator(op, **kwargs)
    except ValueError as err:
        raise ParseError(str(err)) from err


def parse_problem_text(source: str) -> BoundaryProblem:
    """Parses `(T, [B...])`."""
    value = _parse(source)
    if not isinstance(value, BoundaryProblem):
        raise _wrong_type(source, 'a boundary problem', value)
    return value


def parse_combination(source: str) -> ProblemCombination:
    """Parses a rational combination such as `(D, [E[0]]) - (D, [E[1]])`."""
    value = _parse(source)
    result = _to_combination(value)
    if result is None:
        raise _wrong_type(source, 'a problem combination', value)
    return result


def parse_fraction(source: str) -> MethoriousOperator:
    """Parses `inv(T, [B...]) * (combination)` or a plain combination."""
    value = _parse(source)
    if isinstance(value, MethoriousOperator):
        return value
    return MethoriousOperator.from_combination(parse_combination(source))


class ProblemSpec:
    """A boundary problem as stored in JSON files.

    Attributes:
        T: The operator text.
        conditions: The condition texts.
        fundamental_system: Optional user-supplied kernel basis texts.
        values: Optional prescribed boundary values.
        f: Optional forcing function text.

    """
    __slots__ = ('T', 'conditions', 'fundamental_system', 'values', 'f')

    def __init__(self, T: str, conditions: 'list[str]' = None,
                 fundamental_system: 'list[str]' = None,
                 values: 'list[str]' = None,
                 f: str = None) -> None:   # pylint: disable=invalid-name
        if not isinstance(T, str):
            raise ParseError('Problem spec needs an operator string "T"')
        self.T = T   # pylint: disable=invalid-name
        self.conditions = [str(c) for c in conditions or []]
        self.fundamental_system = ([str(u) for u in fundamental_system]
                                   if fundamental_system else None)
        self.values = [str(v) for v in values] if values is not None else None
        self.f = str(f) if f is not None else None

    @classmethod
    def from_dict(cls, obj: dict) -> 'ProblemSpec':
        if not isinstance(obj, dict):
            raise ParseError('Problem spec must be a JSON object')
        unknown = set(obj) - set(cls.__slots__)
        if unknown:
            raise ParseError(f'Unknown problem spec keys {sorted(unknown)}')
        if 'T' not in obj:
            raise ParseError('Problem spec needs an operator string "T"',
                             expected=['"T"'])
        return cls(**obj)

    @classmethod
    def from_json(cls, source: str) -> 'ProblemSpec':
        """Reads a spec from a file path, `-` for stdin, or inline JSON.

        Raises:
            ParseError on malformed JSON or missing fields.

        """
        if source == '-':
            text = sys.stdin.read()
        elif os.path.isfile(source):
            with open(source, encoding='utf-8') as f:
                text = f.read()
        else:
            text = source
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as err:
            raise ParseError(err.msg, err.lineno, err.colno) from err
        return cls.from_dict(obj)

    def operator(self) -> DiffOperator:
        kwargs = {}
        if self.fundamental_system is not None:
            kwargs['fundamental_system'] = [
                _field(parse_expr, u, 'fundamental_system')
                for u in self.fundamental_system]
        return _field(lambda s: parse_diff_operator(s, **kwargs), self.T, 'T')

    def problem(self) -> BoundaryProblem:
        return parse_problem(self)

    def boundary_values(self) -> 'list[Scalar]':
        return [_field(parse_scalar, v, 'values') for v in self.values or []]

    def forcing(self) -> ExpPoly:
        return _field(parse_expr, self.f, 'f') if self.f else ExpPoly()

    def json(self) -> dict:
        obj = {'T': self.T, 'conditions': list(self.conditions)}
        if self.fundamental_system is not None:
            obj['fundamental_system'] = list(self.fundamental_system)
        if self.values is not None:
            obj['values'] = list(self.values)
        if self.f is not None:
            obj['f'] = self.f
        return obj

    @classmethod
    def from_problem(cls, p: BoundaryProblem) -> 'ProblemSpec':
        obj = p.json()
        return cls(obj['T'], obj['conditions'])


def _field(parse, text: str, name: str) -> Any:
    try:
        return parse(text)
    except ParseError as err:
        raise ParseError(f'In field "{name}": {text!r}', err.line,
                         err.column, err.expected) from err


def parse_problem(spec: 'ProblemSpec|dict|str') -> BoundaryProblem:
    """Builds the boundary problem of a spec.

    Args:
        spec: A ProblemSpec, its dict form, or `(T, [B...])` text.

    Raises:
        ParseError on malformed fields.
        DependentConditions if the conditions are linearly dependent.

    """
    if isinstance(spec, str):
        return parse_problem_text(spec)
    if isinstance(spec, dict):
        spec = ProblemSpec.from_dict(spec)
    operator = spec.operator()
    conditions = [_field(parse_condition, c, 'conditions')
                  for c in spec.conditions]
    _log.debug('Parsed problem spec %s', spec.json())
    return BoundaryProblem(operator, conditions)
