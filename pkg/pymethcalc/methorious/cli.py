"""Command line interface for the methorious calculus.

Problems are given as a JSON spec file, `-` for stdin, inline JSON such as
`{"T": "D^2", "conditions": ["E[0]", "E[1]"]}` or the text `(D^2, [E[0], E[1]])`.
"""
import argparse
import json
import logging
import random
import sys
from fractions import Fraction

import mpmath

from .algebra.constant import Scalar, eval_float
from .algebra.exppoly import ExpPoly
from .constants import (DEFAULT_UMBRAL_BOUND, JSON_SCHEMA_VERSION,
                        OUTPUT_FORMATS, SIMPSON_MAX_DEPTH, SIMPSON_TOL,
                        TermKind, VERIFY_SAMPLES, ExitCode, OutputFormat)
from .exceptions import (ParseError, SingularProblem, UmbralSearchExceeded,
                         UnsupportedOperator)
from .methfun import act, apply_inverse, fundamental_formula, solve_bvp
from .ore import (frac_add, frac_mul, kernel_consistency, kernel_witness,
                  ore_quadruple)
from .parser import (ProblemSpec, parse_combination, parse_condition,
                     parse_diff_operator, parse_expr, parse_fraction,
                     parse_problem, parse_scalar)
from .problems import (BoundaryProblem, bp_mul, exact_left_quotient,
                       greens_of_product, greens_operator, is_regular,
                       is_well_posed, lift_factorization, projector)
from .sampling import random_exppoly, random_problem
from .umbral import minimal_monomial, regularize, umbral_coefficients

_log = logging.getLogger(__name__)

DEFAULT_CONDITIONS = ['E[0]', 'E[1]', 'I[0,1]']
SELFTEST_COUNT = 200


class Result:
    """Command output in its three renderings."""
    __slots__ = ('plain', 'latex', 'obj', 'code')

    def __init__(self, plain: str, obj: dict, latex: str = None,
                 code: ExitCode = ExitCode.OK) -> None:
        self.plain = plain
        self.latex = latex if latex is not None else plain
        self.obj = obj
        self.code = code

    def output(self, fmt: OutputFormat, command: str) -> str:
        if fmt == OutputFormat.JSON:
            obj = {'schema': JSON_SCHEMA_VERSION, 'command': command}
            obj.update(self.obj)
            return json.dumps(obj, indent=2)
        if fmt == OutputFormat.LATEX:
            return self.latex
        return self.plain


def _problem(source: str) -> BoundaryProblem:
    if source.lstrip().startswith('('):
        return parse_problem(source)
    return parse_problem(ProblemSpec.from_json(source))


def _spec(source: str) -> ProblemSpec:
    if source.lstrip().startswith('('):
        return ProblemSpec.from_problem(parse_problem(source))
    return ProblemSpec.from_json(source)


def cmd_greens(args: argparse.Namespace) -> Result:
    p = _problem(args.problem)
    g = greens_operator(p)
    obj = {'problem': p.json(), 'greens': g.json(),
           'well_posed': is_well_posed(p)}
    plain = f'G = {g.render()}'
    latex = f'G = {g.latex()}'
    if args.projector:
        obj['projector'] = projector(p).json()
        plain += f'\nP = {projector(p).render()}'
    if args.apply:
        f = parse_expr(args.apply)
        value = g.apply(f)
        obj['applied'] = {'f': f.render(), 'value': value.render()}
        plain += f'\nG({f.render()}) = {value.render()}'
        latex += f'\\\\ G({f.latex()}) = {value.latex()}'
    return Result(plain, obj, latex)


def cmd_solve(args: argparse.Namespace) -> Result:
    spec = _spec(args.problem)
    p = parse_problem(spec)
    f = parse_expr(args.f) if args.f else spec.forcing()
    if args.values is not None:
        values = [parse_scalar(v) for v in args.values]
    elif spec.values is not None:
        values = spec.boundary_values()
    else:
        values = [Scalar(0)] * p.dimension
    u = solve_bvp(p.operator, list(p.conditions), f, values)
    obj = {'problem': p.json(), 'f': f.render(),
           'values': [v.render() for v in values], 'u': u.render()}
    return Result(f'u = {u.render()}', obj, f'u = {u.latex()}')


def cmd_mul(args: argparse.Namespace) -> Result:
    p1, p2 = _problem(args.left), _problem(args.right)
    product = bp_mul(p1, p2)
    obj = {'product': product.json()}
    plain = product.render()
    if is_regular(p1) and is_regular(p2):
        g = greens_of_product(p1, p2)
        obj['greens'] = g.json()
        obj['anti_isomorphism'] = g == greens_operator(product)
        plain += f'\nG = {g.render()}'
    return Result(plain, obj, product.latex())


def cmd_factor(args: argparse.Namespace) -> Result:
    p = _problem(args.problem)
    t1 = parse_diff_operator(args.left)
    t2 = (parse_diff_operator(args.right) if args.right
          else exact_left_quotient(p.operator, t1))
    p1, p2 = lift_factorization(p, t1, t2)
    obj = {'left': p1.json(), 'right': p2.json(),
           'product_matches': bp_mul(p1, p2) == p}
    return Result(f'{p1.render()} * {p2.render()}', obj,
                  f'{p1.latex()} {p2.latex()}')


def cmd_regularize(args: argparse.Namespace) -> Result:
    p = _problem(args.problem)
    result = regularize(p, args.bound)
    obj = {'problem': p.json(), 'regularized': result.json(),
           'regular': is_regular(result)}
    return Result(result.render(), obj, result.latex())


def cmd_umbral(args: argparse.Namespace) -> Result:
    beta = parse_condition(args.condition)
    expansion = umbral_coefficients(beta, args.bound)
    m = minimal_monomial(beta, args.bound)
    obj = expansion.json()
    obj['minimal_monomial'] = m
    plain = '\n'.join(f'b_{k} = {b.render()}'
                      for k, b in enumerate(expansion))
    return Result(f'{plain}\nminimal monomial: x^{m}', obj)


def cmd_orequad(args: argparse.Namespace) -> Result:
    p1, p2 = _problem(args.left), _problem(args.right)
    q1, q2 = ore_quadruple(p1, p2, args.bound)
    common = bp_mul(q1, p1)
    obj = {'q1': q1.json(), 'q2': q2.json(), 'common': common.json(),
           'consistent': common == bp_mul(q2, p2)}
    plain = f'q1 = {q1.render()}\nq2 = {q2.render()}\ncommon = {common.render()}'
    return Result(plain, obj)


def cmd_fracmul(args: argparse.Namespace) -> Result:
    result = frac_mul(parse_fraction(args.left), parse_fraction(args.right),
                      args.bound)
    return Result(result.render(), result.json())


def cmd_fracadd(args: argparse.Namespace) -> Result:
    result = frac_add(parse_fraction(args.left), parse_fraction(args.right),
                      args.bound)
    return Result(result.render(), result.json())


def cmd_kernel(args: argparse.Namespace) -> Result:
    r = parse_combination(args.combination)
    witness = kernel_witness(r, bound=args.bound)
    obj = {'combination': r.json(),
           'witness': witness.json() if witness is not None else None,
           'consistent': kernel_consistency(r)}
    plain = witness.render() if witness is not None else 'no witness found'
    return Result(plain, obj,
                  code=ExitCode.OK if witness is not None else ExitCode.FAILURE)


def cmd_act(args: argparse.Namespace) -> Result:
    p = _problem(args.problem)
    f = parse_expr(args.function)
    m = apply_inverse(p, f) if args.inverse else act(p, f)
    return Result(m.render(), {'problem': p.json(), 'f': f.render(),
                               'result': m.json()})


def cmd_deltatable(args: argparse.Namespace) -> Result:
    rows = []
    for text in args.conditions or DEFAULT_CONDITIONS:
        formula = fundamental_formula(parse_condition(text))
        rows.append(formula)
    obj = {'formulae': [{'condition': r.condition.render(),
                         'problem': r.problem.json(),
                         'weight': r.weight.render(),
                         'text': r.render()} for r in rows]}
    return Result('\n'.join(r.render() for r in rows), obj)


def axiom_failures(f: ExpPoly, g: ExpPoly) -> 'list[str]':
    """Names of the integro-differential algebra identities failing on f, g."""
    failures = []
    df, dg = f.derive(), g.derive()
    checks = {
        'section': f.integrate().derive() == f,
        'leibniz': (f * g).derive() == df * g + f * dg,
        'differential_baxter': (df.integrate() * dg.integrate() +
                                (f * g).derive().integrate() ==
                                df.integrate() * g + f * dg.integrate()),
        'integration_by_parts': ((f * g).integrate() ==
                                 f * g.integrate() -
                                 (df * g.integrate()).integrate()),
        'baxter': (f.integrate() * g.integrate() ==
                   (f * g.integrate()).integrate() +
                   (g * f.integrate()).integrate()),
        'evaluation': ((f * g) - (f * g).derive().integrate() ==
                       ExpPoly.constant(f.evaluate(0) * g.evaluate(0))),
    }
    for name, passed in checks.items():
        if not passed:
            _log.error('Identity %s fails on %s, %s', name, f, g)
            failures.append(name)
    return failures


def cmd_selftest(args: argparse.Namespace) -> Result:
    rng = random.Random(args.seed)
    failures = []
    for _ in range(args.count):
        f, g = random_exppoly(rng), random_exppoly(rng)
        failures.extend(f'{name}: {f}, {g}' for name in axiom_failures(f, g))
    second = parse_problem('(D^2, [E[0], E[1]])')
    if greens_operator(second).apply(ExpPoly.constant(1)) != \
            parse_expr('x^2/2 - x/2'):
        failures.append('greens: (D^2, [E[0], E[1]])')
    for _ in range(min(args.count, 10)):
        p1, p2 = random_problem(rng), random_problem(rng)
        if greens_of_product(p1, p2) != greens_operator(bp_mul(p1, p2)):
            failures.append(f'anti_isomorphism: {p1}, {p2}')
    obj = {'seed': args.seed, 'count': args.count, 'failures': failures}
    plain = '\n'.join(failures) if failures else \
        f'all identities hold on {args.count} samples'
    return Result(plain, obj,
                  code=ExitCode.FAILURE if failures else ExitCode.OK)


def _simpson(func, a: mpmath.mpf, b: mpmath.mpf, tol: float,
             depth: int = SIMPSON_MAX_DEPTH) -> mpmath.mpf:
    """Adaptive Simpson quadrature with Richardson correction."""
    def step(a, b, fa, fm, fb, whole, tol, depth):
        m = (a + b) / 2
        lm, rm = (a + m) / 2, (m + b) / 2
        flm, frm = func(lm), func(rm)
        left = (m - a) / 6 * (fa + 4 * flm + fm)
        right = (b - m) / 6 * (fm + 4 * frm + fb)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15 * tol:
            return left + right + delta / 15
        return (step(a, m, fa, flm, fm, left, tol / 2, depth - 1) +
                step(m, b, fm, frm, fb, right, tol / 2, depth - 1))

    if a == b:
        return mpmath.mpf(0)
    fa, fb, fm = func(a), func(b), func((a + b) / 2)
    whole = (b - a) / 6 * (fa + 4 * fm + fb)
    return step(a, b, fa, fm, fb, whole, tol, depth)


def numeric_greens(g, f: ExpPoly, x: Fraction) -> mpmath.mpf:
    """Evaluates (G f)(x) from the normal form with quadrature for integrals."""
    xf = mpmath.mpf(x.numerator) / x.denominator
    total = mpmath.mpf(0)
    for key, left in g.entries.items():
        kind = key[0]
        if kind == TermKind.DIFF:
            value = f.derive_n(key[1]).evaluate_float(xf)
        elif kind == TermKind.LOCAL:
            value = f.derive_n(key[2]).evaluate_float(
                mpmath.mpf(key[1].numerator) / key[1].denominator)
        else:
            right = ExpPoly.monomial(*key[-1])
            upper = xf if kind == TermKind.INTEG else \
                mpmath.mpf(key[1].numerator) / key[1].denominator
            value = _simpson(lambda t, r=right: r.evaluate_float(t) *
                             f.evaluate_float(t),
                             mpmath.mpf(0), upper, SIMPSON_TOL)
        total += left.evaluate_float(xf) * value
    return total


def cmd_verify(args: argparse.Namespace) -> Result:
    spec = _spec(args.problem)
    p = parse_problem(spec)
    f = parse_expr(args.f) if args.f else spec.forcing()
    values = spec.boundary_values() if spec.values is not None else \
        [Scalar(0)] * p.dimension
    u = solve_bvp(p.operator, list(p.conditions), f, values)
    g = greens_operator(p)
    homogeneous = u - g.apply(f)
    deviation = 0.0
    samples = []
    for k in range(VERIFY_SAMPLES):
        x = Fraction(k, VERIFY_SAMPLES - 1)
        exact = eval_float(u.evaluate(x))
        numeric = numeric_greens(g, f, x) + \
            homogeneous.evaluate_float(mpmath.mpf(x.numerator) / x.denominator)
        error = abs(float(numeric) - exact)
        deviation = max(deviation, error)
        samples.append({'x': str(x), 'exact': exact,
                        'quadrature': float(numeric)})
    passed = deviation < args.tolerance
    obj = {'problem': p.json(), 'u': u.render(), 'samples': samples,
           'max_deviation': deviation, 'passed': passed}
    plain = f'u = {u.render()}\nmax deviation {deviation:.3e}'
    return Result(plain, obj,
                  code=ExitCode.OK if passed else ExitCode.FAILURE)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='pymethcalc',
        description='Exact calculus of boundary problems and methorious operators')
    parser.add_argument('--format', choices=list(OUTPUT_FORMATS),
                        default='plain', help='output rendering')
    parser.add_argument('--bound', type=int, default=DEFAULT_UMBRAL_BOUND,
                        help='umbral monomial search bound')
    parser.add_argument('--seed', type=int, default=0,
                        help='seed of randomized suites')
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='debug logging')
    sub = parser.add_subparsers(dest='command', required=True)

    def command(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = command('greens', cmd_greens, "Green's operator of a regular problem")
    p.add_argument('problem')
    p.add_argument('--apply', metavar='F', help='also apply G to F')
    p.add_argument('--projector', action='store_true', help='also print P')
    p = command('solve', cmd_solve, 'solve T u = f with boundary values')
    p.add_argument('problem')
    p.add_argument('--f', metavar='F', help='forcing function')
    p.add_argument('--values', nargs='*', metavar='C',
                   help='rational boundary values')
    p = command('mul', cmd_mul, 'product of two problems')
    p.add_argument('left')
    p.add_argument('right')
    p = command('factor', cmd_factor, 'lift an operator factorization')
    p.add_argument('problem')
    p.add_argument('--left', required=True, metavar='T1')
    p.add_argument('--right', metavar='T2')
    p = command('regularize', cmd_regularize, 'embed into a regular problem')
    p.add_argument('problem')
    p = command('umbral', cmd_umbral, 'umbral coefficients of a condition')
    p.add_argument('condition')
    p = command('orequad', cmd_orequad, 'Ore quadruple of two problems')
    p.add_argument('left')
    p.add_argument('right')
    p = command('fracmul', cmd_fracmul, 'product of two fractions')
    p.add_argument('left')
    p.add_argument('right')
    p = command('fracadd', cmd_fracadd, 'sum of two fractions')
    p.add_argument('left')
    p.add_argument('right')
    p = command('kernel', cmd_kernel, 'kernel witness of a combination')
    p.add_argument('combination')
    p = command('act', cmd_act, 'act with a problem on a function')
    p.add_argument('problem')
    p.add_argument('function')
    p.add_argument('--inverse', action='store_true',
                   help='act with the inverse fraction')
    p = command('deltatable', cmd_deltatable, 'fundamental formulae')
    p.add_argument('conditions', nargs='*')
    p = command('selftest', cmd_selftest, 'randomized identity suite')
    p.add_argument('--count', type=int, default=SELFTEST_COUNT)
    p = command('verify', cmd_verify, 'numeric cross-check of solve')
    p.add_argument('problem')
    p.add_argument('--f', metavar='F', help='forcing function')
    p.add_argument('--tolerance', type=float, default=1e-6)
    return parser


EXIT_CODES = [
    (ParseError, ExitCode.PARSE),
    (SingularProblem, ExitCode.SINGULAR),
    (UnsupportedOperator, ExitCode.UNSUPPORTED),
    (UmbralSearchExceeded, ExitCode.SEARCH_EXCEEDED),
    (ValueError, ExitCode.FAILURE),
    (ArithmeticError, ExitCode.FAILURE),
]


def run(argv: 'list[str]' = None) -> int:
    """Runs one command and returns its exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        result = args.handler(args)
    except (ValueError, ArithmeticError) as err:
        for cls, code in EXIT_CODES:
            if isinstance(err, cls):
                print(f'error: {err}', file=sys.stderr)
                return int(code)
        raise
    print(result.output(OUTPUT_FORMATS[args.format], args.command))
    return int(result.code)


def main() -> None:
    sys.exit(run())


if __name__ == '__main__':
    main()
