import json
import logging
import os

import pytest

from pymethcalc.methorious import ExitCode
from pymethcalc.methorious.cli import build_parser, run

logging.basicConfig()
logger = logging.getLogger()

EXPORT_DIR = os.getenv('EXPORT_DIR', 'tests/examples')


@pytest.fixture
def example_path():
    """Returns a builder of paths into the example directory."""
    def _example_path(filename: str) -> str:
        return os.path.join(os.getcwd(), EXPORT_DIR, filename)
    return _example_path


@pytest.fixture
def run_json(capsys):
    """Returns a runner that parses the JSON output of a command."""
    def _run_json(*argv: str) -> 'tuple[int, dict]':
        code = run(['--format', 'json', *argv])
        out = capsys.readouterr().out
        logger.debug('%s -> %s', argv, out)
        return code, json.loads(out)
    return _run_json


@pytest.fixture
def run_plain(capsys):
    """Returns a runner that captures the plain output of a command."""
    def _run_plain(*argv: str) -> 'tuple[int, str]':
        code = run(list(argv))
        return code, capsys.readouterr().out.strip()
    return _run_plain


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_greens(example_path, run_json):
    code, obj = run_json('greens', example_path('second_order.json'),
                         '--apply', '1', '--projector')
    assert code == ExitCode.OK
    assert obj['schema'] == 1
    assert obj['command'] == 'greens'
    assert obj['applied']['value'] == 'x^2/2 - x/2'
    assert obj['well_posed'] is True
    assert 'projector' in obj


def test_greens_ill_posed(example_path, run_json):
    code, obj = run_json('greens', example_path('ill_posed.json'))
    assert code == ExitCode.OK
    assert obj['well_posed'] is False


def test_greens_latex(capsys):
    assert run(['--format', 'latex', 'greens', '(D, [E[0]])']) == 0
    assert capsys.readouterr().out.startswith('G = ')


def test_solve(example_path, run_plain):
    assert run_plain('solve', example_path('inhomogeneous.json')) == \
        (ExitCode.OK, 'u = x^2/2 + x/2')
    assert run_plain('solve', '(D^2, [E[0], E[1]])', '--values', '0', '1') == \
        (ExitCode.OK, 'u = x')
    code, _ = run_plain('solve', '(D^2, [E[0], E[1]])', '--values', '1')
    assert code == ExitCode.FAILURE


def test_mul_and_factor(run_json):
    code, obj = run_json('mul', '(D, [I[0,1]])', '(D, [E[0]])')
    assert code == ExitCode.OK
    assert obj['product']['T'] == 'D^2'
    assert obj['anti_isomorphism'] is True
    code, obj = run_json('factor', '(D^2, [E[0], E[1]])', '--left', 'D')
    assert code == ExitCode.OK
    assert obj['left'] == {'T': 'D', 'conditions': ['I[0,1]']}
    assert obj['right'] == {'T': 'D', 'conditions': ['E[0]']}
    assert obj['product_matches'] is True


def test_regularize(run_json):
    code, obj = run_json('regularize', '(D, [E[0], E[1]])')
    assert code == ExitCode.OK
    assert obj['regularized']['T'] == 'D^2'
    assert obj['regular'] is True


def test_umbral(run_plain):
    code, out = run_plain('umbral', 'E[1] - E[0]')
    assert code == ExitCode.OK
    assert out.splitlines()[:3] == ['b_0 = 0', 'b_1 = 1', 'b_2 = 1/2']
    assert out.endswith('minimal monomial: x^1')


def test_ore(run_json, run_plain):
    code, obj = run_json('orequad', '(D, [E[0]])', '(D, [E[1]])')
    assert code == ExitCode.OK
    assert obj['q1'] == obj['q2'] == {'T': 'D', 'conditions': ['I[0,1]']}
    assert obj['consistent'] is True
    code, obj = run_json('fracadd', 'inv(D, [E[0]])', 'inv(D, [E[1]])')
    assert code == ExitCode.OK
    assert obj['den']['T'] == 'D^2'
    assert obj['num'] == [{'coeff': '2',
                           'problem': {'T': 'D', 'conditions': ['I[0,1]']}}]
    code, obj = run_json('fracmul', 'inv(D, [E[0]])', 'inv(D, [E[1]])')
    assert code == ExitCode.OK
    assert obj['den']['T'] == 'D^2'


def test_kernel(run_plain):
    assert run_plain('kernel', '(D, [E[0]]) - (D, [E[1]])') == \
        (ExitCode.OK, '(D, [I[0,1]])')
    assert run_plain('kernel', '(D, [E[0]])') == \
        (ExitCode.FAILURE, 'no witness found')


def test_act(run_plain):
    assert run_plain('act', '(D, [I[0,1]])', 'x') == \
        (ExitCode.OK, '1 + 1/2:(D, [I[0,1]])')
    assert run_plain('act', '(D^2, [E[0], E[1]])', '1', '--inverse') == \
        (ExitCode.OK, 'x^2/2 - x/2')


def test_deltatable(run_plain):
    code, out = run_plain('deltatable')
    assert code == ExitCode.OK
    lines = out.splitlines()
    assert len(lines) == 3
    assert lines[0] == "(D, [E[0]]) . f = f' + [E[0]](f) * 1:(D, [E[0]])"
    assert run_plain('deltatable', 'E[1] - E[0]')[0] == ExitCode.SINGULAR


def test_selftest(run_json):
    code, obj = run_json('--seed', '3', 'selftest', '--count', '5')
    assert code == ExitCode.OK
    assert obj['failures'] == []


def test_verify(example_path, run_json):
    code, obj = run_json('verify', example_path('second_order.json'),
                         '--f', 'exp(x)')
    assert code == ExitCode.OK
    assert obj['passed'] is True
    assert obj['max_deviation'] < 1e-6


def test_exit_codes(run_plain):
    assert run_plain('greens', '(D^2, [E[0], E[')[0] == ExitCode.PARSE
    assert run_plain('greens', 'not json')[0] == ExitCode.PARSE
    assert run_plain('greens', '(D, [E[1] - E[0]])')[0] == ExitCode.SINGULAR
    assert run_plain('greens', '(D - x, [E[0]])')[0] == ExitCode.UNSUPPORTED
    assert run_plain('--bound', '2', 'umbral', 'E[0]*D^3')[0] == \
        ExitCode.SEARCH_EXCEEDED
