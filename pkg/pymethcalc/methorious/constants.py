import os
from enum import IntEnum


class OutputFormat(IntEnum):
    PLAIN = 1
    JSON = 2
    LATEX = 3


class ExitCode(IntEnum):
    OK = 0
    FAILURE = 1
    PARSE = 2
    SINGULAR = 3
    UNSUPPORTED = 4
    SEARCH_EXCEEDED = 5


class Verdict(IntEnum):
    """Three-valued answer of the equality oracles."""
    EQUAL = 1
    NOT_EQUAL = 2
    UNKNOWN = 3


class TermKind(IntEnum):
    """Basis monomials of F[D] + F[A] + (Phi), in canonical sort order."""
    DIFF = 1
    INTEG = 2
    LOCAL = 3
    GLOBAL = 4


DEFAULT_UMBRAL_BOUND = int(os.getenv('PYMETHCALC_UMBRAL_BOUND', '50'))
DEFAULT_FLOAT_TOL = float(os.getenv('PYMETHCALC_FLOAT_TOL', '1e-12'))
MAX_PRECISION_DOUBLINGS = 12
START_PRECISION = 53

WITNESS_EXTRA_ORDER = 2
WITNESS_INTEGRAL_DEGREE = 1
INFLATION_EXTRA_ORDER = 2

VERIFY_SAMPLES = 11
SIMPSON_TOL = 1e-10
SIMPSON_MAX_DEPTH = 40

JSON_SCHEMA_VERSION = 1

PROBE_FUNCTIONS = ['1', 'x', 'x^2', 'exp(x)', 'x*exp(2*x)']

OUTPUT_FORMATS = {
    'plain': OutputFormat.PLAIN,
    'json': OutputFormat.JSON,
    'latex': OutputFormat.LATEX,
}
