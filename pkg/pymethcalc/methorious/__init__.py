from .algebra import Character, ExpConstant, ExpPoly, Scalar, eval_float
from .constants import (DEFAULT_UMBRAL_BOUND, ExitCode, OutputFormat,
                        TermKind, Verdict)
from .exceptions import (ConsistencyError, DependentConditions,
                         DimensionMismatch, DivisionByZero, DuplicatePoints,
                         FactorMismatch, NotLeftDivisible, ParseError,
                         PrecisionExhausted, SingularProblem,
                         UmbralSearchExceeded, UnsupportedOperator,
                         ZeroCondition)
from .methfun import (IdealElement, MethoriousFunction,
                      MethoriousHyperfunction, act, apply_inverse,
                      fundamental_formula, hyper_act, hyper_eq, mf_eq,
                      solve_bvp)
from .operators import (IntDiffOperator, OperatorTerm, StieltjesCondition,
                        cond_apply, cond_compose, op_apply, op_mul)
from .ore import (MethoriousOperator, ProblemCombination, frac_add, frac_eq,
                  frac_mul, kernel_witness, ore_quadruple)
from .parser import (ProblemSpec, parse_combination, parse_condition,
                     parse_expr, parse_fraction, parse_op, parse_problem)
from .problems import (BoundaryProblem, DiffOperator, bp_mul, divide_left,
                       fundamental_right_inverse, fundamental_system,
                       greens_operator, is_regular, is_well_posed, projector)
from .umbral import (block_vandermonde_det, minimal_monomial, regularize,
                     umbral_coefficients)

__all__ = [
    'BoundaryProblem',
    'Character',
    'ConsistencyError',
    'DEFAULT_UMBRAL_BOUND',
    'DependentConditions',
    'DiffOperator',
    'DimensionMismatch',
    'DivisionByZero',
    'DuplicatePoints',
    'ExitCode',
    'ExpConstant',
    'ExpPoly',
    'FactorMismatch',
    'IdealElement',
    'IntDiffOperator',
    'MethoriousFunction',
    'MethoriousHyperfunction',
    'MethoriousOperator',
    'NotLeftDivisible',
    'OperatorTerm',
    'OutputFormat',
    'ParseError',
    'PrecisionExhausted',
    'ProblemCombination',
    'ProblemSpec',
    'Scalar',
    'SingularProblem',
    'StieltjesCondition',
    'TermKind',
    'UmbralSearchExceeded',
    'UnsupportedOperator',
    'Verdict',
    'ZeroCondition',
    'act',
    'apply_inverse',
    'block_vandermonde_det',
    'bp_mul',
    'cond_apply',
    'cond_compose',
    'divide_left',
    'eval_float',
    'frac_add',
    'frac_eq',
    'frac_mul',
    'fundamental_formula',
    'fundamental_right_inverse',
    'fundamental_system',
    'greens_operator',
    'hyper_act',
    'hyper_eq',
    'is_regular',
    'is_well_posed',
    'kernel_witness',
    'mf_eq',
    'minimal_monomial',
    'op_apply',
    'op_mul',
    'ore_quadruple',
    'parse_combination',
    'parse_condition',
    'parse_expr',
    'parse_fraction',
    'parse_op',
    'parse_problem',
    'projector',
    'regularize',
    'solve_bvp',
    'umbral_coefficients',
]
