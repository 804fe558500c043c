from .constant import ExpConstant, Scalar, eval_float, scalar_inv
from .exppoly import Character, ExpPoly, antider, derive, evaluate, integrate
from .helpers import (EchelonBasis, bareiss_det, falling_factorial,
                      matrix_inverse, superfactorial, to_fraction)

__all__ = [
    'Character',
    'EchelonBasis',
    'ExpConstant',
    'ExpPoly',
    'Scalar',
    'antider',
    'bareiss_det',
    'derive',
    'eval_float',
    'evaluate',
    'falling_factorial',
    'integrate',
    'matrix_inverse',
    'scalar_inv',
    'superfactorial',
    'to_fraction',
]
