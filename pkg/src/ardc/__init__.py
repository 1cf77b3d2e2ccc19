"""Adaptive Riccati defect correction for ``u'' + 2 gamma u' + omega^2 u = 0``.

The public entry points are :func:`solve`, :func:`dense_eval` and
:func:`condition_estimate`; problems are built with
:class:`InitialValueProblem` or :func:`builtin_ivp`.
"""

from ._kernels import BACKEND
from .errors import (ARDCError, DegenerateDenominatorError, DegenerateMatchingError,
                     DomainError, InvalidBallError, InvalidParameterError,
                     NumericalFailureError, OracleRefusal, OutOfRangeError,
                     StepUnderflowError)
from .problem import (BuiltinProblem, CoefficientPair, InitialValueProblem, builtin_ivp)
from .solver import (SolveReport, SolverOptions, StepRecord, Stats, condition_estimate,
                     dense_eval, kappa_profile, solve)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ARDCError", "DegenerateDenominatorError", "DegenerateMatchingError",
    "DomainError", "InvalidBallError", "InvalidParameterError", "NumericalFailureError",
    "OracleRefusal", "OutOfRangeError", "StepUnderflowError", "BuiltinProblem",
    "CoefficientPair", "InitialValueProblem", "builtin_ivp", "SolveReport", "SolverOptions",
    "StepRecord", "Stats", "condition_estimate", "dense_eval", "kappa_profile", "solve",
]
