"""Pole-expansion approximations of the gamma function.

Coefficients for the Spouge, Lanczos, interpolating, least-squares and
Stirling-derived expansions are generated at extended precision
(:mod:`polegamma.schemes`), checked against a shifted Stirling reference
(:mod:`polegamma.kernels`, :mod:`polegamma.analysis`) and evaluated in
double precision over the whole complex plane (:mod:`polegamma.evaluator`).
"""

from .evaluator import (
    GammaApproximation,
    Overflow,
    Pole,
    Value,
    backend_name,
    eval_extended,
    eval_gamma,
    eval_log,
    eval_many,
)
from .kernels import PoleError, ReferenceOracle
from .precision import DomainError, PrecisionContext, PrecisionError
from .schemes import (
    METHODS,
    NodeSet,
    PoleExpansion,
    RTarget,
    build_expansion,
    solve_r,
    solve_r_finite,
    solve_r_infinity,
)

__version__ = "0.1.0"

__all__ = [
    "GammaApproximation",
    "Overflow",
    "Pole",
    "Value",
    "backend_name",
    "eval_extended",
    "eval_gamma",
    "eval_log",
    "eval_many",
    "PoleError",
    "ReferenceOracle",
    "DomainError",
    "PrecisionContext",
    "PrecisionError",
    "METHODS",
    "NodeSet",
    "PoleExpansion",
    "RTarget",
    "build_expansion",
    "solve_r",
    "solve_r_finite",
    "solve_r_infinity",
]
