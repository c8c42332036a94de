"""Native-precision evaluation of a pole expansion over the complex plane.

For ``Re(z) >= 1/2`` the approximation is computed as ``exp(phi) F_N(z)``
with ``phi = (z - 1/2) ln(z + r) - z - r``; for ``Re(z) < 1/2`` the
reflection formula ``Gamma(z) = pi / (sin(pi z) Gamma_N(1 - z))`` is used,
with ``sin(pi z)`` reduced to ``(-1)^m sin(pi (z - m))`` around the nearest
integer ``m``. Results that would overflow a double are reported as
:class:`Overflow` carrying ``ln Gamma``.

The inner loop lives in a compiled kernel when available (see
:mod:`polegamma._backend`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from . import _backend
from .kernels import PoleError, nearest_nonpositive_integer
from .precision import DomainError, PrecisionContext
from .schemes import PoleExpansion

__all__ = [
    "GammaApproximation",
    "Value",
    "Pole",
    "Overflow",
    "EvalOutcome",
    "eval_gamma",
    "eval_log",
    "eval_many",
    "eval_extended",
    "backend_name",
]


def backend_name() -> str:
    return _backend.name


@dataclass(frozen=True)
class Value:
    value: complex


@dataclass(frozen=True)
class Pole:
    """Gamma has a simple pole at ``z = -index`` with the given residue."""

    index: int

    @property
    def residue(self) -> Fraction:
        return Fraction((-1) ** self.index, math.factorial(self.index))


@dataclass(frozen=True)
class Overflow:
    """``|Gamma(z)|`` exceeds the double range; ``log_gamma`` is finite."""

    log_gamma: complex


EvalOutcome = Union[Value, Pole, Overflow]


@dataclass(frozen=True)
class GammaApproximation:
    """A pole expansion rounded to doubles, ready for fast evaluation."""

    r: float
    c_inf: float
    coeffs: tuple[float, ...]

    def __post_init__(self):
        cs = tuple(float(c) for c in self.coeffs)
        if not self.c_inf > 0:
            raise ValueError("c_inf must be positive")
        if not all(math.isfinite(c) for c in cs + (self.c_inf, self.r)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "_carray", np.array(cs, dtype=np.float64))

    @property
    def N(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_expansion(cls, expansion: PoleExpansion) -> "GammaApproximation":
        return cls(float(expansion.r), float(expansion.c_inf), tuple(float(c) for c in expansion.c))


def _wrap(status: int, value: complex, logv: complex) -> EvalOutcome:
    if status == _backend.kernel.STATUS_POLE:
        return Pole(int(value.real))
    if status == _backend.kernel.STATUS_OVERFLOW:
        return Overflow(complex(logv))
    return Value(complex(value))


def eval_gamma(approx: GammaApproximation, z) -> EvalOutcome:
    """Evaluate ``Gamma_N(z)`` anywhere in the plane."""
    st, v, lg = _backend.kernel.gamma_point(approx.c_inf, approx._carray, approx.r, complex(z))
    return _wrap(st, v, lg)


def eval_log(approx: GammaApproximation, z) -> complex:
    """``ln Gamma_N(z)`` without exponentiating; requires ``Re(z) >= 1/2``."""
    z = complex(z)
    if z.real < 0.5:
        raise DomainError("eval_log needs Re(z) >= 1/2; reflect explicitly for the left half-plane")
    return complex(_backend.kernel.log_gamma_point(approx.c_inf, approx._carray, approx.r, z))


def eval_many(approx: GammaApproximation, zs, backend: str | None = None):
    """Vectorised evaluation.

    Returns ``(values, status, logs)`` arrays; ``status`` is 0 for a value,
    1 for a pole (``values.real`` holds the index) and 2 for overflow
    (``logs`` holds ``ln Gamma``).
    """
    kernel = _backend.available[backend] if backend else _backend.kernel
    return kernel.gamma_array(approx.c_inf, approx._carray, approx.r, zs)


def eval_extended(expansion: PoleExpansion, z, ctx: PrecisionContext | None = None):
    """Same algorithm as :func:`eval_gamma` at extended precision.

    Raises
    ------
    PoleError
        At non-positive integers.
    """
    ctx = ctx or PrecisionContext(expansion.digits)
    mp = ctx.mp
    z = ctx.complex(z)
    m = nearest_nonpositive_integer(z)
    if m is not None:
        raise PoleError(m)
    if z.real >= 0.5:
        return mp.exp(expansion.log_gamma(z, ctx))
    w = 1 - z
    k = int(mp.floor(z.real + mp.mpf(0.5)))
    s = mp.sin(mp.pi * (z - k))
    if k % 2:
        s = -s
    return mp.pi / (s * mp.exp(expansion.log_gamma(w, ctx)))

