"""Extended-precision arithmetic layer.

Every computation that needs more than native double precision goes through a
:class:`PrecisionContext`, which owns a private :class:`mpmath.MPContext`.
Because each context carries its own working precision, separate contexts can
be used from separate threads without touching mpmath's global ``mp`` state.

Real values are ``ctx.mp.mpf`` instances and complex values are
``ctx.mp.mpc`` instances.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import comb

import mpmath
from mpmath.ctx_mp_python import _mpc

__all__ = [
    "PrecisionContext",
    "PrecisionError",
    "DomainError",
    "MIN_COEFFICIENT_DIGITS",
    "complex_pow",
    "bernoulli",
    "bernoulli_fraction",
    "exp",
    "ln",
    "sin",
    "sqrt",
    "pi",
    "downcast_to_double",
]

MIN_COEFFICIENT_DIGITS = 30
MAX_BERNOULLI_INDEX = 120


class PrecisionError(ValueError):
    """Raised when a requested precision is too low for the operation."""


class DomainError(ValueError):
    """Raised for arguments outside a function's domain (e.g. ``ln(0)``)."""


class PrecisionContext:
    """A decimal-digit working precision.

    Parameters
    ----------
    digits : int
        Significant decimal digits carried by every operation (default 50).
    """

    __slots__ = ("digits", "mp")

    def __init__(self, digits: int = 50):
        if int(digits) != digits or digits < 1:
            raise PrecisionError(f"digits must be a positive integer, got {digits!r}")
        self.digits = int(digits)
        self.mp = mpmath.MPContext()
        self.mp.dps = self.digits

    def __repr__(self) -> str:
        return f"PrecisionContext(digits={self.digits})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrecisionContext) and other.digits == self.digits

    def __hash__(self) -> int:
        return hash(("PrecisionContext", self.digits))

    @property
    def eps(self):
        """Relative accuracy target ``10**(2 - digits)``."""
        return self.mp.mpf(10) ** (2 - self.digits)

    def require_coefficient_precision(self) -> None:
        if self.digits < MIN_COEFFICIENT_DIGITS:
            raise PrecisionError(
                f"coefficient generation needs at least {MIN_COEFFICIENT_DIGITS} "
                f"digits, context has {self.digits}"
            )

    def real(self, x):
        """Convert ``x`` (int, float, str, Fraction, mpf) to this context's mpf."""
        if isinstance(x, Fraction):
            return self.mp.mpf(x.numerator) / x.denominator
        return self.mp.mpf(x)

    def complex(self, x, y=0):
        """Convert to this context's mpc; ``x`` may itself be complex."""
        if isinstance(x, Fraction):
            x = self.real(x)
        if isinstance(y, Fraction):
            y = self.real(y)
        z = self.mp.mpc(x)
        return z + self.mp.mpc(0, y) if y else z


def _as_complex(x, ctx: PrecisionContext):
    return ctx.complex(x)


def complex_pow(base, exponent, ctx: PrecisionContext):
    """Principal-branch power ``exp(exponent * log(base))``.

    Raises
    ------
    DomainError
        If ``base`` is zero and ``exponent`` has non-positive real part.
    """
    mp = ctx.mp
    b = _as_complex(base, ctx)
    e = _as_complex(exponent, ctx)
    if b == 0:
        if e.real > 0:
            return mp.mpc(0)
        raise DomainError("0 raised to an exponent with non-positive real part")
    if e.imag == 0 and e.real == int(e.real) and abs(e.real) <= 10**6:
        # integer exponents by repeated squaring, exact for representable results
        return b ** int(e.real)
    return mp.exp(e * mp.log(b))


_bernoulli_lock = threading.Lock()
_bernoulli_table: tuple[Fraction, ...] | None = None


def _build_bernoulli_table(m_max: int) -> tuple[Fraction, ...]:
    # sum_{j=0}^{m} C(m+1, j) B_j = 0, B_0 = 1
    b = [Fraction(1)]
    for m in range(1, m_max + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += comb(m + 1, j) * b[j]
        b.append(-acc / (m + 1))
    return tuple(b)


def _table() -> tuple[Fraction, ...]:
    global _bernoulli_table
    if _bernoulli_table is None:
        with _bernoulli_lock:
            if _bernoulli_table is None:
                _bernoulli_table = _build_bernoulli_table(MAX_BERNOULLI_INDEX)
    return _bernoulli_table


def bernoulli_fraction(index: int) -> Fraction:
    """Exact Bernoulli number ``B_index`` for even ``2 <= index <= 120``."""
    if int(index) != index or index < 2 or index % 2 or index > MAX_BERNOULLI_INDEX:
        raise ValueError(
            f"Bernoulli index must be even and in [2, {MAX_BERNOULLI_INDEX}], got {index!r}"
        )
    return _table()[int(index)]


def bernoulli(two_k: int, ctx: PrecisionContext):
    """``B_{2k}`` rounded to the context precision."""
    return ctx.real(bernoulli_fraction(two_k))


def exp(x, ctx: PrecisionContext):
    return ctx.mp.exp(x)


def ln(x, ctx: PrecisionContext):
    """Principal natural logarithm."""
    if x == 0:
        raise DomainError("ln(0) is undefined")
    return ctx.mp.log(x)


def sin(x, ctx: PrecisionContext):
    return ctx.mp.sin(x)


def sqrt(x, ctx: PrecisionContext):
    return ctx.mp.sqrt(x)


def pi(ctx: PrecisionContext):
    return +ctx.mp.pi


def downcast_to_double(x):
    """Round an extended real or complex value to the nearest native number."""
    if isinstance(x, (_mpc, complex)):
        return complex(x)
    return float(x)
