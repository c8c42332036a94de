"""Scaled-gamma building blocks and the high-accuracy reference gamma.

The reference :class:`ReferenceOracle` evaluates ``ln Gamma`` with a shifted
Stirling series: the argument is moved right by ``shift`` with the recurrence
``Gamma(z) = Gamma(z + m) / (z (z+1) ... (z+m-1))`` and the Bernoulli
asymptotic series with ``series_terms`` corrections is applied at ``z + m``.
It is the "exact" value every error measurement compares against.
"""

from __future__ import annotations

import threading
from fractions import Fraction

from .precision import PrecisionContext, bernoulli_fraction

__all__ = [
    "PoleError",
    "ReferenceOracle",
    "scaled_gamma_F",
    "reference_log_gamma",
    "rising_product_phi",
    "node_poly_psi",
    "lanczos_rational_H",
    "stirling_series_fractions",
    "stirling_series_coeffs",
    "nearest_nonpositive_integer",
]


class PoleError(ValueError):
    """The argument is a pole of Gamma (or of a rational kernel).

    Attributes
    ----------
    index : int
        ``m`` such that the pole sits at ``z = -m``.
    """

    def __init__(self, index: int, message: str | None = None):
        self.index = int(index)
        super().__init__(message or f"pole at z = {-self.index}")


def nearest_nonpositive_integer(z) -> int | None:
    """Return ``m`` if ``z == -m`` exactly for an integer ``m >= 0``."""
    if z.imag != 0:
        return None
    x = z.real
    if x <= 0 and x == int(x):
        return -int(x)
    return None


class ReferenceOracle:
    """Shifted Stirling series for ``ln Gamma`` at extended precision.

    Parameters
    ----------
    shift : int
        Recurrence shift applied before the asymptotic series (default 30).
    series_terms : int
        Number of Bernoulli correction terms (default 30).
    ctx : PrecisionContext, optional
        Working precision; 50 digits if omitted.
    """

    def __init__(self, shift: int = 30, series_terms: int = 30, ctx: PrecisionContext | None = None):
        if shift < 10 or series_terms < 10:
            raise ValueError("shift and series_terms must both be >= 10")
        if series_terms > 60:
            raise ValueError("series_terms above 60 needs Bernoulli numbers beyond B_120")
        self.shift = int(shift)
        self.series_terms = int(series_terms)
        self.ctx = ctx or PrecisionContext(50)
        mp = self.ctx.mp
        self._half_log_2pi = mp.log(2 * mp.pi) / 2
        self._series = [
            self.ctx.real(bernoulli_fraction(2 * k) / (2 * k * (2 * k - 1)))
            for k in range(1, self.series_terms + 1)
        ]
        self._cache: dict = {}
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return (
            f"ReferenceOracle(shift={self.shift}, series_terms={self.series_terms}, "
            f"ctx={self.ctx!r})"
        )

    def _log_gamma_right(self, z):
        mp = self.ctx.mp
        w = z + self.shift
        winv = 1 / w
        winv2 = winv * winv
        acc = mp.mpc(0)
        p = winv
        for coef in self._series:
            acc += coef * p
            p *= winv2
        head = (w - mp.mpf(0.5)) * mp.log(w) - w + self._half_log_2pi
        prod = mp.mpc(1)
        for k in range(self.shift):
            prod *= z + k
        return head + acc - mp.log(prod)

    def sin_pi(self, z):
        """``sin(pi z)`` with the argument reduced to the nearest integer."""
        mp = self.ctx.mp
        m = int(mp.nint(z.real))
        s = mp.sin(mp.pi * (z - m))
        return -s if m % 2 else s

    def log_gamma(self, z):
        """Principal-log value of ``ln Gamma(z)`` (``exp`` of it is ``Gamma(z)``).

        Raises
        ------
        PoleError
            If ``z`` is a non-positive integer.
        """
        mp = self.ctx.mp
        z = self.ctx.complex(z)
        key = (z.real, z.imag)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        m = nearest_nonpositive_integer(z)
        if m is not None:
            raise PoleError(m)
        if z.real >= 0.5:
            value = self._log_gamma_right(z)
        else:
            value = mp.log(mp.pi) - mp.log(self.sin_pi(z)) - self._log_gamma_right(1 - z)
        with self._lock:
            if len(self._cache) > 4096:
                self._cache.clear()
            self._cache[key] = value
        return value

    def gamma(self, z):
        return self.ctx.mp.exp(self.log_gamma(z))


def reference_log_gamma(z, oracle: ReferenceOracle):
    return oracle.log_gamma(z)


def scaled_gamma_F(z, r, oracle: ReferenceOracle):
    """``F(z; r) = Gamma(z) e^(z+r) / (z+r)^(z-1/2)``.

    Requires ``Re(z + r) > 0``; poles of Gamma raise :class:`PoleError`.
    """
    ctx = oracle.ctx
    mp = ctx.mp
    z = ctx.complex(z)
    r = ctx.real(r)
    if (z + r).real <= 0:
        raise ValueError("scaled gamma needs Re(z + r) > 0")
    return mp.exp(oracle.log_gamma(z) + z + r - (z - mp.mpf(0.5)) * mp.log(z + r))


def rising_product_phi(z, N: int, ctx: PrecisionContext | None = None):
    """``z (z+1) ... (z+N-1)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if ctx is not None:
        z = ctx.complex(z)
    out = 1
    for k in range(N):
        out = out * (z + k)
    return out


def node_poly_psi(z, nodes, ctx: PrecisionContext | None = None):
    """Monic node polynomial ``prod_k (z - z_k)``."""
    points = getattr(nodes, "points", nodes)
    if ctx is not None:
        z = ctx.complex(z)
        points = [ctx.real(p) for p in points]
    out = 1
    for p in points:
        out = out * (z - p)
    return out


def lanczos_rational_H(n: int, z, ctx: PrecisionContext | None = None):
    """``(z-1)...(z-n) / (z (z+1) ... (z+n-1))``, with ``H_0 = 1``.

    Raises
    ------
    PoleError
        If ``z`` is one of ``0, -1, ..., -(n-1)``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if ctx is not None:
        z = ctx.complex(z)
    num = 1
    den = 1
    for k in range(n):
        num = num * (z - (k + 1))
        den = den * (z + k)
    if n and den == 0:
        raise PoleError(-int(z.real) if hasattr(z, "real") else -int(z))
    if n == 0:
        return num
    return num / den


def stirling_series_fractions(P: int) -> list[Fraction]:
    """Rational factors ``e_p`` with ``a_p = sqrt(2 pi) e_p``, ``p < P``.

    Exponentiates ``g(t) = sum_k B_2k / (2k (2k-1)) t^(2k-1)`` as a formal
    power series in ``t = 1/w`` using ``n e_n = sum_j j g_j e_(n-j)``.
    """
    if not 1 <= P <= 30:
        raise ValueError("P must be in [1, 30]")
    g = [Fraction(0)] * P
    for k in range(1, P):
        j = 2 * k - 1
        if j >= P:
            break
        g[j] = bernoulli_fraction(2 * k) / (2 * k * (2 * k - 1))
    e = [Fraction(1)] + [Fraction(0)] * (P - 1)
    for n in range(1, P):
        e[n] = sum((j * g[j] * e[n - j] for j in range(1, n + 1)), Fraction(0)) / n
    return e


def stirling_series_coeffs(P: int, ctx: PrecisionContext):
    """``a_0 .. a_(P-1)`` of ``Gamma(w) ~ w^(w-1/2) e^(-w) sum_p a_p w^(-p)``."""
    mp = ctx.mp
    root = mp.sqrt(2 * mp.pi)
    return [root * ctx.real(f) for f in stirling_series_fractions(P)]
