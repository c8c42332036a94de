"""Coefficient generation for pole expansions of the scaled gamma function.

All schemes produce a :class:`PoleExpansion`, the approximation

    Gamma(z) ~ (z+r)^(z-1/2) e^-(z+r) [c_inf + sum_{n<N} c_n / (z+n)].

They differ only in how ``c_inf, c_0, ..., c_(N-1)`` are obtained:

* ``spouge``: closed-form residues with ``c_inf = sqrt(2 pi)``.
* ``lanczos``: interpolation of ``F(z; r)`` at ``z = 1, ..., N+1``.
* ``nodes`` / ``chebyshev`` / ``geometric``: interpolation at other node sets.
* ``svd``: least-squares fit at ``z = 1, ..., range_end``.
* ``stirling``: partial fractions of the 9-term shifted Stirling series.

The shift ``r`` is either given or solved for so that the expansion is also
exact at a calibration point (:func:`solve_r_finite`) or has no large-``|z|``
error plateau (:func:`solve_r_infinity`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Sequence

from .kernels import ReferenceOracle, stirling_series_coeffs
from .precision import PrecisionContext

__all__ = [
    "METHODS",
    "AssemblyError",
    "ConditioningError",
    "NoRootError",
    "UnsupportedSchemeError",
    "NodeSet",
    "RTarget",
    "PoleExpansion",
    "LanczosChebCoefficients",
    "InterpolationSystem",
    "integer_nodes",
    "custom_nodes",
    "chebyshev_mapped_nodes",
    "geometric_nodes",
    "spouge_coefficients",
    "build_interpolation_system",
    "solve_square_system",
    "least_squares_fit",
    "lanczos_b_coefficients",
    "lanczos_series_value",
    "stirling_pole_expansion",
    "build_expansion",
    "solve_r_finite",
    "solve_r_infinity",
    "solve_r",
]

METHODS = ("spouge", "lanczos", "nodes", "svd", "chebyshev", "geometric", "stirling")


class AssemblyError(ValueError):
    """A node collides with a pole of the expansion or leaves the domain."""


class ConditioningError(ArithmeticError):
    """The linear system is numerically singular at the working precision."""


class NoRootError(ArithmeticError):
    """No sign change of the r-residual could be bracketed."""


class UnsupportedSchemeError(ValueError):
    """The scheme cannot honour the requested r target."""


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if hasattr(x, "man_exp"):
        man, exp = x.man_exp
        return Fraction(int(man)) * Fraction(2) ** int(exp)
    return Fraction(x)


@dataclass(frozen=True)
class NodeSet:
    """Ordered interpolation abscissae, stored as exact rationals."""

    points: tuple[Fraction, ...]
    generator: str = "custom"

    def __post_init__(self):
        pts = tuple(_to_fraction(p) for p in self.points)
        if len(set(pts)) != len(pts):
            raise ValueError("interpolation nodes must be distinct")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def as_floats(self) -> list[float]:
        return [float(p) for p in self.points]


def integer_nodes(M: int, generator: str = "integers") -> NodeSet:
    """Nodes ``1, 2, ..., M``."""
    return NodeSet(tuple(Fraction(k) for k in range(1, M + 1)), generator)


def custom_nodes(points: Sequence) -> NodeSet:
    return NodeSet(tuple(points), "custom")


def chebyshev_mapped_nodes(N: int) -> NodeSet:
    """Chebyshev points mapped onto ``[1/2, inf)``.

    ``z_k = (3 + cos t_k) / (2 (1 - cos t_k))`` with
    ``t_k = (k - 1/2) pi / (N + 1)`` for ``k = 1..N+1``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    ctx = PrecisionContext(60)
    mp = ctx.mp
    pts = []
    for k in range(1, N + 2):
        c = mp.cos((k - mp.mpf(0.5)) / (N + 1) * mp.pi)
        pts.append(_to_fraction((3 + c) / (1 - c) / 2))
    return NodeSet(tuple(pts), "chebyshev_mapped")


def geometric_nodes(N: int) -> NodeSet:
    """Powers of two ``z_k = 2^(k-2)``, ``k = 1..N+1``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return NodeSet(tuple(Fraction(2) ** (k - 2) for k in range(1, N + 2)), "geometric")


@dataclass(frozen=True)
class RTarget:
    """Calibration point for ``r``: finite ``zbar`` or ``None`` for infinity."""

    zbar: Fraction | None = None

    def __post_init__(self):
        if self.zbar is not None:
            z = _to_fraction(self.zbar)
            if z <= 0:
                raise ValueError("zbar must be positive")
            object.__setattr__(self, "zbar", z)

    @classmethod
    def finite(cls, zbar) -> "RTarget":
        return cls(zbar)

    @classmethod
    def infinity(cls) -> "RTarget":
        return cls(None)

    @classmethod
    def parse(cls, text: str) -> "RTarget":
        text = text.strip()
        if text.lower() in ("inf", "infinity"):
            return cls.infinity()
        if text.lower().startswith("zbar="):
            text = text[5:]
        return cls.finite(text)

    @property
    def is_infinite(self) -> bool:
        return self.zbar is None

    def __str__(self) -> str:
        if self.zbar is None:
            return "inf"
        if self.zbar.denominator == 1:
            return str(self.zbar.numerator)
        return repr(float(self.zbar))


@dataclass(frozen=True)
class PoleExpansion:
    """``r``, ``c_inf`` and ``c_0 .. c_(N-1)`` at extended precision.

    ``c[n]`` pairs with the pole at ``z = -n``; printed tables label it
    ``c_(n+1)``.
    """

    N: int
    r: object
    c_inf: object
    c: tuple
    method: str
    nodes: NodeSet | None = None
    r_target: RTarget | None = None
    digits: int = 50
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.N < 1 or len(self.c) != self.N:
            raise ValueError(f"expected {self.N} pole coefficients, got {len(self.c)}")
        if not self.r > self.N - 1:
            raise ValueError(f"r = {self.r} must exceed N - 1 = {self.N - 1}")
        object.__setattr__(self, "c", tuple(self.c))

    def context(self) -> PrecisionContext:
        return PrecisionContext(self.digits)

    def F_N(self, z, ctx: PrecisionContext):
        """Pole sum ``c_inf + sum_n c_n / (z + n)``."""
        z = ctx.complex(z)
        acc = ctx.real(self.c_inf)
        for n, cn in enumerate(self.c):
            acc += ctx.real(cn) / (z + n)
        return acc

    def log_gamma(self, z, ctx: PrecisionContext):
        """``(z-1/2) ln(z+r) - z - r + ln F_N(z)``; valid for ``Re(z+r) > 0``."""
        mp = ctx.mp
        z = ctx.complex(z)
        r = ctx.real(self.r)
        return (z - mp.mpf(0.5)) * mp.log(z + r) - z - r + mp.log(self.F_N(z, ctx))

    def real_ratio(self, x, log_gamma_x, ctx: PrecisionContext):
        """``Gamma_N(x) / Gamma(x)`` for real ``x > 0`` using real arithmetic only.

        ``log_gamma_x`` is the reference ``ln Gamma(x)`` (real).
        """
        mp = ctx.mp
        x = ctx.real(x)
        r = ctx.real(self.r)
        acc = ctx.real(self.c_inf)
        for n, cn in enumerate(self.c):
            acc += ctx.real(cn) / (x + n)
        return mp.exp((x - mp.mpf(0.5)) * mp.log(x + r) - x - r - log_gamma_x) * acc


@dataclass(frozen=True)
class LanczosChebCoefficients:
    """Coefficients ``b_0 .. b_N`` of the ``H_n`` form of the Lanczos series."""

    b: tuple
    r: object

    @property
    def N(self) -> int:
        return len(self.b) - 1


@dataclass
class InterpolationSystem:
    """Rows ``[1, 1/z_k, ..., 1/(z_k+N-1)]`` and right-hand side ``F(z_k; r)``."""

    nodes: NodeSet
    N: int
    r: object
    H: list
    f: list

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.H), self.N + 1


def spouge_coefficients(N: int, r, ctx: PrecisionContext, r_target: RTarget | None = None) -> PoleExpansion:
    """Residues ``c_n = (-1)^n e^(r-n) (r-n)^(n+1/2) / n!`` and ``c_inf = sqrt(2 pi)``."""
    mp = ctx.mp
    r = ctx.real(r)
    if N < 1:
        raise ValueError("N must be >= 1")
    if not r > N - 1:
        raise ValueError(f"Spouge coefficients need r > N - 1 = {N - 1}, got r = {r}")
    c = []
    for n in range(N):
        term = mp.exp(r - n) * (r - n) ** (n + mp.mpf(0.5)) / factorial(n)
        c.append(-term if n % 2 else term)
    return PoleExpansion(N, r, mp.sqrt(2 * mp.pi), tuple(c), "spouge", None, r_target, ctx.digits)


def build_interpolation_system(nodes: NodeSet, r, N: int, oracle: ReferenceOracle) -> InterpolationSystem:
    """Assemble ``H c = f`` for the given nodes.

    Matrix entries are exact rationals; only ``f`` is rounded.
    """
    ctx = oracle.ctx
    mp = ctx.mp
    r = ctx.real(r)
    H = []
    f = []
    for zk in nodes.points:
        for n in range(N):
            if zk + n == 0:
                raise AssemblyError(f"node {zk} coincides with the pole at z = {-n}")
        if not ctx.real(zk) + r > 0:
            raise AssemblyError(f"node {zk} violates z + r > 0 for r = {r}")
        H.append([Fraction(1)] + [1 / (zk + n) for n in range(N)])
        zr = ctx.real(zk)
        lg = oracle.log_gamma(zr).real
        f.append(mp.exp(lg + zr + r - (zr - mp.mpf(0.5)) * mp.log(zr + r)))
    return InterpolationSystem(nodes, N, r, H, f)


class _LUFactor:
    """Row-pivoted LU factors of a square matrix on ``ctx`` reals."""

    def __init__(self, A: list, ctx: PrecisionContext):
        n = len(A)
        a = [[ctx.real(v) for v in row] for row in A]
        scale = max(abs(v) for row in a for v in row)
        tiny = scale * ctx.mp.mpf(10) ** (5 - ctx.digits)
        perm = list(range(n))
        for col in range(n):
            piv = max(range(col, n), key=lambda i: abs(a[i][col]))
            if abs(a[piv][col]) <= tiny:
                raise ConditioningError(
                    f"pivot {ctx.mp.nstr(a[piv][col], 5)} in column {col} is below tolerance"
                )
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                perm[col], perm[piv] = perm[piv], perm[col]
            prow = a[col]
            inv = 1 / prow[col]
            for i in range(col + 1, n):
                row = a[i]
                m = row[col] * inv
                row[col] = m
                if m:
                    for j in range(col + 1, n):
                        row[j] -= m * prow[j]
        self.n = n
        self.lu = a
        self.perm = perm
        self.ctx = ctx

    def solve(self, b: list) -> list:
        n, a = self.n, self.lu
        y = [self.ctx.real(b[p]) for p in self.perm]
        for i in range(n):
            row = a[i]
            s = y[i]
            for j in range(i):
                s -= row[j] * y[j]
            y[i] = s
        for i in range(n - 1, -1, -1):
            row = a[i]
            s = y[i]
            for j in range(i + 1, n):
                s -= row[j] * y[j]
            y[i] = s / row[i]
        return y


@lru_cache(maxsize=64)
def _factor_nodes(nodes: NodeSet, N: int, digits: int) -> _LUFactor:
    H = [[Fraction(1)] + [1 / (zk + n) for n in range(N)] for zk in nodes.points]
    return _LUFactor(H, PrecisionContext(digits))


def _gauss_solve(A: list, b: list, ctx: PrecisionContext) -> list:
    """Gaussian elimination with partial pivoting on ``ctx`` reals."""
    return _LUFactor(A, ctx).solve(b)


def solve_square_system(
    sys: InterpolationSystem,
    ctx: PrecisionContext,
    method: str = "nodes",
    r_target: RTarget | None = None,
) -> PoleExpansion:
    """Solve the square system; the first unknown is ``c_inf``."""
    ctx.require_coefficient_precision()
    rows, cols = sys.shape
    if rows != cols:
        raise ValueError(f"square solve needs N+1 = {cols} nodes, got {rows}")
    # H depends only on the nodes, so its factors are shared across r values
    x = _factor_nodes(sys.nodes, sys.N, ctx.digits).solve(sys.f)
    x = [ctx.real(v) for v in x]
    return PoleExpansion(sys.N, ctx.real(sys.r), x[0], tuple(x[1:]), method, sys.nodes, r_target, ctx.digits)


def least_squares_fit(
    N: int,
    r,
    oracle: ReferenceOracle,
    range_end: int = 170,
    weighting: str = "none",
    r_target: RTarget | None = None,
) -> PoleExpansion:
    """Least-squares pole expansion over the integer nodes ``1..range_end``.

    Solved by Householder QR at the oracle's precision. ``weighting="relative"``
    scales every row by ``1 / F(z_k; r)``; the default is unweighted.
    """
    ctx = oracle.ctx
    ctx.require_coefficient_precision()
    if range_end < N + 2:
        raise ValueError("range_end must be at least N + 2")
    if weighting not in ("none", "relative"):
        raise ValueError(f"unknown weighting {weighting!r}")
    mp = ctx.mp
    sys = build_interpolation_system(integer_nodes(range_end, "least_squares_range"), r, N, oracle)
    A = mp.matrix(len(sys.H), N + 1)
    b = mp.matrix(len(sys.H), 1)
    for i, row in enumerate(sys.H):
        w = 1 / sys.f[i] if weighting == "relative" else 1
        for j, v in enumerate(row):
            A[i, j] = ctx.real(v) * w
        b[i] = sys.f[i] * w
    x, _ = mp.qr_solve(A, b)
    return PoleExpansion(
        N, ctx.real(r), x[0], tuple(x[i] for i in range(1, N + 1)), "svd", sys.nodes, r_target,
        ctx.digits, {"weighting": weighting, "range_end": range_end},
    )


def lanczos_b_coefficients(N: int, r, oracle: ReferenceOracle) -> LanczosChebCoefficients:
    """``b_0 = F(1; r)`` and ``b_n = 2n sum_k (-1)^(n-k) (n+k-1)! / ((k!)^2 (n-k)!) F(k+1; r)``."""
    ctx = oracle.ctx
    mp = ctx.mp
    r = ctx.real(r)
    if not r > -1:
        raise ValueError("r must exceed -1")
    Fk = []
    for k in range(N + 1):
        z = ctx.real(k + 1)
        Fk.append(mp.exp(oracle.log_gamma(z).real + z + r - (z - mp.mpf(0.5)) * mp.log(z + r)))
    b = [Fk[0]]
    for n in range(1, N + 1):
        acc = mp.mpf(0)
        for k in range(n + 1):
            w = Fraction(factorial(n + k - 1), factorial(k) ** 2 * factorial(n - k))
            term = ctx.real(w) * Fk[k]
            acc += -term if (n - k) % 2 else term
        b.append(2 * n * acc)
    return LanczosChebCoefficients(tuple(b), r)


def lanczos_series_value(coeffs: LanczosChebCoefficients, z, ctx: PrecisionContext):
    """``(z+r)^(z-1/2) e^-(z+r) [b_0 + sum_n b_n H_n(z)]`` with ``H_n`` built incrementally."""
    mp = ctx.mp
    z = ctx.complex(z)
    r = ctx.real(coeffs.r)
    acc = ctx.real(coeffs.b[0])
    h = mp.mpc(1)
    for n in range(1, coeffs.N + 1):
        # H_n = H_(n-1) (z - n) / (z + n - 1)
        h = h * (z - n) / (z + n - 1)
        acc += ctx.real(coeffs.b[n]) * h
    return mp.exp((z - mp.mpf(0.5)) * mp.log(z + r) - z - r) * acc


def stirling_pole_expansion(ctx: PrecisionContext) -> PoleExpansion:
    """The 9-term shifted Stirling series at ``w = z + 8`` as 8 poles.

    ``sum_p a_p (z+8)^(8-p) / (z (z+1) ... (z+7))`` is split into partial
    fractions: ``c_inf = a_0`` and ``c_n`` is the numerator at ``z = -n``
    divided by ``prod_(m != n) (m - n)``.
    """
    N, shift = 8, 8
    a = stirling_series_coeffs(N + 1, ctx)
    c = []
    for n in range(N):
        num = ctx.mp.mpf(0)
        for p, ap in enumerate(a):
            num += ap * ctx.real(shift - n) ** (N - p)
        den = 1
        for m in range(N):
            if m != n:
                den *= m - n
        c.append(num / den)
    return PoleExpansion(N, ctx.real(shift), a[0], tuple(c), "stirling", None, None, ctx.digits)


def _nodes_for(method: str, N: int, nodes: NodeSet | None) -> NodeSet | None:
    if method == "lanczos":
        return integer_nodes(N + 1)
    if method == "chebyshev":
        return chebyshev_mapped_nodes(N)
    if method == "geometric":
        return geometric_nodes(N)
    if method == "nodes":
        if nodes is None:
            raise ValueError("method 'nodes' needs an explicit node set")
        if len(nodes) != N + 1:
            raise ValueError(f"method 'nodes' needs N+1 = {N + 1} nodes, got {len(nodes)}")
        return nodes
    return None


def build_expansion(
    method: str,
    N: int,
    r,
    oracle: ReferenceOracle,
    nodes: NodeSet | None = None,
    range_end: int = 170,
    r_target: RTarget | None = None,
) -> PoleExpansion:
    """Build the pole expansion of ``method`` at a fixed ``r``."""
    ctx = oracle.ctx
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
    if method == "spouge":
        return spouge_coefficients(N, r, ctx, r_target)
    if method == "stirling":
        if N != 8 or ctx.real(r) != 8:
            raise ValueError("the Stirling expansion is fixed at N = 8, r = 8")
        return stirling_pole_expansion(ctx)
    if method == "svd":
        return least_squares_fit(N, r, oracle, range_end, r_target=r_target)
    node_set = _nodes_for(method, N, nodes)
    sys = build_interpolation_system(node_set, r, N, oracle)
    return solve_square_system(sys, ctx, method, r_target)


def _scan_and_refine(
    residual: Callable,
    lo: float,
    hi: float,
    ctx: PrecisionContext,
    r0=None,
    samples: int = 200,
    expansions: int = 10,
):
    """Refine one sign change of ``residual`` found by scanning ``[lo, hi]``.

    The sign change with the largest ``r`` is used, or the one nearest ``r0``
    when a seed is given. If the scan finds none, the interval width is
    doubled (up to ``expansions`` times) before giving up.
    """
    width = hi - lo
    for _ in range(expansions + 1):
        grid = [ctx.real(lo) + ctx.real(width) * i / samples for i in range(samples + 1)]
        vals = []
        for x in grid:
            try:
                v = residual(x)
            except (ArithmeticError, ValueError):
                v = None
            vals.append(v)
        changes = []
        for i in range(samples):
            fa, fb = vals[i], vals[i + 1]
            if fa is None or fb is None:
                continue
            if fa == 0 or fb == 0 or (fa < 0) != (fb < 0):
                changes.append(i)
        if changes:
            if r0 is None:
                i = changes[-1]
            else:
                i = min(changes, key=lambda k: abs(grid[k] + grid[k + 1] - 2 * r0))
            fa, fb = vals[i], vals[i + 1]
            if fb == 0:
                return grid[i + 1]
            if fa == 0:
                return grid[i]
            return _illinois(residual, grid[i], fa, grid[i + 1], fb, ctx)
        width *= 2
    raise NoRootError(f"no sign change of the r residual on [{lo}, {lo + width / 2}]")


def _illinois(f: Callable, a, fa, b, fb, ctx: PrecisionContext, max_iter: int = 200):
    """Bracketed secant (Illinois variant) with bisection safeguard."""
    mp = ctx.mp
    xtol = mp.mpf(10) ** (8 - ctx.digits) * max(1, abs(b))
    side = 0
    for _ in range(max_iter):
        if abs(b - a) <= xtol:
            break
        x = (a * fb - b * fa) / (fb - fa)
        if not (min(a, b) < x < max(a, b)):
            x = (a + b) / 2
        fx = f(x)
        if fx == 0:
            return x
        if (fx < 0) == (fb < 0):
            b, fb = x, fx
            if side == -1:
                fa /= 2
            side = -1
        else:
            a, fa = x, fx
            if side == 1:
                fb /= 2
            side = 1
    return b if abs(fb) <= abs(fa) else a


def _bracket(N: int) -> tuple[float, float]:
    return max(N - 1, 0) + 1e-6, N + 4.0


def solve_r_finite(
    method: str,
    N: int,
    zbar,
    oracle: ReferenceOracle,
    nodes: NodeSet | None = None,
    range_end: int = 170,
    r0=None,
):
    """Shift ``r`` making the expansion exact at ``zbar``.

    ``Gamma_N(zbar; r)/Gamma(zbar) - 1`` usually changes sign several times
    on the search interval ``(max(N-1, 0), N+4)``. The root with the largest
    ``r`` is returned unless a seed ``r0`` asks for the nearest one.

    Raises
    ------
    NoRootError
        If no sign change is found after expanding the search interval.
    """
    ctx = oracle.ctx
    ctx.require_coefficient_precision()
    if method == "stirling":
        raise UnsupportedSchemeError("the Stirling expansion has fixed r = 8")
    zb = _to_fraction(zbar)
    target = RTarget.finite(zb)
    node_set = _nodes_for(method, N, nodes)
    if node_set is not None and zb in node_set.points:
        raise ValueError(f"zbar = {zb} coincides with an interpolation node")
    zx = ctx.real(zb)
    lg = oracle.log_gamma(zx).real

    def residual(r):
        e = build_expansion(method, N, r, oracle, node_set, range_end, target)
        return e.real_ratio(zx, lg, ctx) - 1

    lo, hi = _bracket(N)
    return _scan_and_refine(residual, lo, hi, ctx, r0)


def solve_r_infinity(
    method: str,
    N: int,
    oracle: ReferenceOracle,
    nodes: NodeSet | None = None,
    range_end: int = 170,
    r0=None,
):
    """Shift ``r`` for which ``c_inf(r) = sqrt(2 pi)`` (no error plateau).

    Root selection follows :func:`solve_r_finite`.

    Raises
    ------
    UnsupportedSchemeError
        For Spouge (holds for every ``r``) and Stirling (fixed ``r``).
    """
    ctx = oracle.ctx
    ctx.require_coefficient_precision()
    if method == "spouge":
        raise UnsupportedSchemeError(
            "Spouge fixes c_inf = sqrt(2 pi) for every r; an r(inf) target is meaningless"
        )
    if method == "stirling":
        raise UnsupportedSchemeError("the Stirling expansion has fixed r = 8")
    mp = ctx.mp
    root2pi = mp.sqrt(2 * mp.pi)
    node_set = _nodes_for(method, N, nodes)
    target = RTarget.infinity()

    def residual(r):
        e = build_expansion(method, N, r, oracle, node_set, range_end, target)
        return e.c_inf / root2pi - 1

    lo, hi = _bracket(N)
    return _scan_and_refine(residual, lo, hi, ctx, r0)


def solve_r(
    method: str,
    N: int,
    target: RTarget,
    oracle: ReferenceOracle,
    nodes: NodeSet | None = None,
    range_end: int = 170,
    r0=None,
):
    if target.is_infinite:
        return solve_r_infinity(method, N, oracle, nodes, range_end, r0)
    return solve_r_finite(method, N, target.zbar, oracle, nodes, range_end, r0)
