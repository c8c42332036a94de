"""Relative-error measurement of pole expansions against the reference gamma.

Everything here runs at extended precision so that method error, not
rounding, is what gets measured.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .evaluator import eval_extended
from .kernels import ReferenceOracle, node_poly_psi, rising_product_phi
from .precision import DomainError, PrecisionContext
from .schemes import NodeSet, PoleExpansion

__all__ = [
    "REAL_LINE",
    "CRITICAL_LINE",
    "SweepResult",
    "AsymptoticParams",
    "ErrorModelDiagnostic",
    "BoundCheck",
    "relative_error",
    "sweep",
    "sample_points",
    "asymptotic_params",
    "spouge_bound",
    "spouge_bound_check",
    "error_model_fit",
]

REAL_LINE = "real_line"
CRITICAL_LINE = "critical_line"


@dataclass
class SweepResult:
    """Relative errors sampled along ``z = x`` or ``z = 1/2 + iy``."""

    axis: str
    coords: list[float]
    errors: list[float]
    method: str = ""
    N: int = 0
    r: float = float("nan")
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.coords) != len(self.errors):
            raise ValueError("coords and errors differ in length")
        if any(b <= a for a, b in zip(self.coords, self.coords[1:])):
            raise ValueError("sweep coordinates must be strictly increasing")

    def max_error(self) -> tuple[float, float]:
        """``(max error, coordinate where it occurs)``."""
        i = max(range(len(self.errors)), key=self.errors.__getitem__)
        return self.errors[i], self.coords[i]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["coord", "rel_err"])
        for x, e in zip(self.coords, self.errors):
            w.writerow([f"{float(x):.17g}", f"{e:.5e}"])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str, axis: str = REAL_LINE) -> "SweepResult":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["coord", "rel_err"]:
            raise ValueError("missing 'coord,rel_err' header")
        return cls(axis, [float(a) for a, _ in rows[1:]], [float(b) for _, b in rows[1:]])


@dataclass(frozen=True)
class AsymptoticParams:
    """Large-``|z|`` behaviour ``1 - Gamma_N/Gamma ~ plateau + D / z``.

    ``alpha = sum(c) / c_inf``. Expanding ``F(z; r)`` gives
    ``sqrt(2 pi) (1 + (1/12 + r (r + 1) / 2) / z)``, where the ``r`` term
    comes from ``(z / (z + r))^(z - 1/2) e^r``, so
    ``D = (c_inf / sqrt(2 pi)) (1/12 + r (r + 1) / 2 - alpha)``.
    """

    plateau: object
    alpha: object
    D: object


@dataclass(frozen=True)
class ErrorModelDiagnostic:
    """Supremum of ``|eps_N| |phi| / |(1/z - 1/zbar) psi|`` over a grid."""

    constant: object
    ratios: list
    grid: list
    skipped: list


@dataclass(frozen=True)
class BoundCheck:
    holds: bool
    worst_margin: object
    worst_point: complex


def relative_error(expansion: PoleExpansion, z, oracle: ReferenceOracle, ctx: PrecisionContext | None = None):
    """``|1 - Gamma_N(z) / Gamma(z)|`` at extended precision.

    Raises
    ------
    DomainError
        If ``z`` is within ``1e-30`` of a pole.
    """
    ctx = ctx or oracle.ctx
    mp = ctx.mp
    z = ctx.complex(z)
    if z.real <= 0.5:
        k = mp.nint(z.real)
        if k <= 0 and abs(z - k) <= mp.mpf(10) ** -30:
            raise DomainError(f"z is too close to the pole at {int(k)}")
    if z.real >= 0.5:
        # a log-ratio avoids forming huge or tiny magnitudes
        return abs(mp.expm1(expansion.log_gamma(z, ctx) - oracle.log_gamma(z)))
    approx = eval_extended(expansion, z, ctx)
    return abs(1 - approx / oracle.gamma(z))


def sample_points(lo: float, hi: float, count: int, spacing: str = "log") -> list[float]:
    """``count`` points on ``[lo, hi]``; ``log`` spacing needs ``lo > 0``."""
    if count < 2:
        raise ValueError("count must be >= 2")
    if spacing == "log":
        if lo <= 0:
            raise ValueError("log spacing needs lo > 0")
        a, b = math.log(lo), math.log(hi)
        pts = [math.exp(a + (b - a) * i / (count - 1)) for i in range(count)]
        pts[0], pts[-1] = float(lo), float(hi)
        return pts
    if spacing == "linear":
        return [lo + (hi - lo) * i / (count - 1) for i in range(count)]
    raise ValueError(f"unknown spacing {spacing!r}")


def sweep(
    expansion: PoleExpansion,
    axis: str,
    lo: float,
    hi: float,
    count: int,
    oracle: ReferenceOracle,
    spacing: str = "log",
) -> SweepResult:
    """Relative error on ``z = x`` (real line) or ``z = 1/2 + iy`` (critical line)."""
    if axis not in (REAL_LINE, CRITICAL_LINE):
        raise ValueError(f"unknown axis {axis!r}")
    ctx = oracle.ctx
    coords = sample_points(lo, hi, count, spacing)
    errors = []
    for t in coords:
        z = ctx.complex(t) if axis == REAL_LINE else ctx.complex(0.5, t)
        errors.append(float(relative_error(expansion, z, oracle, ctx)))
    return SweepResult(axis, coords, errors, expansion.method, expansion.N, float(expansion.r))


def asymptotic_params(expansion: PoleExpansion, ctx: PrecisionContext | None = None) -> AsymptoticParams:
    ctx = ctx or expansion.context()
    mp = ctx.mp
    c_inf = ctx.real(expansion.c_inf)
    r = ctx.real(expansion.r)
    ratio = c_inf / mp.sqrt(2 * mp.pi)
    alpha = sum((ctx.real(c) for c in expansion.c), mp.mpf(0)) / c_inf
    D = ratio * (mp.mpf(1) / 12 + r * (r + 1) / 2 - alpha)
    return AsymptoticParams(1 - ratio, alpha, D)


def spouge_bound(r, z, ctx: PrecisionContext):
    """``sqrt(r+1) / (2 pi)^(r+3/2) / Re(z+r)``."""
    mp = ctx.mp
    r = ctx.real(r)
    z = ctx.complex(z)
    return mp.sqrt(r + 1) / (2 * mp.pi) ** (r + mp.mpf(1.5)) / (z + r).real


def spouge_bound_check(expansion: PoleExpansion, grid, oracle: ReferenceOracle) -> BoundCheck:
    """Check Spouge's relative-error bound at every grid point (``Re z > 0``)."""
    if expansion.method != "spouge":
        raise ValueError("the bound applies to Spouge expansions only")
    ctx = oracle.ctx
    worst = None
    worst_z = None
    for z in grid:
        zz = ctx.complex(z)
        if zz.real <= 0:
            raise ValueError("grid points must satisfy Re(z) > 0")
        err = relative_error(expansion, zz, oracle, ctx)
        margin = spouge_bound(expansion.r, zz, ctx) / err if err else ctx.mp.inf
        if worst is None or margin < worst:
            worst, worst_z = margin, complex(zz)
    return BoundCheck(bool(worst > 1), worst, worst_z)


def error_model_fit(
    expansion: PoleExpansion,
    grid,
    oracle: ReferenceOracle,
    nodes: NodeSet | None = None,
    zbar=None,
    skip_tol: float = 1e-12,
) -> ErrorModelDiagnostic:
    """Fit the constant in ``|eps_N| <= C |(1/z - 1/zbar) psi(z) / phi(z)|``.

    ``zbar=None`` means the calibration point is at infinity (``1/zbar = 0``).
    Grid points within ``skip_tol`` of a node (or of ``zbar``) are skipped
    and returned in ``skipped``.
    """
    ctx = oracle.ctx
    mp = ctx.mp
    nodes = nodes or expansion.nodes
    if nodes is None:
        raise ValueError("the error model needs the interpolation nodes")
    if zbar is None and expansion.r_target is not None and not expansion.r_target.is_infinite:
        zbar = expansion.r_target.zbar
    inv_zbar = 0 if zbar is None else 1 / ctx.real(zbar)
    pts = [ctx.real(p) for p in nodes.points]
    ratios, used, skipped = [], [], []
    for z in grid:
        zz = ctx.complex(z)
        near = [p for p in pts if abs(zz - p) < skip_tol]
        if near or (zbar is not None and abs(zz - ctx.real(zbar)) < skip_tol):
            skipped.append(z)
            continue
        eps = relative_error(expansion, zz, oracle, ctx)
        model = abs((1 / zz - inv_zbar) * node_poly_psi(zz, pts) / rising_product_phi(zz, expansion.N))
        ratios.append(eps / model)
        used.append(z)
    if not ratios:
        raise ValueError("every grid point was skipped")
    return ErrorModelDiagnostic(max(ratios), ratios, used, skipped)
