"""Command-line interface.

Subcommands::

    polegamma coeffs  --method lanczos --n 8 --r-target inf [--paper-table]
    polegamma coeffs  --table 3|4
    polegamma solve-r --method spouge --n 3 --zbar 20
    polegamma solve-r --table 1|2
    polegamma eval    --method lanczos --n 8 --r-target inf --z 2.5+1i
    polegamma sweep   --method spouge --n 8 --zbar 100 --axis real --lo 1 --hi 100 --count 400

Exit status is 0 on success, 2 for usage errors and 3 for numerical
failures (no root bracket, singular system).
"""

from __future__ import annotations

import argparse
import csv
import io
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import analysis
from .evaluator import GammaApproximation, Overflow, Pole, eval_gamma
from .kernels import PoleError, ReferenceOracle
from .precision import DomainError, PrecisionContext, PrecisionError
from .records import RecordError, dump_expansion, format_columns, format_table, load_expansion
from .schemes import (
    METHODS,
    AssemblyError,
    ConditioningError,
    NoRootError,
    NodeSet,
    PoleExpansion,
    RTarget,
    UnsupportedSchemeError,
    build_expansion,
    custom_nodes,
    solve_r,
)

__all__ = ["main", "RunConfig", "UsageError", "parse_complex", "build_parser"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

ANALYSIS_DIGITS = 40

# interpolation points of the ad hoc "Interp" scheme, in the order they are taken
ADHOC_NODES = (1, 2, 10, 200, 20, 50, 3, 4, 5)

TABLE1_ZBARS = ("0.5", "1", "2", "50", "100")
TABLE2_ZBARS = ("0.5", "15", "20", "50", "100", "inf")


class UsageError(Exception):
    """Invalid combination of command-line options."""


_COMPLEX_RE = re.compile(
    r"""^\s*
    (?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?
    (?:(?P<im>[+-]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)[ij])?
    \s*$""",
    re.VERBOSE,
)


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``bi``, ``a+bi`` or ``a-bi`` (``j`` is accepted for ``i``)."""
    m = _COMPLEX_RE.match(text)
    if not m or (m.group("re") is None and m.group("im") is None) or not text.strip():
        raise UsageError(f"malformed complex literal {text!r}")
    real = float(m.group("re")) if m.group("re") else 0.0
    im = m.group("im")
    if m.group("re") and im == "":
        # "3i": the greedy real group swallowed the imaginary digits
        real, im = 0.0, m.group("re")
    if im is None:
        imag = 0.0
    elif im in ("", "+"):
        imag = 1.0
    elif im == "-":
        imag = -1.0
    else:
        imag = float(im)
    if real and im is not None and im[:1] not in ("+", "-"):
        raise UsageError(f"malformed complex literal {text!r}")
    return complex(real, imag)


@dataclass(frozen=True)
class RunConfig:
    """Validated expansion settings shared by every subcommand."""

    method: str
    N: int
    r: str | None = None
    target: RTarget | None = None
    nodes: NodeSet | None = None
    digits: int = 50
    r0: float | None = None
    range_end: int = 170

    def __post_init__(self):
        if self.method not in METHODS:
            raise UsageError(f"unknown method {self.method!r}")
        if self.method == "stirling":
            if self.N != 8:
                raise UsageError("the Stirling expansion is fixed at N = 8")
            if self.target is not None or (self.r is not None and Fraction(self.r) != 8):
                raise UsageError("the Stirling expansion is fixed at r = 8")
        elif (self.r is None) == (self.target is None):
            raise UsageError("give exactly one of --r and --r-target/--zbar")
        if self.N < 1:
            raise UsageError("--n must be >= 1")
        if self.method == "nodes" and self.nodes is None:
            raise UsageError("method 'nodes' needs --nodes")
        if self.nodes is not None and self.method != "nodes":
            raise UsageError("--nodes only applies to method 'nodes'")
        if self.nodes is not None and len(self.nodes) != self.N + 1:
            raise UsageError(f"--nodes needs N+1 = {self.N + 1} points")
        if self.target is not None and self.target.is_infinite and self.method == "spouge":
            raise UsageError("Spouge has c_inf = sqrt(2 pi) for every r, so an r(inf) target is undefined")
        if self.method == "svd" and self.range_end < self.N + 1:
            raise UsageError("--range-end must be at least N+1")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        method = args.method
        if method is None:
            raise UsageError("--method is required")
        N = args.n if args.n is not None else (8 if method == "stirling" else None)
        if N is None:
            raise UsageError("--n is required")
        target = None
        if args.r_target is not None:
            try:
                target = RTarget.parse(args.r_target)
            except (ValueError, ZeroDivisionError) as exc:
                raise UsageError(f"bad --r-target: {exc}") from None
        nodes = None
        if args.nodes:
            try:
                nodes = custom_nodes([Fraction(p.strip()) for p in args.nodes.split(",")])
            except (ValueError, ZeroDivisionError) as exc:
                raise UsageError(f"bad --nodes: {exc}") from None
        if args.r is not None:
            try:
                Fraction(args.r)
            except ValueError:
                raise UsageError(f"bad --r {args.r!r}") from None
        return cls(method, N, args.r, target, nodes, args.digits, args.r0, args.range_end)

    def oracle(self) -> ReferenceOracle:
        return ReferenceOracle(ctx=PrecisionContext(self.digits))

    def solve(self, oracle: ReferenceOracle):
        return solve_r(self.method, self.N, self.target, oracle, self.nodes, self.range_end, self.r0)

    def expansion(self, oracle: ReferenceOracle | None = None) -> PoleExpansion:
        oracle = oracle or self.oracle()
        ctx = oracle.ctx
        if self.method == "stirling":
            r = ctx.real(8)
        elif self.r is not None:
            r = ctx.real(self.r)
        else:
            r = self.solve(oracle)
        return build_expansion(self.method, self.N, r, oracle, self.nodes, self.range_end, self.target)


def _add_expansion_args(p: argparse.ArgumentParser, with_file: bool = False) -> None:
    g = p.add_argument_group("expansion")
    g.add_argument("--method", choices=METHODS)
    g.add_argument("--n", type=int, help="number of poles N")
    rg = g.add_mutually_exclusive_group()
    rg.add_argument("--r", help="explicit shift r")
    rg.add_argument("--r-target", help="calibration target: 'inf', a number or 'zbar=<x>'")
    rg.add_argument("--zbar", dest="r_target", help="shorthand for --r-target <zbar>")
    g.add_argument("--nodes", help="comma-separated interpolation points (method 'nodes')")
    g.add_argument("--r0", type=float, help="seed: refine the sign change nearest r0")
    g.add_argument("--range-end", type=int, default=170, help="last sample point of the svd fit")
    g.add_argument("--digits", type=int, default=50, help="working precision in decimal digits")
    if with_file:
        g.add_argument("--coeff-file", help="read coefficients from a record instead of generating them")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polegamma", description="Pole-expansion gamma approximations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="generate expansion coefficients")
    _add_expansion_args(p)
    p.add_argument("--paper-table", action="store_true", help="print a 5-digit table instead of a record")
    p.add_argument("--table", type=int, choices=(3, 4), help="print a full N=8 comparison table")
    p.add_argument("--out", help="write to this file instead of stdout")

    p = sub.add_parser("solve-r", help="solve for the shift r")
    _add_expansion_args(p)
    p.add_argument("--table", type=int, choices=(1, 2), help="print a full grid of r(zbar)")
    p.add_argument("--max-n", type=int, default=10, help="largest N in --table grids")
    p.add_argument("--out", help="also write the --table grid as CSV")

    p = sub.add_parser("eval", help="evaluate Gamma_N(z) in double precision")
    _add_expansion_args(p, with_file=True)
    p.add_argument("--z", required=True, help="complex literal a+bi (use --z=-5+1i for negative parts)")

    p = sub.add_parser("sweep", help="relative error along an axis, as CSV")
    _add_expansion_args(p, with_file=True)
    p.add_argument("--axis", choices=("real", "critical"), default="real")
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--count", type=int, default=400)
    p.add_argument("--spacing", choices=("log", "linear"), default="log")
    p.add_argument("--compare", choices=METHODS, help="second method with the same N and target")
    p.add_argument("--compare-r0", type=float, help="root seed for the --compare expansion")
    p.add_argument("--out", help="CSV path (default: stdout)")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_or_build(args) -> PoleExpansion:
    if getattr(args, "coeff_file", None):
        try:
            with open(args.coeff_file) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.coeff_file}: {exc.strerror}") from None
        try:
            return load_expansion(text, PrecisionContext(args.digits))
        except RecordError as exc:
            raise UsageError(f"{args.coeff_file}: {exc}") from None
    return RunConfig.from_args(args).expansion()


def table3_columns(oracle: ReferenceOracle) -> dict[str, PoleExpansion]:
    """N=8 columns calibrated at zbar = 100 (SVD at the fixed r = 8.5)."""
    t = RTarget.finite(100)
    adhoc = custom_nodes(ADHOC_NODES)
    cols = {}
    for label, method, nodes in (("Lanczos", "lanczos", None), ("Spouge", "spouge", None), ("Interp", "nodes", adhoc)):
        r = solve_r(method, 8, t, oracle, nodes)
        cols[label] = build_expansion(method, 8, r, oracle, nodes, r_target=t)
    cols["SVD"] = build_expansion("svd", 8, oracle.ctx.real("8.5"), oracle)
    return {k: cols[k] for k in ("Lanczos", "Spouge", "SVD", "Interp")}


def table4_columns(oracle: ReferenceOracle) -> dict[str, PoleExpansion]:
    """N=8 columns with r = r(inf), plus the Stirling comparator.

    The geometric-node residual has a second sign change near r = 8.4; the
    tabulated column is the root nearest r0 = N.
    """
    t = RTarget.infinity()
    cols = {"Stirling": build_expansion("stirling", 8, oracle.ctx.real(8), oracle)}
    for label, method, r0 in (("Lanczos", "lanczos", None), ("Chebyshev", "chebyshev", None), ("Geometric", "geometric", 8)):
        r = solve_r(method, 8, t, oracle, r0=r0)
        cols[label] = build_expansion(method, 8, r, oracle, r_target=t)
    return cols


def cmd_coeffs(args) -> int:
    if args.table:
        oracle = ReferenceOracle(ctx=PrecisionContext(args.digits))
        cols = table3_columns(oracle) if args.table == 3 else table4_columns(oracle)
        _emit(format_columns(cols, oracle.ctx), args.out)
        return EXIT_OK
    cfg = RunConfig.from_args(args)
    oracle = cfg.oracle()
    exp = cfg.expansion(oracle)
    if args.paper_table:
        _emit(format_table(exp, oracle.ctx), args.out)
    else:
        _emit(dump_expansion(exp, oracle.ctx), args.out)
    return EXIT_OK


def _solve_grid(method: str, zbars, max_n: int, oracle: ReferenceOracle):
    rows = []
    for N in range(1, max_n + 1):
        rows.append([solve_r(method, N, RTarget.parse(z), oracle) for z in zbars])
    return rows


def cmd_solve_r(args) -> int:
    if args.table:
        method, zbars = ("spouge", TABLE1_ZBARS) if args.table == 1 else ("lanczos", TABLE2_ZBARS)
        oracle = ReferenceOracle(ctx=PrecisionContext(args.digits))
        rows = _solve_grid(method, zbars, args.max_n, oracle)
        heads = ["N", *(f"r({z})" for z in zbars)]
        cells = [[str(N), *(f"{float(r):.8f}" for r in row)] for N, row in enumerate(rows, 1)]
        widths = [max(len(h), *(len(c[i]) for c in cells)) for i, h in enumerate(heads)]
        lines = ["  ".join(h.rjust(w) for h, w in zip(heads, widths))]
        lines += ["  ".join(c.rjust(w) for c, w in zip(cell, widths)) for cell in cells]
        sys.stdout.write("\n".join(lines) + "\n")
        if args.out:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["N", *zbars])
            for N, row in enumerate(rows, 1):
                w.writerow([N, *(oracle.ctx.mp.nstr(r, 20) for r in row)])
            _emit(buf.getvalue(), args.out)
        return EXIT_OK
    cfg = RunConfig.from_args(args)
    if cfg.target is None:
        raise UsageError("solve-r needs --r-target or --zbar")
    r = cfg.solve(cfg.oracle())
    print(f"{float(r):.8f}")
    return EXIT_OK


def _format_complex(v: complex) -> str:
    if v.imag == 0:
        return repr(v.real)
    sign = "+" if v.imag >= 0 else "-"
    return f"{v.real!r}{sign}{abs(v.imag)!r}i"


def cmd_eval(args) -> int:
    z = parse_complex(args.z)
    approx = GammaApproximation.from_expansion(_load_or_build(args))
    out = eval_gamma(approx, z)
    if isinstance(out, Pole):
        res = out.residue
        print(f"pole at {-out.index}, residue {res}")
    elif isinstance(out, Overflow):
        print(f"overflow: ln Gamma = {_format_complex(out.log_gamma)}")
    else:
        print(_format_complex(out.value))
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.count < 2:
        raise UsageError("--count must be >= 2")
    if args.hi <= args.lo:
        raise UsageError("--hi must exceed --lo")
    axis = analysis.REAL_LINE if args.axis == "real" else analysis.CRITICAL_LINE
    primary = _load_or_build(args)
    oracle = ReferenceOracle(ctx=PrecisionContext(ANALYSIS_DIGITS))
    result = analysis.sweep(primary, axis, args.lo, args.hi, args.count, oracle, args.spacing)
    _emit(result.to_csv(), args.out)
    err, where = result.max_error()
    log = sys.stderr if not args.out else sys.stdout
    print(f"{primary.method} N={primary.N}: max rel_err = {err:.5e} at coord = {where:.17g}", file=log)
    if args.compare:
        cfg = RunConfig.from_args(args)
        other_cfg = RunConfig(
            args.compare, cfg.N, cfg.r, cfg.target, None, cfg.digits, args.compare_r0, cfg.range_end
        )
        other = other_cfg.expansion()
        res2 = analysis.sweep(other, axis, args.lo, args.hi, args.count, oracle, args.spacing)
        err2, where2 = res2.max_error()
        print(f"{other.method} N={other.N}: max rel_err = {err2:.5e} at coord = {where2:.17g}", file=log)
        ratio = err2 / err if err else float("inf")
        print(f"ratio {other.method}/{primary.method} = {ratio:.3e}", file=log)
    return EXIT_OK


COMMANDS = {"coeffs": cmd_coeffs, "solve-r": cmd_solve_r, "eval": cmd_eval, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, UnsupportedSchemeError, PrecisionError) as exc:
        print(f"polegamma: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoRootError, ConditioningError, AssemblyError, PoleError, DomainError, ArithmeticError) as exc:
        print(f"polegamma: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"polegamma: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
