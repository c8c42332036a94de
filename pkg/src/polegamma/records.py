"""Text records for pole-expansion coefficients, and table formatting.

A record is one ``key = value`` pair per line; ``#`` starts a comment::

    method = lanczos
    N = 8
    r = 7.9060938694...
    r_target = inf
    nodes = 1,2,3,4,5,6,7,8,9
    c_inf = 2.50662827463100050241576528481104525
    c_0 = ...

Coefficients carry 36 significant digits; ``r`` carries the full working
precision. Nodes are written as exact rationals (``p/q``).
"""

from __future__ import annotations

import math
from fractions import Fraction

from .precision import PrecisionContext
from .schemes import METHODS, NodeSet, PoleExpansion, RTarget

__all__ = [
    "RecordError",
    "COEFF_DIGITS",
    "dump_expansion",
    "load_expansion",
    "format_table",
    "format_columns",
]

COEFF_DIGITS = 36
TABLE_DIGITS = 5


class RecordError(ValueError):
    """Malformed or inconsistent coefficient record."""


def _num(x, ctx: PrecisionContext, digits: int) -> str:
    return ctx.mp.nstr(ctx.real(x), digits, min_fixed=1, max_fixed=0, strip_zeros=False)


def _roundtrip_digits(ctx: PrecisionContext) -> int:
    # enough decimal digits to recover the binary working value exactly
    return int(math.ceil(ctx.mp.prec * math.log10(2))) + 1


def dump_expansion(expansion: PoleExpansion, ctx: PrecisionContext | None = None) -> str:
    ctx = ctx or expansion.context()
    lines = [
        f"method = {expansion.method}",
        f"N = {expansion.N}",
        f"r = {_num(expansion.r, ctx, _roundtrip_digits(ctx))}",
        f"r_target = {expansion.r_target if expansion.r_target is not None else 'none'}",
    ]
    if expansion.nodes is None:
        lines.append("nodes = none")
    else:
        lines.append("nodes = " + ",".join(str(p) for p in expansion.nodes.points))
    lines.append(f"c_inf = {_num(expansion.c_inf, ctx, COEFF_DIGITS)}")
    for n, cn in enumerate(expansion.c):
        lines.append(f"c_{n} = {_num(cn, ctx, COEFF_DIGITS)}")
    return "\n".join(lines) + "\n"


def _parse_pairs(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise RecordError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in out:
            raise RecordError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_expansion(text: str, ctx: PrecisionContext | None = None) -> PoleExpansion:
    """Parse a record written by :func:`dump_expansion`."""
    ctx = ctx or PrecisionContext()
    kv = _parse_pairs(text)
    for key in ("method", "N", "r", "c_inf"):
        if key not in kv:
            raise RecordError(f"missing field {key!r}")
    method = kv["method"]
    if method not in METHODS:
        raise RecordError(f"unknown method {method!r}")
    try:
        N = int(kv["N"])
        mp = ctx.mp
        r = mp.mpf(kv["r"])
        c_inf = mp.mpf(kv["c_inf"])
        c = tuple(mp.mpf(kv[f"c_{n}"]) for n in range(N))
    except KeyError as exc:
        raise RecordError(f"missing coefficient {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise RecordError(str(exc)) from None
    extra = [k for k in kv if k.startswith("c_") and k != "c_inf" and not (k[2:].isdigit() and int(k[2:]) < N)]
    if extra:
        raise RecordError(f"unexpected fields for N = {N}: {', '.join(extra)}")
    target = kv.get("r_target", "none")
    r_target = None if target == "none" else RTarget.parse(target)
    nodes_text = kv.get("nodes", "none")
    nodes = None
    if nodes_text != "none":
        try:
            nodes = NodeSet(tuple(Fraction(p) for p in nodes_text.split(",")), method)
        except ValueError as exc:
            raise RecordError(f"bad nodes: {exc}") from None
    try:
        return PoleExpansion(N, r, c_inf, c, method, nodes, r_target, ctx.digits)
    except ValueError as exc:
        raise RecordError(str(exc)) from None


def _cell(x) -> str:
    return f"{float(x):.{TABLE_DIGITS - 1}e}"


def _r_cell(expansion: PoleExpansion, ctx: PrecisionContext) -> str:
    r = ctx.real(expansion.r)
    if r == ctx.mp.nint(r):
        return str(int(r))
    if expansion.r_target is not None:
        # solved shifts are tabulated to 8 decimals
        return f"{float(r):.8f}"
    return ctx.mp.nstr(r, TABLE_DIGITS)


def format_columns(columns: dict[str, PoleExpansion], ctx: PrecisionContext | None = None) -> str:
    """Side-by-side table with rows ``r``, ``c_inf``, ``c_1 .. c_N``.

    Row ``c_(n+1)`` shows the internal coefficient ``c[n]``.
    """
    if not columns:
        raise ValueError("no columns to format")
    Ns = {e.N for e in columns.values()}
    if len(Ns) != 1:
        raise ValueError("all columns must share N")
    N = Ns.pop()
    ctx = ctx or PrecisionContext()
    rows = [["", *columns]]
    rows.append(["r", *(_r_cell(e, ctx) for e in columns.values())])
    rows.append(["c_inf", *(_cell(e.c_inf) for e in columns.values())])
    for n in range(N):
        rows.append([f"c_{n + 1}", *(_cell(e.c[n]) for e in columns.values())])
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join(
        "  ".join(cell.rjust(w) if i else cell.ljust(w) for i, (cell, w) in enumerate(zip(row, widths)))
        for row in rows
    ) + "\n"


def format_table(expansion: PoleExpansion, ctx: PrecisionContext | None = None) -> str:
    """Single-column table for one expansion."""
    return format_columns({expansion.method: expansion}, ctx)
