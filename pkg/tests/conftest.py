from __future__ import annotations

import math

import pytest

from polegamma.kernels import ReferenceOracle
from polegamma.precision import PrecisionContext
from polegamma.schemes import RTarget, build_expansion, solve_r

CRITERIA: dict[int, tuple[bool, str]] = {}


def units_in_fifth(value: float, printed: float) -> float:
    """Distance from ``printed`` in units of its 5th significant digit."""
    ulp = 10.0 ** (math.floor(math.log10(abs(printed))) - 4)
    return abs(value - printed) / ulp


@pytest.fixture(scope="session")
def oracle50():
    return ReferenceOracle(ctx=PrecisionContext(50))


@pytest.fixture(scope="session")
def oracle40():
    return ReferenceOracle(ctx=PrecisionContext(40))


@pytest.fixture(scope="session")
def make_expansion(oracle50):
    """Cached ``(method, N, target, r0) -> PoleExpansion`` with solved r."""
    cache = {}

    def make(method, N=8, target="inf", r0=None, nodes=None):
        key = (method, N, target, r0, nodes)
        if key not in cache:
            t = RTarget.parse(target)
            r = solve_r(method, N, t, oracle50, nodes, r0=r0)
            cache[key] = build_expansion(method, N, r, oracle50, nodes, r_target=t)
        return cache[key]

    return make


@pytest.fixture
def criterion():
    """Record one acceptance line and fail the test if ``ok`` is false."""

    def report(number: int, ok: bool, detail: str, extra: str = "") -> None:
        ok = bool(ok)
        CRITERIA[number] = (ok, detail)
        print(f"CRITERION {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        if not ok:
            pytest.fail(f"criterion {number}: {detail}" + (f"\n{extra}" if extra else ""), pytrace=False)

    return report


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
