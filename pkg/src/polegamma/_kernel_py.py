"""Pure-Python double-precision evaluation kernel.

Mirrors ``_kernel_c.pyx`` line for line; used when the compiled extension is
unavailable or ``POLEGAMMA_PURE_PYTHON=1`` is set.
"""

import cmath
import math

import numpy as np

STATUS_VALUE = 0
STATUS_POLE = 1
STATUS_OVERFLOW = 2

LOG_DBL_MAX = math.log(1.7976931348623157e308)
# exp() of a real part inside (-SAFE_EXP, SAFE_EXP) stays normal and finite
SAFE_EXP = 700.0
LN_PI = math.log(math.pi)
LN2 = math.log(2.0)


def _pole_sum(c_inf, coeffs, z):
    acc = complex(c_inf)
    n = 0
    # numpy scalars would switch to numpy's complex division, which rounds differently
    for cn in coeffs.tolist() if isinstance(coeffs, np.ndarray) else coeffs:
        acc += cn / (z + n)
        n += 1
    return acc


def _log_sin_pi(d):
    # log(sin(pi d)) without overflow for large |Im d|
    x = math.pi * d
    if abs(x.imag) < SAFE_EXP:
        return cmath.log(cmath.sin(x))
    if x.imag > 0:
        return complex(-LN2, 0.5 * math.pi) - 1j * x
    return complex(-LN2, -0.5 * math.pi) + 1j * x


def log_gamma_point(c_inf, coeffs, r, z):
    """``(z-1/2) ln(z+r) - z - r + ln F_N(z)``; no domain checks."""
    z = complex(z)
    phi = (z - 0.5) * cmath.log(z + r) - z - r
    return phi + cmath.log(_pole_sum(c_inf, coeffs, z))


def gamma_point(c_inf, coeffs, r, z):
    """Evaluate the pole expansion at one point.

    Returns ``(status, value, log_value)``. For a pole ``value`` carries the
    index ``m`` (pole at ``-m``); for overflow only ``log_value`` is set.
    """
    z = complex(z)
    x = z.real
    y = z.imag
    if y == 0.0 and x <= 0.0 and x == math.floor(x):
        return STATUS_POLE, complex(-x), 0j

    if x >= 0.5:
        phi = (z - 0.5) * cmath.log(z + r) - z - r
        fn = _pole_sum(c_inf, coeffs, z)
        if -SAFE_EXP < phi.real < SAFE_EXP:
            v = cmath.exp(phi) * fn
            if math.isfinite(v.real) and math.isfinite(v.imag):
                return STATUS_VALUE, v, 0j
        lg = phi + cmath.log(fn)
        if lg.real > LOG_DBL_MAX:
            return STATUS_OVERFLOW, 0j, lg
        return STATUS_VALUE, cmath.exp(lg), 0j

    # reflection: Gamma(z) = pi / (sin(pi z) Gamma_N(1 - z))
    w = 1.0 - z
    phi = (w - 0.5) * cmath.log(w + r) - w - r
    fn = _pole_sum(c_inf, coeffs, w)
    m = math.floor(x + 0.5)
    d = z - m
    odd = int(m) & 1
    big = math.pi * abs(d.imag)
    if abs(phi.real) + big < SAFE_EXP:
        s = cmath.sin(math.pi * d)
        if odd:
            s = -s
        v = math.pi / (s * cmath.exp(phi) * fn)
        if math.isfinite(v.real) and math.isfinite(v.imag):
            return STATUS_VALUE, v, 0j
    ls = _log_sin_pi(d)
    if odd:
        ls += 1j * math.pi
    lg = LN_PI - ls - phi - cmath.log(fn)
    if lg.real > LOG_DBL_MAX:
        return STATUS_OVERFLOW, 0j, lg
    return STATUS_VALUE, cmath.exp(lg), 0j


def gamma_array(c_inf, coeffs, r, zs):
    """Vectorised :func:`gamma_point` over a complex128 array."""
    zs = np.ascontiguousarray(zs, dtype=np.complex128).ravel()
    coeffs = [float(c) for c in coeffs]
    values = np.zeros(zs.shape, dtype=np.complex128)
    logs = np.zeros(zs.shape, dtype=np.complex128)
    status = np.zeros(zs.shape, dtype=np.int8)
    for i in range(zs.shape[0]):
        st, v, lg = gamma_point(c_inf, coeffs, r, zs[i])
        status[i] = st
        values[i] = v
        logs[i] = lg
    return values, status, logs
