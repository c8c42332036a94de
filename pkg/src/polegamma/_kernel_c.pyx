# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled double-precision evaluation kernel (see ``_kernel_py`` for the algorithm)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport M_PI, floor, fabs, isfinite, log
from libc.complex cimport cexp, clog, csin, creal, cimag

cnp.import_array()

STATUS_VALUE = 0
STATUS_POLE = 1
STATUS_OVERFLOW = 2

cdef double LOG_DBL_MAX = 709.782712893384
cdef double SAFE_EXP = 700.0
cdef double LN_PI = 1.1447298858494002
cdef double LN2 = 0.6931471805599453


cdef inline double complex _pole_sum(double c_inf, const double[::1] coeffs, double complex z) noexcept nogil:
    cdef double complex acc = c_inf
    cdef Py_ssize_t n
    for n in range(coeffs.shape[0]):
        acc = acc + coeffs[n] / (z + <double>n)
    return acc


cdef inline double complex _log_sin_pi(double complex d) noexcept nogil:
    cdef double complex x = M_PI * d
    if fabs(cimag(x)) < SAFE_EXP:
        return clog(csin(x))
    if cimag(x) > 0:
        return (-LN2 + 0.5j * M_PI) - 1j * x
    return (-LN2 - 0.5j * M_PI) + 1j * x


cdef inline bint _finite(double complex v) noexcept nogil:
    return isfinite(creal(v)) and isfinite(cimag(v))


cdef int _gamma_point(double c_inf, const double[::1] coeffs, double r, double complex z,
                      double complex* value, double complex* logv) noexcept nogil:
    cdef double x = creal(z)
    cdef double y = cimag(z)
    cdef double complex phi, fn, v, lg, w, d, s, ls
    cdef double m
    cdef int odd
    value[0] = 0
    logv[0] = 0
    if y == 0.0 and x <= 0.0 and x == floor(x):
        value[0] = -x
        return 1

    if x >= 0.5:
        phi = (z - 0.5) * clog(z + r) - z - r
        fn = _pole_sum(c_inf, coeffs, z)
        if -SAFE_EXP < creal(phi) < SAFE_EXP:
            v = cexp(phi) * fn
            if _finite(v):
                value[0] = v
                return 0
        lg = phi + clog(fn)
        if creal(lg) > LOG_DBL_MAX:
            logv[0] = lg
            return 2
        value[0] = cexp(lg)
        return 0

    w = 1.0 - z
    phi = (w - 0.5) * clog(w + r) - w - r
    fn = _pole_sum(c_inf, coeffs, w)
    m = floor(x + 0.5)
    d = z - m
    odd = (<long long>m) & 1
    if fabs(creal(phi)) + M_PI * fabs(cimag(d)) < SAFE_EXP:
        s = csin(M_PI * d)
        if odd:
            s = -s
        v = M_PI / (s * cexp(phi) * fn)
        if _finite(v):
            value[0] = v
            return 0
    ls = _log_sin_pi(d)
    if odd:
        ls = ls + 1j * M_PI
    lg = LN_PI - ls - phi - clog(fn)
    if creal(lg) > LOG_DBL_MAX:
        logv[0] = lg
        return 2
    value[0] = cexp(lg)
    return 0


def log_gamma_point(double c_inf, coeffs, double r, z):
    cdef const double[::1] cv = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef double complex zz = z
    cdef double complex phi = (zz - 0.5) * clog(zz + r) - zz - r
    return phi + clog(_pole_sum(c_inf, cv, zz))


def gamma_point(double c_inf, coeffs, double r, z):
    cdef const double[::1] cv = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef double complex value, logv
    cdef int st = _gamma_point(c_inf, cv, r, z, &value, &logv)
    return st, value, logv


def gamma_array(double c_inf, coeffs, double r, zs):
    cdef const double[::1] cv = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zarr = np.ascontiguousarray(zs, dtype=np.complex128).ravel()
    cdef Py_ssize_t n = zarr.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] values = np.zeros(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] logs = np.zeros(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int8_t, ndim=1] status = np.zeros(n, dtype=np.int8)
    cdef double complex[::1] zv = zarr
    cdef double complex[::1] vv = values
    cdef double complex[::1] lv = logs
    cdef signed char[::1] sv = status
    cdef Py_ssize_t i
    cdef double complex value, logv
    with nogil:
        for i in range(n):
            sv[i] = <signed char>_gamma_point(c_inf, cv, r, zv[i], &value, &logv)
            vv[i] = value
            lv[i] = logv
    return values, status, logs
