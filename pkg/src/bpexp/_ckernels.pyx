"""Compiled inner loops: tridiagonal sweep and secular-equation bisection.

Mirrors ``_pykernels`` exactly; ``bpexp.kernels`` picks one at import.
"""
import numpy as np

from libc.math cimport expm1, tan, isfinite


def tridiag_solve(const double complex[::1] lower,
                  const double complex[::1] diag,
                  const double complex[::1] upper,
                  const double complex[::1] rhs):
    cdef Py_ssize_t n = diag.shape[0]
    cdef Py_ssize_t i
    cdef double complex piv
    cp_arr = np.empty(n, dtype=np.complex128)
    x_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] cp = cp_arr
    cdef double complex[::1] x = x_arr

    piv = diag[0]
    if piv == 0:
        raise ZeroDivisionError("zero pivot at row 0")
    if n > 1:
        cp[0] = upper[0] / piv
    x[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - lower[i - 1] * cp[i - 1]
        if piv == 0:
            raise ZeroDivisionError(f"zero pivot at row {i}")
        if i < n - 1:
            cp[i] = upper[i] / piv
        x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        x[i] = x[i] - cp[i] * x[i + 1]
    return x_arr


cdef double _secular(double xi, double t, const double[::1] poles,
                     const double[::1] weights, double prefactor,
                     int form, bint flip_first) nogil:
    cdef Py_ssize_t j
    cdef double arg, d, total = 0.0
    for j in range(poles.shape[0]):
        arg = t * (poles[j] - xi)
        if j == 0 and flip_first:
            arg = -arg
        if form == 0:
            d = -expm1(arg)
        else:
            d = tan(0.5 * arg)
        total += weights[j] / d
    return prefactor * total - 1.0


def secular_eval(double xi, double t, const double[::1] poles,
                 const double[::1] weights, double prefactor,
                 int form, bint flip_first):
    return _secular(xi, t, poles, weights, prefactor, form, flip_first)


def bisect_roots(const double[::1] lo, const double[::1] hi, double t,
                 const double[::1] poles, const double[::1] weights,
                 double prefactor, int form, bint flip_first, int max_iter):
    cdef Py_ssize_t k, m = lo.shape[0]
    cdef int it
    cdef double a, b, fa, fb, mid, fm
    roots_arr = np.full(m, np.nan)
    status_arr = np.zeros(m, dtype=np.int8)
    cdef double[::1] roots = roots_arr
    cdef signed char[::1] status = status_arr
    with nogil:
        for k in range(m):
            a = lo[k]
            b = hi[k]
            fa = _secular(a, t, poles, weights, prefactor, form, flip_first)
            fb = _secular(b, t, poles, weights, prefactor, form, flip_first)
            if not (isfinite(fa) and isfinite(fb)) or not ((fa < 0 < fb) or (fb < 0 < fa)):
                status[k] = 1
                continue
            for it in range(max_iter):
                mid = a + 0.5 * (b - a)
                if mid <= a or mid >= b:
                    break
                fm = _secular(mid, t, poles, weights, prefactor, form, flip_first)
                if fm == 0:
                    a = mid
                    b = mid
                    fa = fm
                    fb = fm
                    break
                if (fm < 0) == (fa < 0):
                    a = mid
                    fa = fm
                else:
                    b = mid
                    fb = fm
            roots[k] = a if (fa if fa >= 0 else -fa) <= (fb if fb >= 0 else -fb) else b
    return roots_arr, status_arr
