"""Pure-Python versions of the compiled kernels in ``_ckernels.pyx``."""
import math

import numpy as np


def tridiag_solve(lower, diag, upper, rhs):
    """Thomas sweep for a tridiagonal system.

    ``lower[i]`` is entry ``(i+1, i)``, ``upper[i]`` is entry ``(i, i+1)``.
    """
    n = len(diag)
    lower = [complex(v) for v in lower]
    diag = [complex(v) for v in diag]
    upper = [complex(v) for v in upper]
    rhs = [complex(v) for v in rhs]
    cp = [0j] * n
    x = [0j] * n

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
    return np.array(x, dtype=complex)


def secular_eval(xi, t, poles, weights, prefactor, form, flip_first):
    arg = t * (np.asarray(poles) - xi)
    if flip_first:
        arg[0] = -arg[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        d = -np.expm1(arg) if form == 0 else np.tan(0.5 * arg)
        return float(prefactor * np.sum(np.asarray(weights) / d) - 1.0)


def bisect_roots(lo, hi, t, poles, weights, prefactor, form, flip_first, max_iter):
    poles = np.asarray(poles, dtype=float)
    weights = np.asarray(weights, dtype=float)

    def f(x):
        return secular_eval(x, t, poles, weights, prefactor, form, flip_first)

    m = len(lo)
    roots = np.full(m, np.nan)
    status = np.zeros(m, dtype=np.int8)
    for k in range(m):
        a, b = float(lo[k]), float(hi[k])
        fa, fb = f(a), f(b)
        if not (math.isfinite(fa) and math.isfinite(fb)) or not (fa < 0 < fb or fb < 0 < fa):
            status[k] = 1
            continue
        for _ in range(max_iter):
            mid = a + 0.5 * (b - a)
            if mid <= a or mid >= b:
                break
            fm = f(mid)
            if fm == 0:
                a = b = mid
                fa = fb = fm
                break
            if (fm < 0) == (fa < 0):
                a, fa = mid, fm
            else:
                b, fb = mid, fm
        roots[k] = a if abs(fa) <= abs(fb) else b
    return roots, status
