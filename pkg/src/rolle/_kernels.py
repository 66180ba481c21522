"""Compiled inner loops shared by the scalar API and the grid sweep.

Interior critical points are located by bisection on the sign of the
logarithmic derivative ``P'/P = sum_g m_g / (x - v_g)``, which decreases
strictly from +inf to -inf on every open interval between consecutive
distinct roots. Its zero there is the zero of ``P'``.
"""

import numpy as np
from numba import njit

OK = 0
NO_CONVERGENCE = 1


@njit(cache=True)
def _logderiv(vals, mult, ng, x):
    s = 0.0
    for g in range(ng):
        s += mult[g] / (x - vals[g])
    return s


@njit(cache=True)
def _bisect(vals, mult, ng, lo, hi, tol, max_iter):
    it = 0
    while hi - lo > tol:
        if it >= max_iter:
            return 0.5 * (lo + hi), NO_CONVERGENCE
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # interval is at float resolution
        if _logderiv(vals, mult, ng, mid) > 0.0:
            lo = mid
        else:
            hi = mid
        it += 1
    return 0.5 * (lo + hi), OK


@njit(cache=True)
def critical_points_row(roots, out, vals, mult, tol, max_iter):
    """Write the d-1 critical points of sorted ``roots`` into ``out``."""
    d = roots.shape[0]
    ng = 0
    for i in range(d):
        if ng > 0 and roots[i] == vals[ng - 1]:
            mult[ng - 1] += 1.0
        else:
            vals[ng] = roots[i]
            mult[ng] = 1.0
            ng += 1
    k = 0
    status = OK
    for g in range(ng):
        for _ in range(int(mult[g]) - 1):
            out[k] = vals[g]
            k += 1
        if g < ng - 1:
            x, st = _bisect(vals, mult, ng, vals[g], vals[g + 1], tol, max_iter)
            out[k] = x
            k += 1
            if st != OK:
                status = st
    return status


@njit(cache=True)
def critical_points_batch(R, tol, max_iter):
    n, d = R.shape
    xi = np.empty((n, d - 1))
    status = np.zeros(n, dtype=np.int64)
    vals = np.empty(d)
    mult = np.empty(d)
    for i in range(n):
        status[i] = critical_points_row(R[i], xi[i], vals, mult, tol, max_iter)
    return xi, status


@njit(cache=True)
def param_gap_extrema(a, b, c, tol, max_iter):
    """m, M, m~, M~ for F = x(x-a)(x-b)(x-c)(x-1), element-wise over arrays.

    ``c`` is broadcast when it has length 1.
    """
    n = a.shape[0]
    m = np.empty(n)
    M = np.empty(n)
    mt = np.empty(n)
    Mt = np.empty(n)
    status = np.zeros(n, dtype=np.int64)
    roots = np.empty(5)
    xi = np.empty(4)
    vals = np.empty(5)
    mult = np.empty(5)
    scalar_c = c.shape[0] == 1
    for i in range(n):
        cc = c[0] if scalar_c else c[i]
        roots[0] = 0.0
        roots[1] = a[i]
        roots[2] = b[i]
        roots[3] = cc
        roots[4] = 1.0
        status[i] = critical_points_row(roots, xi, vals, mult, tol, max_iter)
        lo = np.inf
        hi = -np.inf
        for j in range(3):
            g = (roots[j + 2] - roots[j]) / 2
            if g < lo:
                lo = g
            if g > hi:
                hi = g
        m[i] = lo
        M[i] = hi
        lo = np.inf
        hi = -np.inf
        for j in range(3):
            g = xi[j + 1] - xi[j]
            if g < lo:
                lo = g
            if g > hi:
                hi = g
        mt[i] = lo
        Mt[i] = hi
    return m, M, mt, Mt, status
