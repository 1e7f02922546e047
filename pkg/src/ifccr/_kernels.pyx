# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Same contract as ``ifccr._kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, log, ceil, sqrt

cnp.import_array()

cdef double INV_PHI = (sqrt(5.0) - 1.0) / 2.0


cdef inline double _trig(double a, double b, double c, double d, double t) nogil:
    cdef double s = sin(t)
    cdef double co = cos(t)
    return a * s * s + b * co * co + c * s + d * co


def golden_iterations(double width, double xtol):
    if width <= xtol:
        return 0
    return int(ceil(log(xtol / width) / log(INV_PHI)))


def maximize_trig(a, b, c, d, double lo, double hi, int n_grid=64, double xtol=1e-10):
    if n_grid < 2:
        raise ValueError("n_grid must be >= 2")
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0]
    out_f = np.empty(n, dtype=np.float64)
    out_t = np.empty(n, dtype=np.float64)
    cdef double[::1] of = out_f
    cdef double[::1] ot = out_t
    cdef double[::1] grid = np.linspace(lo, hi, n_grid)
    # the grid is shared by every element; tabulate its sines and cosines once
    cdef double[::1] gs = np.sin(grid)
    cdef double[::1] gc = np.cos(grid)
    cdef int iters = golden_iterations(2.0 * (hi - lo) / (n_grid - 1), xtol)
    cdef Py_ssize_t i
    cdef int j, k, it
    cdef double f, best_f, left, right, x1, x2, f1, f2, tm, fm
    cdef double ai, bi, ci, di

    with nogil:
        for i in range(n):
            ai = av[i]; bi = bv[i]; ci = cv[i]; di = dv[i]
            k = 0
            best_f = ai * gs[0] * gs[0] + bi * gc[0] * gc[0] + ci * gs[0] + di * gc[0]
            for j in range(1, n_grid):
                f = ai * gs[j] * gs[j] + bi * gc[j] * gc[j] + ci * gs[j] + di * gc[j]
                if f > best_f:
                    best_f = f
                    k = j
            left = grid[k - 1 if k > 0 else 0]
            right = grid[k + 1 if k < n_grid - 1 else n_grid - 1]
            x1 = right - INV_PHI * (right - left)
            x2 = left + INV_PHI * (right - left)
            f1 = _trig(ai, bi, ci, di, x1)
            f2 = _trig(ai, bi, ci, di, x2)
            for it in range(iters):
                if f1 < f2:
                    left = x1
                    x1 = x2
                    f1 = f2
                    x2 = left + INV_PHI * (right - left)
                    f2 = _trig(ai, bi, ci, di, x2)
                else:
                    right = x2
                    x2 = x1
                    f2 = f1
                    x1 = right - INV_PHI * (right - left)
                    f1 = _trig(ai, bi, ci, di, x1)
            tm = 0.5 * (left + right)
            fm = _trig(ai, bi, ci, di, tm)
            if fm > best_f:
                of[i] = fm
                ot[i] = tm
            else:
                of[i] = best_f
                ot[i] = grid[k]
    return out_f, out_t


def entropy_nats(p):
    cdef const double[::1] v = np.ascontiguousarray(p, dtype=np.float64).ravel()
    cdef Py_ssize_t i
    cdef double h = 0.0
    with nogil:
        for i in range(v.shape[0]):
            if v[i] > 0.0:
                h -= v[i] * log(v[i])
    return h
