"""Pure numpy implementations of the hot kernels.

Kept numerically equivalent to ``_kernels.pyx``; see ``ifccr._backend``.
"""
import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _trig(a, b, c, d, t):
    s = np.sin(t)
    co = np.cos(t)
    return a * s * s + b * co * co + c * s + d * co


def golden_iterations(width, xtol):
    if width <= xtol:
        return 0
    return int(math.ceil(math.log(xtol / width) / math.log(INV_PHI)))


def maximize_trig(a, b, c, d, lo, hi, n_grid=64, xtol=1e-10):
    """Maximize ``a sin^2 t + b cos^2 t + c sin t + d cos t`` over ``[lo, hi]``.

    Batched over the coefficient arrays.  A uniform grid of ``n_grid`` points
    locates the best cell, golden-section search refines inside the two
    neighbouring cells.  Returns ``(fmax, tmax)``.
    """
    a, b, c, d = (np.ascontiguousarray(v, dtype=float) for v in (a, b, c, d))
    n = a.shape[0]
    if n_grid < 2:
        raise ValueError("n_grid must be >= 2")
    grid = np.linspace(lo, hi, n_grid)
    vals = _trig(a[:, None], b[:, None], c[:, None], d[:, None], grid[None, :])
    k = np.argmax(vals, axis=1)
    best_f = vals[np.arange(n), k]
    best_t = grid[k]

    left = grid[np.maximum(k - 1, 0)]
    right = grid[np.minimum(k + 1, n_grid - 1)]
    x1 = right - INV_PHI * (right - left)
    x2 = left + INV_PHI * (right - left)
    f1 = _trig(a, b, c, d, x1)
    f2 = _trig(a, b, c, d, x2)
    for _ in range(golden_iterations(2.0 * (hi - lo) / (n_grid - 1), xtol)):
        go_right = f1 < f2
        left = np.where(go_right, x1, left)
        right = np.where(go_right, right, x2)
        nx1 = np.where(go_right, x2, right - INV_PHI * (right - left))
        nx2 = np.where(go_right, left + INV_PHI * (right - left), x1)
        nf1 = np.where(go_right, f2, 0.0)
        nf2 = np.where(go_right, 0.0, f1)
        fresh = np.where(go_right, nx2, nx1)
        ff = _trig(a, b, c, d, fresh)
        f1 = np.where(go_right, nf1, ff)
        f2 = np.where(go_right, ff, nf2)
        x1, x2 = nx1, nx2

    tm = 0.5 * (left + right)
    fm = _trig(a, b, c, d, tm)
    better = fm > best_f
    return np.where(better, fm, best_f), np.where(better, tm, best_t)


def entropy_nats(p):
    """Shannon entropy in nats of a flat probability array; zero atoms skipped."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0.0]
    return float(-np.sum(p * np.log(p)))
