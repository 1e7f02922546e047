"""Exact two-dimensional geometry for pentagon rate regions.

Regions are compared after convexification: the support function of a union of
pentagons is the max over all of their corner points, so everything here is
computed from corners and is exact up to floating-point round-off.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import ChannelError, Pentagon, RegionFamily

DEFAULT_DIRECTIONS = 181
DEFAULT_TOL = 1e-9


def direction(angle: float) -> tuple:
    """Weight vector (w1, w2) >= 0 with w1 + w2 = 1 for an angle in [0, pi/2]."""
    c, s = math.cos(angle), math.sin(angle)
    if abs(c) < 1e-15:
        c = 0.0
    return (c / (c + s), s / (c + s))


def direction_grid(n: int = DEFAULT_DIRECTIONS) -> np.ndarray:
    """``n`` directions uniform in angle over the quarter circle, shape (n, 2)."""
    if n < 3:
        raise ValueError("need at least 3 directions")
    return np.array([direction(a) for a in np.linspace(0.0, math.pi / 2, n)])


def pentagon_corners(p: Pentagon) -> list:
    a, b, c = p.r1_max, p.r2_max, p.sum_bound
    if c >= a + b:
        pts = [(0.0, 0.0), (a, 0.0), (0.0, b), (a, b)]
    else:
        ea, eb = min(a, c), min(b, c)
        pts = [(0.0, 0.0), (ea, 0.0), (0.0, eb), (ea, c - ea), (c - eb, eb)]
    out = []
    for q in pts:
        if q not in out:
            out.append(q)
    return out


def _as_pentagons(family) -> list:
    if isinstance(family, Pentagon):
        family = [family]
    elif isinstance(family, RegionFamily):
        family = family.pentagons
    family = list(family)
    if not family:
        raise ChannelError("EMPTY_FAMILY", "need at least one pentagon")
    return family


def corner_points(family) -> np.ndarray:
    """All corner points of all pentagons, shape (k, 2)."""
    pts = [q for p in _as_pentagons(family) for q in pentagon_corners(p)]
    return np.array(pts, dtype=float)


def _bounds(family) -> np.ndarray:
    return np.array([(p.r1_max, p.r2_max, p.sum_bound) for p in _as_pentagons(family)])


def _support_many(family, dirs: np.ndarray) -> np.ndarray:
    # Max of w.R over a pentagon is at one of its corners; evaluate the three
    # nonzero corner candidates for every pentagon at once.
    abc = _bounds(family)
    a, b, c = abc[:, 0], abc[:, 1], abc[:, 2]
    ea, eb = np.minimum(a, c), np.minimum(b, c)
    corner_r1 = np.stack([ea, np.zeros_like(a), ea, np.minimum(a, c - eb)])
    corner_r2 = np.stack([np.zeros_like(a), eb, np.minimum(b, c - ea), eb])
    vals = dirs[:, 0, None, None] * corner_r1[None] + dirs[:, 1, None, None] * corner_r2[None]
    return np.maximum(vals.reshape(len(dirs), -1).max(axis=1), 0.0)


def support(family, d: Sequence[float]) -> float:
    """Support function of the convex hull of the union, in direction ``d``."""
    return float(_support_many(family, np.asarray([d], dtype=float))[0])


def support_grid(family, n_directions: int = DEFAULT_DIRECTIONS) -> np.ndarray:
    return _support_many(family, direction_grid(n_directions))


@dataclass(frozen=True)
class Inclusion:
    contained: bool
    worst_direction: tuple
    worst_gap: float


def includes(inner, outer, n_directions: int = DEFAULT_DIRECTIONS, tol: float = DEFAULT_TOL) -> Inclusion:
    """Is conv(inner) inside conv(outer), judged on a grid of support directions?

    ``worst_gap`` is ``max_d support(inner, d) - support(outer, d)``.
    """
    dirs = direction_grid(n_directions)
    gaps = _support_many(inner, dirs) - _support_many(outer, dirs)
    k = int(np.argmax(gaps))
    return Inclusion(bool(gaps[k] <= tol), tuple(dirs[k].tolist()), float(gaps[k]))


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable) -> list:
    """Counter-clockwise hull, collinear points dropped (monotone chain)."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class Frontier:
    """Hull boundary from the (r1*, 0) side to the (0, r2*) side."""

    vertices: tuple

    def support(self, d: Sequence[float]) -> float:
        return max(d[0] * x + d[1] * y for x, y in self.vertices)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("R1,R2\n")
        for x, y in self.vertices:
            buf.write(f"{x:.12g},{y:.12g}\n")
        return buf.getvalue()


def frontier(family) -> Frontier:
    pts = corner_points(family)
    hull = convex_hull(np.vstack([pts, [[0.0, 0.0]]]))
    if hull == [(0.0, 0.0)]:
        return Frontier(((0.0, 0.0),))
    # hull starts at (0, 0), the lexicographic minimum, and runs counter-clockwise
    start = hull.index((0.0, 0.0))
    ring = hull[start + 1:] + hull[:start]
    if ring[-1][0] != 0.0:
        ring.append((0.0, 0.0))
    if ring[0][1] != 0.0:
        ring.insert(0, (0.0, 0.0))
    return Frontier(tuple(ring))
