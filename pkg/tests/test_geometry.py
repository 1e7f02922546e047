import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from ifccr.geometry import (
    convex_hull,
    direction,
    direction_grid,
    frontier,
    includes,
    pentagon_corners,
    support,
)
from ifccr.model import ChannelError, Pentagon, RegionFamily

from helpers import random_pentagon
from oracles import halfplanes, lp_max_2d, lp_support


def as_set(points):
    return {(round(x, 12), round(y, 12)) for x, y in points}


@pytest.mark.parametrize(
    "pent, expected",
    [
        (Pentagon(1, 1, 2), {(0, 0), (1, 0), (0, 1), (1, 1)}),
        (Pentagon(1, 1, 1.5), {(0, 0), (1, 0), (0, 1), (1, 0.5), (0.5, 1)}),
        (Pentagon(2, 2, 3, 2.5), {(0, 0), (2, 0), (0, 2), (2, 0.5), (0.5, 2)}),
    ],
)
def test_pentagon_corners(pent, expected):
    assert as_set(pentagon_corners(pent)) == as_set(expected)


def test_corners_when_sum_binds_single_rate():
    # sum bound below r1: the R1 axis corner is clipped
    assert as_set(pentagon_corners(Pentagon(2, 1, 1.5))) == as_set(
        {(0, 0), (1.5, 0), (0, 1), (0.5, 1)}
    )


def test_support_examples():
    assert support([Pentagon(1, 1, 2)], (0.5, 0.5)) == pytest.approx(1.0, abs=1e-15)
    assert support([Pentagon(1, 1, 1.5)], (0.5, 0.5)) == pytest.approx(0.75, abs=1e-15)
    # corners of both pentagons enumerated by the LP oracle
    fam = [Pentagon(1, 0.2, 1.2), Pentagon(0.2, 1, 1.2)]
    assert lp_support(fam, (0.5, 0.5)) == pytest.approx(0.6, abs=1e-15)
    assert support(fam, (0.5, 0.5)) == pytest.approx(0.6, abs=1e-15)


def test_empty_family():
    with pytest.raises(ChannelError) as exc:
        support([], (0.5, 0.5))
    assert exc.value.code == "EMPTY_FAMILY"
    with pytest.raises(ChannelError):
        frontier([])


def test_includes_examples():
    r = includes([Pentagon(1, 1, 1.5)], [Pentagon(1, 1, 2)])
    assert r.contained
    r = includes([Pentagon(1, 1, 2)], [Pentagon(1, 1, 1.5)])
    assert not r.contained
    assert r.worst_direction == pytest.approx((0.5, 0.5), abs=1e-15)
    assert r.worst_gap == pytest.approx(0.25, abs=1e-15)
    fam = [Pentagon(1, 0.3, 1.1), Pentagon(0.4, 0.9, 1.2, 1.0)]
    r = includes(fam, fam)
    assert r.contained and r.worst_gap == 0.0


def test_direction_grid():
    g = direction_grid(181)
    assert g.shape == (181, 2)
    assert np.allclose(g.sum(axis=1), 1.0)
    assert tuple(g[0]) == (1.0, 0.0) and tuple(g[-1]) == (0.0, 1.0)
    assert direction(math.pi / 4) == pytest.approx((0.5, 0.5))


def test_frontier_single_pentagon():
    f = frontier([Pentagon(1, 1, 1.5)])
    assert f.vertices == ((1.0, 0.0), (1.0, 0.5), (0.5, 1.0), (0.0, 1.0))


def test_frontier_nested_pentagons():
    big, small = Pentagon(2, 2, 3), Pentagon(1, 1, 1.5)
    assert frontier([small, big]) == frontier([big])


def test_frontier_union_hull():
    f = frontier([Pentagon(1, 0.2, 1.2), Pentagon(0.2, 1, 1.2)])
    assert f.vertices == ((1.0, 0.0), (1.0, 0.2), (0.2, 1.0), (0.0, 1.0))


def test_frontier_degenerate():
    assert frontier([Pentagon(0, 0, 0)]).vertices == ((0.0, 0.0),)
    assert frontier([Pentagon(1, 0, 1)]).vertices == ((1.0, 0.0), (0.0, 0.0))


def test_frontier_csv():
    text = frontier([Pentagon(1, 1, 1.5)]).to_csv()
    assert text.splitlines() == ["R1,R2", "1,0", "1,0.5", "0.5,1", "0,1"]


def test_region_family_accepted():
    fam = RegionFamily((Pentagon(1, 1, 1.5),))
    assert support(fam, (1, 0)) == 1.0


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_support_matches_lp_oracle(seed):
    rng = np.random.default_rng(seed)
    p = random_pentagon(rng)
    for d in direction_grid(7):
        assert abs(support([p], d) - lp_max_2d(halfplanes(p.r1_max, p.r2_max, p.sum_max, p.sum_max2), d)) <= 1e-12


def test_support_matches_scipy_linprog(rng):
    for _ in range(50):
        p = random_pentagon(rng)
        rows = halfplanes(p.r1_max, p.r2_max, p.sum_max, p.sum_max2)
        A = [[a, b] for a, b, _ in rows]
        b = [c for _, _, c in rows]
        w = rng.dirichlet([1, 1])
        res = linprog(-w, A_ub=A, b_ub=b, bounds=[(None, None)] * 2, method="highs")
        assert support([p], w) == pytest.approx(-res.fun, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_frontier_convex_and_exact(seed):
    rng = np.random.default_rng(seed)
    fam = [random_pentagon(rng) for _ in range(rng.integers(1, 6))]
    f = frontier(fam)
    v = np.array(f.vertices)
    edges = np.diff(v, axis=0)
    cross = edges[:-1, 0] * edges[1:, 1] - edges[:-1, 1] * edges[1:, 0]
    assert np.all(cross > 0)  # counter-clockwise, strictly convex turns
    assert np.all(np.diff(v[:, 0]) <= 0) and np.all(np.diff(v[:, 1]) >= 0)
    for d in direction_grid(31):
        assert abs(f.support(d) - support(fam, d)) <= 1e-12


def test_hull_against_scipy(rng):
    pts = rng.random((40, 2))
    ours = convex_hull(pts)
    ref = ConvexHull(pts)
    assert as_set(ours) == as_set(pts[ref.vertices])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mutual_inclusion_implies_equal_support(seed):
    rng = np.random.default_rng(seed)
    a = [random_pentagon(rng) for _ in range(3)]
    b = list(reversed(a)) + [Pentagon(0, 0, 0)]
    tol = 1e-9
    assert includes(a, b, tol=tol).contained and includes(b, a, tol=tol).contained
    for d in direction_grid(181):
        assert abs(support(a, d) - support(b, d)) <= 2 * tol
