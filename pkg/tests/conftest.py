"""Shared fixtures: reference normal sets and independent oracles."""

import itertools

import numpy as np
import pytest
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from conevol import NormalMatrix, build_polytope

SQRT2 = float(np.sqrt(2.0))


@pytest.fixture
def square():
    """Axis square normals (e1, e2, -e1, -e2)."""
    return NormalMatrix(np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float).T)


@pytest.fixture
def cube3():
    return NormalMatrix(np.hstack([np.eye(3), -np.eye(3)]))


@pytest.fixture
def trapezoid():
    """u1 = e2, u3 = -e2, slanted pair at 45 degrees; identity labeling."""
    return NormalMatrix(
        np.array([[0, 1], [1 / SQRT2, 1 / SQRT2], [0, -1], [-1 / SQRT2, 1 / SQRT2]]).T
    )


@pytest.fixture
def pentagon():
    return NormalMatrix(
        np.array([[1, 0], [0, -1], [-1, 0], [0, 1], [1 / SQRT2, 1 / SQRT2]]).T
    )


@pytest.fixture
def triangle():
    """Right triangle with vertices (0,0), (sqrt2,0), (0,sqrt2) at b=(0,0,1)."""
    return NormalMatrix(np.array([[-1, 0], [0, -1], [1 / SQRT2, 1 / SQRT2]]).T)


def make_trapezoid(a2, a4):
    """The slope-parametrized trapezoid: u1 = e2, u2 and u4 slanted."""
    l2 = float(np.hypot(1.0, a2))
    l4 = float(np.hypot(1.0, a4))
    cols = np.array([[0, 1], [-1 / l2, -a2 / l2], [0, -1], [1 / l4, a4 / l4]]).T
    return NormalMatrix(cols), (l2, l4)


def random_normal_matrix(rng, n, m, general_position=False, max_tries=500):
    """Random unit columns, rejected until they positively span R^n."""
    for _ in range(max_tries):
        cols = rng.normal(size=(n, m))
        norms = np.linalg.norm(cols, axis=0)
        if np.any(norms < 1e-6):
            continue
        cols /= norms
        try:
            U = NormalMatrix(cols)
        except Exception:
            continue
        if general_position:
            dets = [
                abs(np.linalg.det(cols[:, S]))
                for S in itertools.combinations(range(m), n)
            ]
            if min(dets) < 1e-3:
                continue
        return U
    raise RuntimeError("could not sample a spanning normal matrix")


def random_full_facet_b(U, rng, max_tries=300):
    """A right-hand side where every direction supports a facet, or None."""
    for _ in range(max_tries):
        b = rng.uniform(0.4, 1.6, U.m)
        if build_polytope(U, b).has_all_facets():
            return b
    return None


def hull_volume(points):
    """Independent volume oracle (qhull); 0 for degenerate point sets."""
    points = np.asarray(points, dtype=float)
    if points.shape[0] <= points.shape[1]:
        return 0.0
    try:
        return float(ConvexHull(points).volume)
    except QhullError:
        return 0.0


def shoelace_area(points):
    """Polygon area from vertices sorted around their centroid."""
    pts = np.asarray(points, dtype=float)
    center = pts.mean(axis=0)
    order = np.argsort(np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0]))
    ring = pts[order]
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_edge_lengths(P):
    """Edge lengths of a planar polytope as vertex-pair distances."""
    out = np.zeros(P.normals.m)
    for i, idx in enumerate(P.facet_incidence):
        if len(idx) >= 2:
            pts = P.vertices[list(idx)]
            out[i] = max(
                np.linalg.norm(p - q)
                for p, q in itertools.combinations(pts, 2)
            )
    return out


def in_convex_hull(point, points, tol=1e-9):
    """LP feasibility: is `point` a convex combination of `points`?"""
    points = np.asarray(points, dtype=float)
    k = points.shape[0]
    A_eq = np.vstack([points.T, np.ones(k)])
    b_eq = np.concatenate([np.asarray(point, dtype=float), [1.0]])
    res = linprog(np.zeros(k), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    return bool(res.success)
