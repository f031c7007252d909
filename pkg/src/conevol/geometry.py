"""Floating-point geometry of H-polytopes P(U, b) and their cone volumes.

The central objects are a matrix U of m unit outer normals positively
spanning R^n, a vector b >= 0 of support levels, and the polytope
P(U, b) = {x : U^T x <= b}.  From these we derive vertices, facet
(n-1)-measures, the volume via the pyramid decomposition with apex at the
origin, and the cone-volume vector gamma with gamma_i = b_i * phi_i / n.

All objects are immutable after construction and all functions are pure,
so everything here is safe to call concurrently.
"""

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from ._linalg import dedup_rows, orthonormal_complement, svd_rank
from .errors import (
    DuplicateDirection,
    NotPositivelySpanning,
    OriginLeavesBody,
    ZeroColumn,
    ZeroVolume,
)

TOL_UNIT = 1e-12
TOL_INCIDENCE = 1e-9
TOL_DISTINCT = 1e-9


def positively_spans(columns: np.ndarray, tol: float = 1e-9) -> bool:
    """True when the positive hull of the columns is the whole space.

    Tests rank first, then feasibility of  sum_i lambda_i u_i = -u_j,
    lambda >= 0  for every column j.
    """
    cols = np.asarray(columns, dtype=float)
    n, m = cols.shape
    if svd_rank(cols, tol) < n:
        return False
    for j in range(m):
        res = linprog(
            np.zeros(m),
            A_eq=cols,
            b_eq=-cols[:, j],
            bounds=(0, None),
            method="highs",
        )
        if not res.success:
            return False
    return True


class NormalMatrix:
    """Unit outer normals u_1..u_m spanning R^n positively.

    Attributes:
        n: ambient dimension.
        m: number of normals, at least n + 1.
        columns: read-only (n, m) float array, one unit column per normal.
    """

    __slots__ = ("n", "m", "columns")

    def __init__(self, columns, *, check_spanning: bool = True):
        cols = np.array(columns, dtype=float)
        if cols.ndim != 2:
            raise ValueError("columns must be an (n, m) matrix")
        n, m = cols.shape
        if m < n + 1:
            raise ValueError(f"need at least n+1 = {n + 1} normals, got {m}")
        norms = np.linalg.norm(cols, axis=0)
        bad = np.where(np.abs(norms - 1.0) > TOL_UNIT)[0]
        if bad.size:
            raise ValueError(f"column {bad[0]} is not unit length")
        for i, j in itertools.combinations(range(m), 2):
            if np.linalg.norm(cols[:, i] - cols[:, j]) <= TOL_DISTINCT:
                raise DuplicateDirection(i, j)
        if check_spanning and not positively_spans(cols):
            raise NotPositivelySpanning()
        cols.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "columns", cols)

    def __setattr__(self, name, value):
        raise AttributeError("NormalMatrix is immutable")

    def column(self, i: int) -> np.ndarray:
        return self.columns[:, i]

    def submatrix(self, indices) -> "NormalMatrix":
        """The normals with the given indices as their own NormalMatrix."""
        return NormalMatrix(self.columns[:, list(indices)])

    def __repr__(self):
        return f"NormalMatrix(n={self.n}, m={self.m})"


def canonicalize(raw_normals, b, *, tol_unit: float = TOL_UNIT):
    """Rescale raw normal columns to unit length, adjusting b to match.

    The polytope {x : raw^T x <= b} is unchanged as a point set.  Raises
    ZeroColumn / DuplicateDirection / NotPositivelySpanning with the
    offending index or pair.
    """
    raw = np.array(raw_normals, dtype=float)
    b = np.array(b, dtype=float)
    if raw.ndim != 2 or b.shape != (raw.shape[1],):
        raise ValueError("normals must be (n, m) and b of length m")
    norms = np.linalg.norm(raw, axis=0)
    zero = np.where(norms <= tol_unit)[0]
    if zero.size:
        raise ZeroColumn(int(zero[0]))
    cols = raw / norms
    for i, j in itertools.combinations(range(raw.shape[1]), 2):
        if np.linalg.norm(cols[:, i] - cols[:, j]) <= TOL_DISTINCT:
            raise DuplicateDirection(i, j)
    if not positively_spans(cols):
        raise NotPositivelySpanning()
    return NormalMatrix(cols, check_spanning=False), b / norms


@dataclass(frozen=True)
class ConeVolumeVector:
    """Cone volumes gamma_i = b_i * phi_i / n; total equals vol(P)."""

    gamma: np.ndarray
    total: float

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    def normalized(self) -> np.ndarray:
        if self.total <= 0:
            raise ZeroVolume("cannot normalize a zero-volume cone vector")
        return self.gamma / self.total

    def support_size(self, tol: float = 1e-12) -> int:
        return int(np.sum(self.gamma > tol))


@dataclass(frozen=True)
class HPolytope:
    """P(U, b) with vertices, incidence, facet measures and volume.

    Degenerate right-hand sides are valid states: a b on the boundary of
    feasibility yields volume 0 and empty incidence lists, never an error.
    All derived fields are populated at construction time.
    """

    normals: NormalMatrix
    b: np.ndarray
    vertices: np.ndarray
    facet_incidence: tuple
    facet_measures: np.ndarray
    volume: float
    _facet_centroids: np.ndarray

    def facet_vertices(self, i: int) -> np.ndarray:
        return self.vertices[list(self.facet_incidence[i])]

    def has_all_facets(self, tol: float = 1e-9) -> bool:
        return bool(np.all(self.facet_measures > tol))


def build_polytope(U: NormalMatrix, b, *, tol: float = TOL_INCIDENCE) -> HPolytope:
    """Enumerate vertices of P(U, b) and derive measures and volume.

    Vertices come from all invertible n-subsets of the constraints
    (brute force; the intended regime is m <= ~12).  Requires b >= 0 so
    that the origin lies in P and the pyramid decomposition with apex 0
    is valid.
    """
    b = np.asarray(b, dtype=float)
    n, m = U.n, U.m
    if b.shape != (m,):
        raise ValueError(f"b must have length {m}")
    if np.any(b < -tol):
        raise ValueError("b must be componentwise nonnegative")
    cols = U.columns

    candidates = []
    for S in itertools.combinations(range(m), n):
        A = cols[:, S].T
        if abs(np.linalg.det(A)) <= 1e-9:
            continue
        x = np.linalg.solve(A, b[list(S)])
        slack = cols.T @ x - b
        if np.all(slack <= tol * (1.0 + np.abs(b))):
            candidates.append(x)

    if candidates:
        pts = np.array(candidates)
        verts = pts[dedup_rows(pts, tol)]
    else:
        verts = np.zeros((0, n))

    incidence = []
    for i in range(m):
        if verts.size:
            tight = np.abs(verts @ cols[:, i] - b[i]) <= tol * (
                1.0 + np.linalg.norm(verts, axis=1)
            )
            incidence.append(tuple(int(k) for k in np.where(tight)[0]))
        else:
            incidence.append(())

    measures = np.zeros(m)
    centroids = np.zeros((m, n))
    for i in range(m):
        idx = incidence[i]
        if len(idx) < n:
            continue
        measures[i], centroids[i] = _facet_measure_centroid(
            cols, b, verts[list(idx)], i, tol
        )

    volume = float(np.dot(b, measures) / n)
    verts.setflags(write=False)
    measures.setflags(write=False)
    centroids.setflags(write=False)
    return HPolytope(
        normals=U,
        b=b,
        vertices=verts,
        facet_incidence=tuple(incidence),
        facet_measures=measures,
        volume=volume,
        _facet_centroids=centroids,
    )


def _facet_measure_centroid(cols, b, facet_pts, i, tol):
    # Chart the facet hyperplane and hand the induced H-polytope to the
    # recursive pyramid evaluator.
    n = cols.shape[0]
    chart = orthonormal_complement(cols[:, i])
    p0 = facet_pts.mean(axis=0)
    W = (facet_pts - p0) @ chart
    A, c = _induced_rows(cols.T, b, i, chart, p0)
    measure, local = _measure_centroid(A, c, W, n - 1, tol)
    return measure, p0 + chart @ local


def _induced_rows(rows, rhs, skip, chart, p0):
    # Restrict every other constraint to the facet chart, drop rows whose
    # normal vanishes there, renormalize, and merge parallel duplicates
    # (two constraints can cut the facet plane in the same ridge).
    sub_rows, sub_rhs = [], []
    for j in range(rows.shape[0]):
        if j == skip:
            continue
        a = rows[j] @ chart
        nrm = np.linalg.norm(a)
        if nrm <= 1e-12:
            continue
        sub_rows.append(a / nrm)
        sub_rhs.append((rhs[j] - rows[j] @ p0) / nrm)
    keep_rows, keep_rhs = [], []
    for a, c in zip(sub_rows, sub_rhs):
        merged = False
        for k, ak in enumerate(keep_rows):
            if np.linalg.norm(a - ak) <= 1e-9:
                keep_rhs[k] = min(keep_rhs[k], c)
                merged = True
                break
        if not merged:
            keep_rows.append(a)
            keep_rhs.append(c)
    if not keep_rows:
        return np.zeros((0, chart.shape[1])), np.zeros(0)
    return np.array(keep_rows), np.array(keep_rhs)


def _measure_centroid(A, c, pts, k, tol):
    """k-measure and centroid of {y : A y <= c} given its vertex list.

    A has unit rows.  Pyramid decomposition around the vertex centroid;
    the base case is a segment.  Degenerate inputs return measure 0.
    """
    if pts.shape[0] == 0:
        return 0.0, np.zeros(k)
    if k == 1:
        lo, hi = float(pts[:, 0].min()), float(pts[:, 0].max())
        return hi - lo, np.array([(hi + lo) / 2.0])
    z = pts.mean(axis=0)
    c2 = c - A @ z
    Q = pts - z
    total = 0.0
    moment = np.zeros(k)
    qscale = 1.0 + (np.linalg.norm(Q, axis=1) if Q.size else 0.0)
    for i in range(A.shape[0]):
        tight = np.abs(Q @ A[i] - c2[i]) <= tol * qscale
        on = Q[tight]
        if on.shape[0] < k:
            continue
        chart = orthonormal_complement(A[i])
        p0 = on.mean(axis=0)
        W = (on - p0) @ chart
        subA, subc = _induced_rows(A, c2, i, chart, p0)
        phi, local = _measure_centroid(subA, subc, W, k - 1, tol)
        if phi <= 0.0:
            continue
        cone_vol = c2[i] * phi / k
        base_centroid = p0 + chart @ local
        total += cone_vol
        moment += cone_vol * (k / (k + 1.0)) * base_centroid
    if total <= 0.0:
        return 0.0, z
    return total, z + moment / total


def facet_volume(P: HPolytope, i: int) -> float:
    """(n-1)-measure of facet i; 0 when the face is lower-dimensional."""
    return float(P.facet_measures[i])


def cone_volume_vector(P: HPolytope) -> ConeVolumeVector:
    """gamma_i = b_i * phi_i / n; entries vanish for absent facets."""
    gamma = P.b * P.facet_measures / P.normals.n
    return ConeVolumeVector(gamma=gamma, total=float(gamma.sum()))


def centroid(P: HPolytope) -> np.ndarray:
    """Volume centroid, from the cone decomposition with apex at 0."""
    n = P.normals.n
    if P.volume <= 1e-12:
        raise ZeroVolume("centroid of a zero-volume polytope")
    acc = np.zeros(n)
    for i in range(P.normals.m):
        cone_vol = P.b[i] * P.facet_measures[i] / n
        if cone_vol <= 0.0:
            continue
        acc += cone_vol * (n / (n + 1.0)) * P._facet_centroids[i]
    return acc / P.volume


def normalize_to_unit_volume(U: NormalMatrix, b, *, tol: float = 1e-12) -> np.ndarray:
    """Scale b so that P(U, b) has volume 1."""
    P = build_polytope(U, b)
    if P.volume <= tol:
        raise ZeroVolume("polytope has zero volume")
    return np.asarray(b, dtype=float) * P.volume ** (-1.0 / U.n)


def translate_cone_volumes(P: HPolytope, t) -> ConeVolumeVector:
    """Cone-volume vector of t + P, computed without rebuilding.

    Facet measures are translation invariant, so the i-th cone volume
    changes by phi_i * <u_i, t> / n.  The origin must stay inside t + P.
    """
    t = np.asarray(t, dtype=float)
    shift = P.normals.columns.T @ t
    new_b = P.b + shift
    bad = np.where(new_b < -TOL_INCIDENCE * (1.0 + np.abs(P.b)))[0]
    if bad.size:
        raise OriginLeavesBody(int(bad[0]))
    n = P.normals.n
    gamma = (P.b + shift) * P.facet_measures / n
    return ConeVolumeVector(gamma=gamma, total=float(gamma.sum()))


def continuity_probe(U: NormalMatrix, b, direction, steps: int):
    """Deviations ||gamma(U, b + h dir) - gamma(U, b)|| for h = 10^-1..10^-steps."""
    b = np.asarray(b, dtype=float)
    direction = np.asarray(direction, dtype=float)
    base = cone_volume_vector(build_polytope(U, b)).gamma
    out = []
    for k in range(1, steps + 1):
        h = 10.0 ** (-k)
        probe = b + h * direction
        if np.any(probe < -TOL_INCIDENCE):
            raise ValueError(f"b + {h} * direction leaves the nonnegative orthant")
        g = cone_volume_vector(build_polytope(U, np.maximum(probe, 0.0))).gamma
        out.append((h, float(np.linalg.norm(g - base))))
    return out


def sparse_vertex_witness(U: NormalMatrix, seed: int = 0):
    """A volume-1 right-hand side whose cone vector has support below n.

    Searches for a positively spanning column subset S with |S| <= 2n-1,
    realizes it with all |S| facets present, extends the support levels to
    the remaining directions, and translates a vertex into the origin so
    that at least n cone volumes vanish.  Returns (b, ConeVolumeVector),
    or None when no such subset exists (the parallelepiped case).
    """
    n, m = U.n, U.m
    witness_set = None
    for size in range(n + 1, 2 * n):
        for S in itertools.combinations(range(m), size):
            if positively_spans(U.columns[:, S]):
                witness_set = S
                break
        if witness_set is not None:
            break
    if witness_set is None:
        return None

    sub = U.submatrix(witness_set)
    rng = np.random.default_rng(seed)
    b_sub = None
    for trial in range(200):
        cand = np.ones(len(witness_set))
        if trial:
            cand *= 1.0 + 0.25 * rng.uniform(-1.0, 1.0, len(witness_set))
        if build_polytope(sub, cand).has_all_facets():
            b_sub = cand
            break
    if b_sub is None:  # pragma: no cover - spanning subsets always admit one
        raise RuntimeError("could not realize all facets of the witness subset")

    # Extend to all m directions by the support values of the sub-polytope,
    # scale to volume 1, then move the lexicographically smallest vertex
    # into the origin.
    P_sub = build_polytope(sub, b_sub)
    b_full = np.empty(m)
    for i in range(m):
        if i in witness_set:
            b_full[i] = b_sub[witness_set.index(i)]
        else:
            b_full[i] = float(np.max(P_sub.vertices @ U.column(i)))
    b_full = normalize_to_unit_volume(U, b_full)
    P = build_polytope(U, b_full)
    order = np.lexsort(np.round(P.vertices, 9).T[::-1])
    v = P.vertices[order[0]]
    b_shift = np.maximum(b_full - U.columns.T @ v, 0.0)
    gamma = cone_volume_vector(build_polytope(U, b_shift))
    return b_shift, gamma
