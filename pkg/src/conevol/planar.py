"""Exact polygon machinery: ordered normal fans, edge-length linear forms,
the full-edge type cone, and the closed-form trapezoid membership test.

In the plane the edge lengths of P(U, b) are linear in b on the cone
where every direction supports an edge, the area is the quadratic form
sum_i f_i(b) b_i / 2, and for trapezoid normal sets the cone-volume set
has the explicit two-branch description implemented below.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NotNormalized,
    NotPlanar,
    NotPositive,
    OutsideTypeCone,
)
from .geometry import NormalMatrix
from .polynomials import Polynomial


@dataclass(frozen=True)
class PlanarFan:
    """Counter-clockwise ordering of planar normals.

    order[k] is the original column index at angular position k; inner[k]
    is the inner product of the normals at positions k and k+1 (mod m).
    Consecutive angular gaps lie strictly in (0, pi).
    """

    normals: NormalMatrix
    order: tuple
    inner: tuple

    @property
    def m(self):
        return self.normals.m

    def position(self, original_index: int) -> int:
        return self.order.index(original_index)

    def column_at(self, position: int) -> np.ndarray:
        return self.normals.column(self.order[position % self.m])


def order_ccw(U: NormalMatrix) -> PlanarFan:
    """Sort the columns counter-clockwise by angle."""
    if U.n != 2:
        raise NotPlanar(f"fan ordering needs n = 2, got n = {U.n}")
    angles = np.mod(np.arctan2(U.columns[1], U.columns[0]), 2.0 * np.pi)
    order = tuple(int(i) for i in np.argsort(angles, kind="stable"))
    inner = []
    for k in range(U.m):
        a = U.column(order[k])
        b = U.column(order[(k + 1) % U.m])
        cross = a[0] * b[1] - a[1] * b[0]
        if cross <= 1e-12:
            raise NotPlanar(
                "consecutive normals span an angular gap outside (0, pi)"
            )
        inner.append(float(a @ b))
    return PlanarFan(normals=U, order=order, inner=tuple(inner))


@dataclass(frozen=True)
class EdgeLengthForms:
    """Linear forms giving each edge length on the full-edge type cone.

    matrix is m x m in original index space: lengths(b) = matrix @ b.
    For the edge at fan position k with neighbor gaps of cosine c_k
    (next) and c_{k-1} (previous), the self coefficient is
    -(c_k/s_k + c_{k-1}/s_{k-1}) and the neighbor coefficients are
    1/s_k and 1/s_{k-1} with s = sqrt(1 - c^2).
    """

    fan: PlanarFan
    matrix: np.ndarray

    def lengths(self, b) -> np.ndarray:
        return self.matrix @ np.asarray(b, dtype=float)


def edge_length_forms(fan: PlanarFan) -> EdgeLengthForms:
    m = fan.m
    F = np.zeros((m, m))
    for k in range(m):
        c_next = fan.inner[k]
        c_prev = fan.inner[(k - 1) % m]
        s_next = math.sqrt(1.0 - c_next * c_next)
        s_prev = math.sqrt(1.0 - c_prev * c_prev)
        i = fan.order[k]
        F[i, i] = -(c_next / s_next + c_prev / s_prev)
        F[i, fan.order[(k + 1) % m]] += 1.0 / s_next
        F[i, fan.order[(k - 1) % m]] += 1.0 / s_prev
    F.setflags(write=False)
    return EdgeLengthForms(fan=fan, matrix=F)


def stancu_lengths(fan: PlanarFan, b, *, tol: float = 1e-9) -> np.ndarray:
    """Edge lengths from the linear forms; valid on the full-edge cone."""
    lengths = edge_length_forms(fan).lengths(b)
    bad = np.where(lengths < -tol)[0]
    if bad.size:
        raise OutsideTypeCone(tuple(int(i) for i in bad))
    return lengths


def area_polynomial(fan: PlanarFan) -> Polynomial:
    """The quadratic sum_i f_i(b) * b_i / 2 equal to the area on the cone."""
    m = fan.m
    F = edge_length_forms(fan).matrix
    poly = Polynomial.zero(m)
    for i in range(m):
        f_i = Polynomial.linear(F[i])
        poly = poly + f_i * Polynomial.variable(m, i, 0.5)
    return poly


@dataclass(frozen=True)
class TypeCone:
    """Linear inequalities rows @ b >= 0 cutting out the full-edge cone.

    provenance[r] = (l, i): row r states that the intersection point of
    the edge lines at original indices l and its ccw successor stays on
    the feasible side of constraint i.  Redundant rows are retained.
    """

    rows: np.ndarray
    provenance: tuple


def planar_type_cone(fan: PlanarFan) -> TypeCone:
    """All m(m-2) vertex conditions of the full-edge type cone."""
    m = fan.m
    rows = []
    provenance = []
    for k in range(m):
        l_idx = fan.order[k]
        l_next = fan.order[(k + 1) % m]
        M = np.vstack([fan.column_at(k), fan.column_at(k + 1)])
        Minv = np.linalg.inv(M)
        for i in range(m):
            if i in (l_idx, l_next):
                continue
            u_i = fan.normals.column(i)
            coeff = np.zeros(m)
            coeff[i] = 1.0
            w = u_i @ Minv
            coeff[l_idx] -= w[0]
            coeff[l_next] -= w[1]
            rows.append(coeff)
            provenance.append((l_idx, i))
    arr = np.array(rows)
    arr.setflags(write=False)
    return TypeCone(rows=arr, provenance=tuple(provenance))


def detect_trapezoid_labeling(U: NormalMatrix, *, tol: float = 1e-9):
    """Labeling (i1, i2, i3, i4) matching the trapezoid conventions.

    i3 = -i1 is the antipodal pair, i1 the member with positive inner
    product against both remaining normals, and (i2, i4) the remaining
    indices in counter-clockwise order after i1.
    """
    if U.n != 2 or U.m != 4:
        raise ValueError("trapezoid labeling needs n = 2, m = 4")
    cols = U.columns
    pair = None
    for i in range(4):
        for j in range(i + 1, 4):
            if np.linalg.norm(cols[:, i] + cols[:, j]) <= tol:
                if pair is not None:
                    raise ValueError("normal set has two antipodal pairs")
                pair = (i, j)
    if pair is None:
        raise ValueError("normal set has no antipodal pair")
    rest = [i for i in range(4) if i not in pair]
    for first, third in (pair, pair[::-1]):
        dots = [float(cols[:, first] @ cols[:, r]) for r in rest]
        if all(d > tol for d in dots):
            fan = order_ccw(U)
            k = fan.position(first)
            second = fan.order[(k + 1) % 4]
            fourth = fan.order[(k + 3) % 4]
            return (first, second, third, fourth)
    raise ValueError("neither antipodal member sees both slanted normals")


def trapezoid_membership(gamma, labeling=(0, 1, 2, 3), *, tol: float = 1e-12) -> bool:
    """Closed-form membership test for trapezoid cone-volume vectors.

    With coordinates (g1, g2, g3, g4) read through `labeling`, accepts iff
    g1 + g3 < g2 + g4, or g1 + g3 >= g2 + g4 >= 2 sqrt(g1 g3) with g1 < g3.
    Zero entries are allowed (they arise for triangles in the closure);
    negative entries raise NotPositive.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (4,):
        raise ValueError("gamma must have length 4")
    neg = np.where(gamma < -tol)[0]
    if neg.size:
        raise NotPositive(int(neg[0]))
    if abs(gamma.sum() - 1.0) > 1e-9:
        raise NotNormalized(f"sum(gamma) = {gamma.sum():.12g} != 1")
    g1, g2, g3, g4 = (max(float(gamma[i]), 0.0) for i in labeling)
    parallel = g1 + g3
    slanted = g2 + g4
    if parallel < slanted - tol:
        return True
    return bool(slanted >= 2.0 * math.sqrt(g1 * g3) - tol and g1 < g3)
