"""Combinatorial types, local type cones, and polynomial systems.

The nonnegative right-hand-side orthant splits into finitely many
polyhedral cones over which P(U, b) keeps one simple combinatorial type;
on each such cone the volume is a polynomial of degree at most n in b
and the facet measures are polynomials of degree at most n - 1.  This
module detects types, emits the linear cone inequalities valid around a
sample b, builds the per-type system (cone rows, volume polynomial,
facet polynomials, and the cone-volume coupling), and discovers types by
seeded sampling.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import InterpolationIllConditioned, NonSimpleType, ZeroVolume
from .geometry import HPolytope, NormalMatrix, build_polytope, cone_volume_vector
from .planar import area_polynomial, edge_length_forms, order_ccw
from .polynomials import Polynomial, fit_polynomial

FACET_TOL = 1e-9


@dataclass(frozen=True)
class TypeInfo:
    """Canonical identifier of the vertex-facet incidence of P(U, b)."""

    type_id: str
    simple: bool
    incidence: tuple        # sorted tuple of per-vertex facet index tuples
    facets_present: tuple   # indices with positive facet measure


def detect_type(U: NormalMatrix, b, *, tol: float = FACET_TOL) -> TypeInfo:
    """Hash the sorted vertex-facet incidence structure of P(U, b).

    Equal for right-hand sides in the interior of the same type cone.
    A vertex on more than n facets marks the type as non-simple.
    """
    P = build_polytope(U, b)
    if P.volume <= tol:
        raise ZeroVolume("combinatorial type needs positive volume")
    return _type_info(P, tol)


def _type_info(P: HPolytope, tol: float = FACET_TOL) -> TypeInfo:
    n = P.normals.n
    per_vertex = [[] for _ in range(P.vertices.shape[0])]
    for i, vertex_ids in enumerate(P.facet_incidence):
        for v in vertex_ids:
            per_vertex[v].append(i)
    per_vertex = [tuple(t) for t in per_vertex]
    incidence = tuple(sorted(per_vertex))
    present = tuple(
        int(i) for i in np.where(P.facet_measures > tol)[0]
    )
    canon = repr((incidence, present)).encode()
    return TypeInfo(
        type_id=hashlib.sha1(canon).hexdigest()[:16],
        simple=all(len(t) == n for t in per_vertex),
        incidence=incidence,
        facets_present=present,
    )


def local_type_cone(U: NormalMatrix, b, *, tol: float = FACET_TOL):
    """Linear rows (coeffs, provenance) with rows @ b >= 0 on the cone.

    For each vertex, defined by its n tight constraints S, the solution
    x(b) = U_S^{-T} b_S is linear in b; requiring every other constraint
    to hold at x(b) yields one row per (vertex, constraint) pair.  Valid
    exactly on the closure of the type cone containing b.
    """
    info = detect_type(U, b, tol=tol)
    if not info.simple:
        raise NonSimpleType("local cone rows need a simple type")
    m = U.m
    rows, provenance = [], []
    for S in info.incidence:
        A = U.columns[:, S].T
        Ainv_t = np.linalg.inv(A).T
        for i in range(m):
            if i in S:
                continue
            w = Ainv_t @ U.column(i)
            coeff = np.zeros(m)
            coeff[i] = 1.0
            coeff[list(S)] -= w
            rows.append(coeff)
            provenance.append((S, i))
    return np.array(rows), tuple(provenance)


@dataclass(frozen=True)
class SemialgSystem:
    """Per-type polynomial system coupling b to the cone-volume vector.

    cone_rows @ b > 0 pins the combinatorial type, volume_poly(b) is the
    volume, facet_polys[i](b) the i-th facet measure, and the coupling
    states gamma_i = facet_polys[i](b) * b_i / n.
    """

    type_id: str
    n: int
    m: int
    sample_b: np.ndarray
    cone_rows: np.ndarray
    cone_provenance: tuple
    volume_poly: Polynomial
    facet_polys: tuple
    coupling: tuple  # polynomials p_i with gamma_i = p_i(b)

    def facets_present(self, tol: float = FACET_TOL):
        return tuple(
            i for i, p in enumerate(self.facet_polys) if p(self.sample_b) > tol
        )

    def gamma_at(self, b) -> np.ndarray:
        return np.array([p(b) for p in self.coupling])


def _planar_polynomials(U, info):
    active = [i for i in range(U.m) if i in info.facets_present]
    sub = U.submatrix(active)
    fan = order_ccw(sub)
    forms = edge_length_forms(fan).matrix
    facet_polys = []
    for i in range(U.m):
        if i in active:
            coeffs = np.zeros(U.m)
            coeffs[active] = forms[active.index(i)]
            facet_polys.append(Polynomial.linear(coeffs))
        else:
            facet_polys.append(Polynomial.zero(U.m))
    area = area_polynomial(fan)
    volume = Polynomial.zero(U.m)
    for e, c in area.terms.items():
        lifted = [0] * U.m
        for pos, p in enumerate(e):
            lifted[active[pos]] = p
        volume = volume + Polynomial(U.m, {tuple(lifted): c})
    return volume, facet_polys


def _sample_in_cone(U, b_sample, type_id, rng, count, tol):
    b_sample = np.asarray(b_sample, dtype=float)
    samples, vols, measures = [], [], []
    attempts = 0
    while len(samples) < count and attempts < 40 * count:
        attempts += 1
        cand = b_sample * (1.0 + 0.35 * rng.uniform(-1.0, 1.0, b_sample.size))
        P = build_polytope(U, cand)
        if P.volume <= tol:
            continue
        if _type_info(P, tol).type_id != type_id:
            continue
        samples.append(cand)
        vols.append(P.volume)
        measures.append(P.facet_measures)
    if len(samples) < count:
        raise InterpolationIllConditioned(
            f"could only draw {len(samples)} interior samples"
        )
    return np.array(samples), np.array(vols), np.array(measures)


def build_system(U: NormalMatrix, b_sample, *, seed: int = 0,
                 tol: float = FACET_TOL) -> SemialgSystem:
    """Construct the polynomial system of the type cone containing b_sample.

    In the plane the polynomials come symbolically from the edge-length
    linear forms of the active sub-fan; in higher dimension they are
    recovered by least-squares interpolation over samples drawn from the
    same type cone, with a held-out residual check at 1e-7.
    """
    info = detect_type(U, b_sample, tol=tol)
    if not info.simple:
        raise NonSimpleType("polynomial systems are built per simple type")
    rows, provenance = local_type_cone(U, b_sample, tol=tol)
    b_sample = np.asarray(b_sample, dtype=float)

    if U.n == 2:
        volume_poly, facet_polys = _planar_polynomials(U, info)
    else:
        rng = np.random.default_rng(seed)
        n_train = max(60, 4 * len(_monomial_count(U, info)))
        X, vols, measures = _sample_in_cone(
            U, b_sample, info.type_id, rng, n_train + n_train // 4, tol
        )
        train = slice(0, n_train)
        hold = slice(n_train, None)
        active = list(info.facets_present)
        volume_poly, _ = fit_polynomial(
            X[train], vols[train], U.m, U.n, active=active
        )
        if np.max(np.abs(volume_poly.eval_many(X[hold]) - vols[hold])) > 1e-7:
            raise InterpolationIllConditioned("volume fit misses held-out samples")
        facet_polys = []
        for i in range(U.m):
            if i not in info.facets_present:
                facet_polys.append(Polynomial.zero(U.m))
                continue
            poly, _ = fit_polynomial(
                X[train], measures[train][:, i], U.m, U.n - 1, active=active
            )
            if np.max(np.abs(poly.eval_many(X[hold]) - measures[hold][:, i])) > 1e-7:
                raise InterpolationIllConditioned(
                    f"facet {i} fit misses held-out samples"
                )
            facet_polys.append(poly)

    coupling = tuple(
        facet_polys[i] * Polynomial.variable(U.m, i, 1.0 / U.n) for i in range(U.m)
    )
    system = SemialgSystem(
        type_id=info.type_id,
        n=U.n,
        m=U.m,
        sample_b=b_sample,
        cone_rows=rows,
        cone_provenance=provenance,
        volume_poly=volume_poly,
        facet_polys=tuple(facet_polys),
        coupling=coupling,
    )
    _validate_system(U, system, tol)
    return system


def _monomial_count(U, info):
    from .polynomials import monomial_basis

    return monomial_basis(U.m, U.n, active=list(info.facets_present))


def _validate_system(U, system, tol):
    P = build_polytope(U, system.sample_b)
    gamma = cone_volume_vector(P).gamma
    checks = [abs(system.volume_poly(system.sample_b) - P.volume)]
    checks += [
        abs(system.coupling[i](system.sample_b) - gamma[i]) for i in range(U.m)
    ]
    if max(checks) > 1e-7:
        raise InterpolationIllConditioned(
            f"system disagrees with geometry at the sample (max {max(checks):.2e})"
        )
    slack = system.cone_rows @ system.sample_b
    if np.any(slack < -tol):
        raise InterpolationIllConditioned("sample violates its own cone rows")


def sample_type_cones(U: NormalMatrix, trials: int, seed: int = 0,
                      *, tol: float = FACET_TOL):
    """Discover combinatorial types by seeded random right-hand sides.

    Each trial draws b from its own derived seed; right-hand sides that
    land on a cone boundary (non-simple type) are nudged along the
    perturbation line b + (eps, eps^2, ..., eps^m).  Returns the sorted
    list of (type_id, representative b); coverage is a lower bound, the
    sampling cannot certify exhaustiveness.
    """
    found = {}
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        b = rng.uniform(0.2, 2.0, U.m)
        info = _resolve_simple(U, b, tol)
        if info is None:
            continue
        b_res, ti = info
        if ti.type_id not in found:
            found[ti.type_id] = b_res
    return sorted(found.items())


def _resolve_simple(U, b, tol):
    powers = np.arange(1, U.m + 1, dtype=float)
    for eps in (0.0, 1e-4, 1e-3, 1e-2, 0.05):
        cand = b + eps ** powers if eps else b.copy()
        P = build_polytope(U, np.maximum(cand, 0.0))
        if P.volume <= tol:
            continue
        ti = _type_info(P, tol)
        if ti.simple:
            return np.maximum(cand, 0.0), ti
    return None


def filter_full_facet_types(U: NormalMatrix, discovered, *, tol: float = FACET_TOL):
    """Keep (type_id, b) pairs where every direction supports a facet."""
    kept = []
    for type_id, b in discovered:
        P = build_polytope(U, b)
        if np.all(P.facet_measures > tol):
            kept.append((type_id, b))
    return kept
