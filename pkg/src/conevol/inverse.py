"""Numerical inversion of the cone-volume map: recover b from gamma.

Solves the square residual system gamma(U, b) - gamma = 0 by damped
Newton with multistart, seeding starts from representatives of type
cones where every direction supports a facet.  For reducible normal
sets the solution set is a positive-dimensional family; steps therefore
use a Tikhonov-regularized least-squares solve, and the Jacobian rank
defect at each solution is reported as numeric evidence for the family
dimension d - 1.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    Irreducible,
    NoConvergence,
    NotNormalized,
    NotPositive,
    OnTypeConeBoundary,
)
from .geometry import (
    NormalMatrix,
    build_polytope,
    cone_volume_vector,
    normalize_to_unit_volume,
    positively_spans,
)
from .matroid import _rank_of, compute_matroid
from .planar import edge_length_forms, order_ccw
from .typecones import _type_info, filter_full_facet_types, sample_type_cones

RESIDUAL_TOL = 1e-10
RANK_CUTOFF = 1e-7


@dataclass(frozen=True)
class InverseProblem:
    """A normal matrix with a volume-1 target cone-volume vector."""

    U: NormalMatrix
    target: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.target, dtype=float)
        if t.shape != (self.U.m,):
            raise ValueError(f"target must have length {self.U.m}")
        neg = np.where(t < 0.0)[0]
        if neg.size:
            raise NotPositive(int(neg[0]))
        if abs(t.sum() - 1.0) > 1e-9:
            raise NotNormalized(f"sum(target) = {t.sum():.12g} != 1")
        t.setflags(write=False)
        object.__setattr__(self, "target", t)

    @property
    def support(self):
        return tuple(int(i) for i in np.where(self.target > 0.0)[0])


@dataclass(frozen=True)
class SolutionFamily:
    """Converged right-hand sides with per-solution Jacobian rank defects.

    support lists the column indices the Newton iteration ran over; for
    targets with zero entries this is the sub-problem on the support and
    the returned b vectors are extended so the remaining directions
    support no facet.
    """

    solutions: tuple
    residuals: tuple
    rank_defects: tuple
    expected_defect: int
    support: tuple

    @property
    def best(self):
        return self.solutions[0]


def gamma_of(U: NormalMatrix, b) -> np.ndarray:
    return cone_volume_vector(build_polytope(U, np.maximum(b, 0.0))).gamma


def _planar_forms(U):
    return edge_length_forms(order_ccw(U)).matrix


def _residual_functions(U, target):
    # In the plane the residual uses the edge-length linear forms, which
    # coincide with the geometry on the full-edge cone and extend it
    # polynomially outside; converged roots are re-verified geometrically.
    if U.n == 2:
        F = _planar_forms(U)

        def value(b):
            return b * (F @ b) / 2.0 - target

        def jac(b):
            return (np.diag(F @ b) + b[:, None] * F) / 2.0

        return value, jac

    def value(b):
        return gamma_of(U, b) - target

    def jac(b):
        m = b.size
        J = np.zeros((m, m))
        for j in range(m):
            h = 1e-6 * (1.0 + abs(b[j]))
            e = np.zeros(m)
            e[j] = h
            J[:, j] = (gamma_of(U, b + e) - gamma_of(U, b - e)) / (2.0 * h)
        return J

    return value, jac


def _newton(value, jac, b0, itmax=120, refresh=5):
    # Damped Newton with Tikhonov-regularized least-squares steps.  The
    # Jacobian is recomputed every `refresh` accepted steps and maintained
    # by Broyden updates in between; a stalled line search forces one
    # fresh Jacobian before giving up.
    b = np.maximum(np.asarray(b0, dtype=float), 0.0)
    r = value(b)
    norm = np.linalg.norm(r)
    J = jac(b)
    age = 0
    for _ in range(itmax):
        if norm <= 1e-13:
            break
        H = J.T @ J + 1e-12 * np.eye(b.size)
        step = np.linalg.solve(H, -J.T @ r)
        t = 1.0
        improved = False
        while t > 1e-12:
            cand = np.maximum(b + t * step, 0.0)
            r_cand = value(cand)
            n_cand = np.linalg.norm(r_cand)
            if n_cand <= (1.0 - 1e-4 * t) * norm:
                db = cand - b
                dr = r_cand - r
                b, r, norm = cand, r_cand, n_cand
                age += 1
                if age >= refresh:
                    J = jac(b)
                    age = 0
                else:
                    denom = float(db @ db)
                    if denom > 0.0:
                        J = J + np.outer(dr - J @ db, db) / denom
                improved = True
                break
            t /= 2.0
        if not improved:
            if age == 0:
                break
            J = jac(b)
            age = 0
    return b, norm


def _warm_start(U, target, b0, iters=6):
    # Damped multiplicative sweeps b <- b * sqrt(target / gamma(b)), whose
    # fixed points are exactly the solutions.  The best iterate by residual
    # is returned, so the warm start never does worse than the raw start.
    b = np.maximum(np.asarray(b0, dtype=float), 1e-6)
    best_b, best_r = b, float(np.linalg.norm(gamma_of(U, b) - target))
    for _ in range(iters):
        g = gamma_of(U, b)
        factor = np.where(
            g > 1e-14, np.sqrt(target / np.maximum(g, 1e-14)), 0.7
        )
        b = np.clip(b * factor, 1e-8, None)
        vol = build_polytope(U, b).volume
        if vol <= 1e-12:
            break
        b = b * vol ** (-1.0 / U.n)
        r = float(np.linalg.norm(gamma_of(U, b) - target))
        if r < best_r:
            best_b, best_r = b, r
    return best_b


def _start_points(U, multistarts, seed):
    # One start per full-facet type-cone representative, then fresh
    # rejection-sampled full-facet right-hand sides (perturbed by up to
    # 20%) so the sweep covers genuinely different shapes.
    reps = filter_full_facet_types(
        U, sample_type_cones(U, trials=max(32, 4 * multistarts), seed=seed)
    )
    bases = [b for _, b in reps] or [np.ones(U.m)]
    starts = []
    for k in range(multistarts):
        rng = np.random.default_rng([seed, 7919, k])
        if k < len(bases):
            base = bases[k]
        else:
            base = None
            for _ in range(60):
                cand = rng.uniform(0.1, 2.0, U.m)
                if build_polytope(U, cand).has_all_facets():
                    base = cand
                    break
            if base is None:
                base = bases[k % len(bases)] * (
                    1.0 + 0.2 * rng.uniform(-1.0, 1.0, U.m)
                )
        try:
            starts.append(normalize_to_unit_volume(U, base))
        except Exception:
            starts.append(np.asarray(base, dtype=float))
    return starts


def jacobian_of_gamma(U: NormalMatrix, b) -> np.ndarray:
    """d gamma / d b: analytic in the plane, central differences otherwise."""
    b = np.asarray(b, dtype=float)
    _, jac = _residual_functions(U, np.zeros(U.m))
    return jac(b)


def rank_defect(U: NormalMatrix, b, *, cutoff: float = RANK_CUTOFF) -> int:
    J = jacobian_of_gamma(U, b)
    s = np.linalg.svd(J, compute_uv=False)
    rank = int(np.sum(s > cutoff * s[0])) if s.size and s[0] > 0 else 0
    return U.m - rank


def solve(problem: InverseProblem, multistarts: int = 20, seed: int = 0,
          *, residual_tol: float = RESIDUAL_TOL,
          max_solutions: int = None) -> SolutionFamily:
    """Damped-Newton multistart for the prescribed cone-volume vector.

    Deterministic under the seed.  Raises NoConvergence, carrying the
    best residual and iterate, when no start reaches residual_tol.
    Targets with zero entries are solved on their support sub-problem
    and extended so the remaining directions carry no facet.  Setting
    max_solutions stops the multistart sweep early once that many
    distinct solutions have been collected (existence checks need one).
    """
    U, target = problem.U, problem.target
    support = problem.support
    if len(support) < U.m:
        return _solve_on_support(problem, multistarts, seed, residual_tol,
                                 max_solutions)

    value, jac = _residual_functions(U, target)
    refresh = 1 if U.n == 2 else 5
    found, found_res = [], []
    best = (np.inf, None)
    for k, b0 in enumerate(_start_points(U, multistarts, seed)):
        # alternate warm-started and raw starts: the multiplicative warm-up
        # accelerates lopsided targets but can funnel every start into one
        # stationary point, so half the sweep keeps the raw diversity
        init = _warm_start(U, target, b0) if k % 2 == 0 else b0
        b, _ = _newton(value, jac, init, refresh=refresh)
        geo = float(np.linalg.norm(gamma_of(U, b) - target))
        if geo < best[0]:
            best = (geo, b)
        if geo > residual_tol:
            continue
        if not any(np.linalg.norm(b - s) <= 1e-6 for s in found):
            found.append(b)
            found_res.append(geo)
        if max_solutions is not None and len(found) >= max_solutions:
            break
    if not found:
        raise NoConvergence(best[0], best[1])
    order = sorted(range(len(found)), key=lambda i: (found_res[i], tuple(found[i])))
    solutions = tuple(found[i] for i in order)
    md = compute_matroid(U)
    defects = tuple(rank_defect(U, b) for b in solutions)
    return SolutionFamily(
        solutions=solutions,
        residuals=tuple(found_res[i] for i in order),
        rank_defects=defects,
        expected_defect=md.d - 1,
        support=tuple(range(U.m)),
    )


def _solve_on_support(problem, multistarts, seed, residual_tol, max_solutions):
    U, target = problem.U, problem.target
    support = list(problem.support)
    sub_cols = U.columns[:, support]
    if not positively_spans(sub_cols):
        raise NoConvergence(np.inf, None)
    sub_U = U.submatrix(support)
    sub = solve(
        InverseProblem(U=sub_U, target=target[support]),
        multistarts=multistarts,
        seed=seed,
        residual_tol=residual_tol,
        max_solutions=max_solutions,
    )
    solutions, residuals = [], []
    for b_sub in sub.solutions:
        P = build_polytope(sub_U, b_sub)
        b_full = np.empty(U.m)
        for i in range(U.m):
            if i in support:
                b_full[i] = b_sub[support.index(i)]
            else:
                h = float(np.max(P.vertices @ U.column(i)))
                b_full[i] = 1.05 * h + 1e-6
        solutions.append(b_full)
        residuals.append(float(np.linalg.norm(gamma_of(U, b_full) - target)))
    return SolutionFamily(
        solutions=tuple(solutions),
        residuals=tuple(residuals),
        rank_defects=sub.rank_defects,
        expected_defect=sub.expected_defect,
        support=tuple(support),
    )


def scaling_family(U: NormalMatrix, b, lam: float, block: int = None) -> np.ndarray:
    """Scale one irreducible block by lam and its complement to compensate.

    For a block of rank k the complement scales by lam^(-k/(n-k)), which
    preserves the cone-volume vector.  Any block index works; the default
    is the last block of the partition.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    md = compute_matroid(U)
    if md.d < 2:
        raise Irreducible("scaling families need a reducible normal set")
    blk = md.partition[md.d - 1 if block is None else block]
    k = _rank_of(U.columns, blk)
    out = np.asarray(b, dtype=float) * lam ** (-k / (U.n - k))
    out[list(blk)] = np.asarray(b, dtype=float)[list(blk)] * lam
    return out


def dimension_probe(U: NormalMatrix, b, *, cutoff: float = RANK_CUTOFF) -> int:
    """Jacobian nullity of the cone-volume map at a solution.

    Evidence for the family dimension, never a proof; requires b strictly
    inside a type cone where every direction supports a facet.
    """
    P = build_polytope(U, b)
    if not P.has_all_facets() or not _type_info(P).simple:
        raise OnTypeConeBoundary("probe needs a simple interior right-hand side")
    return rank_defect(U, np.asarray(b, dtype=float), cutoff=cutoff)


def feasibility_scan(U: NormalMatrix, gammas, *, multistarts: int = 20,
                     seed: int = 0, residual_tol: float = RESIDUAL_TOL):
    """Solve a batch of targets, recording per-target success and residual."""
    records = []
    for idx, gamma in enumerate(gammas):
        gamma = np.asarray(gamma, dtype=float)
        record = {"gamma": gamma, "solved": False, "b": None, "residual": np.inf}
        try:
            fam = solve(
                InverseProblem(U=U, target=gamma),
                multistarts=multistarts,
                seed=seed + idx,
                residual_tol=residual_tol,
                max_solutions=1,
            )
            record.update(solved=True, b=fam.best, residual=fam.residuals[0])
        except NoConvergence as err:
            record.update(residual=err.best_residual, b=err.best_b)
        records.append(record)
    return records
