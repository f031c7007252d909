"""Basis matroid of the normal matrix and the scaled matroid polytope.

The column vectors of U induce a linear matroid: bases are invertible
n-subsets, flats are span-closed column subsets of intermediate rank,
and separators are flats whose span is complementary to the span of
their complement.  Scaling the basis matroid polytope by 1/n gives the
polytope whose relative interior characterizes measures concentrating
no more than dim(L)/n of their mass on any proper subspace L.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from ._linalg import svd_rank
from .errors import NotNormalized, NotPositive, NotReducible
from .geometry import NormalMatrix

RANK_TOL = 1e-9


def _span_projector(cols):
    # Orthonormal basis of the column span, as a projector matrix.
    if cols.size == 0:
        return np.zeros((cols.shape[0], cols.shape[0]))
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    r = int(np.sum(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
    basis = u[:, :r]
    return basis @ basis.T


def _closure(cols, subset, ground):
    proj = _span_projector(cols[:, list(subset)])
    out = []
    for i in ground:
        v = cols[:, i]
        if np.linalg.norm(v - proj @ v) <= RANK_TOL:
            out.append(i)
    return tuple(out)


def _rank_of(cols, indices):
    if not indices:
        return 0
    return svd_rank(cols[:, list(indices)], RANK_TOL)


def enumerate_bases(U: NormalMatrix):
    """All n-subsets of column indices with |det| > 1e-9, in lex order."""
    cols = U.columns
    bases = []
    for S in itertools.combinations(range(U.m), U.n):
        if abs(np.linalg.det(cols[:, S])) > 1e-9:
            bases.append(S)
    return bases


def _flats_of(cols, ground, ground_rank):
    flats = {}
    for size in range(1, ground_rank):
        for T in itertools.combinations(ground, size):
            S = _closure(cols, T, ground)
            if S in flats:
                continue
            r = _rank_of(cols, S)
            if 1 <= r <= ground_rank - 1:
                flats[S] = r
    return sorted(flats.items(), key=lambda item: (len(item[0]), item[0]))


def _separators_of(cols, ground, ground_rank, flats):
    seps = []
    ground_set = set(ground)
    for S, r in flats:
        rest = tuple(sorted(ground_set - set(S)))
        if _rank_of(cols, rest) == ground_rank - r:
            seps.append(S)
    return seps


def enumerate_flats(U: NormalMatrix):
    """Flats of the column matroid with their ranks, as (indices, rank)."""
    return _flats_of(U.columns, tuple(range(U.m)), U.n)


def enumerate_separators(U: NormalMatrix):
    """Flats whose span is complementary to the span of their complement."""
    flats = enumerate_flats(U)
    return _separators_of(U.columns, tuple(range(U.m)), U.n, flats)


def _partition_of(cols, ground):
    r = _rank_of(cols, ground)
    flats = _flats_of(cols, ground, r)
    seps = _separators_of(cols, ground, r, flats)
    if not seps:
        return [tuple(sorted(ground))]
    S = seps[0]
    rest = tuple(sorted(set(ground) - set(S)))
    return _partition_of(cols, S) + _partition_of(cols, rest)


def irreducible_partition(U: NormalMatrix):
    """Unique split of the columns into blocks without separators."""
    blocks = _partition_of(U.columns, tuple(range(U.m)))
    return sorted(blocks, key=lambda blk: blk[0])


@dataclass(frozen=True)
class MatroidData:
    """Bases, flats, separators and the irreducible partition of U."""

    bases: tuple
    flats: tuple          # of (indices, rank)
    separators: tuple     # of indices tuples
    partition: tuple      # of indices tuples, sorted by smallest index
    d: int

    @property
    def separator_set(self):
        return set(self.separators)


def compute_matroid(U: NormalMatrix) -> MatroidData:
    flats = tuple((S, r) for S, r in enumerate_flats(U))
    seps = tuple(enumerate_separators(U))
    part = tuple(irreducible_partition(U))
    return MatroidData(
        bases=tuple(enumerate_bases(U)),
        flats=flats,
        separators=seps,
        partition=part,
        d=len(part),
    )


@dataclass(frozen=True)
class SccPolytope:
    """V- and H-representation of the scaled basis matroid polytope.

    vrep rows are the characteristic vectors of the bases scaled by 1/n.
    equalities/inequalities are (index tuple, right-hand side) pairs over
    coordinate sums; x >= 0 is implicit.  dim = m - d.
    """

    m: int
    n: int
    vrep: np.ndarray
    equalities: tuple
    inequalities: tuple
    dim: int
    matroid: MatroidData


def build_pscc(U: NormalMatrix, matroid: MatroidData = None) -> SccPolytope:
    """Construct the scaled matroid polytope of U in both representations."""
    md = matroid if matroid is not None else compute_matroid(U)
    m, n = U.m, U.n
    rank_by_flat = dict(md.flats)
    vrep = np.zeros((len(md.bases), m))
    for k, B in enumerate(md.bases):
        vrep[k, list(B)] = 1.0 / n
    order = np.lexsort(vrep.T[::-1])
    vrep = vrep[order]
    vrep.setflags(write=False)
    eqs = [(tuple(range(m)), 1.0)]
    ineqs = []
    sep = md.separator_set
    for S, r in md.flats:
        target = (S, r / n)
        if S in sep:
            eqs.append(target)
        else:
            ineqs.append(target)
    return SccPolytope(
        m=m,
        n=n,
        vrep=vrep,
        equalities=tuple(eqs),
        inequalities=tuple(ineqs),
        dim=m - md.d,
        matroid=md,
    )


def hrep_satisfied(scc: SccPolytope, x, tol: float = 1e-9) -> bool:
    """Weak membership test against the H-representation."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -tol):
        return False
    for S, rhs in scc.equalities:
        if abs(x[list(S)].sum() - rhs) > tol:
            return False
    for S, rhs in scc.inequalities:
        if x[list(S)].sum() > rhs + tol:
            return False
    return True


@dataclass(frozen=True)
class SccVerdict:
    """Outcome of a concentration check, with the offending flat if any.

    status is one of "satisfies", "violates_inequality",
    "violates_equality_case"; violations lists every failed constraint in
    deterministic flat order so explanations are reproducible.
    """

    status: str
    flat: tuple | None
    violations: tuple

    @property
    def satisfied(self) -> bool:
        return self.status == "satisfies"


def _validate_measure(gamma, m, tol):
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (m,):
        raise ValueError(f"gamma must have length {m}")
    neg = np.where(gamma <= 0.0)[0]
    if neg.size:
        raise NotPositive(int(neg[0]))
    if abs(gamma.sum() - 1.0) > tol:
        raise NotNormalized(f"sum(gamma) = {gamma.sum():.12g} != 1")
    return gamma


def _verdict_from_flats(gamma, n, flats, separators, tol):
    violations = []
    sep = set(separators)
    for S, r in sorted(flats, key=lambda item: (len(item[0]), item[0])):
        s = gamma[list(S)].sum()
        bound = r / n
        if S in sep:
            if abs(s - bound) > tol:
                violations.append(("violates_equality_case", S))
        elif s >= bound - tol:
            violations.append(("violates_inequality", S))
    if not violations:
        return SccVerdict(status="satisfies", flat=None, violations=())
    kind, flat = violations[0]
    return SccVerdict(status=kind, flat=flat, violations=tuple(violations))


def scc_check(U: NormalMatrix, gamma, *, matroid: MatroidData = None,
              tol: float = 1e-9) -> SccVerdict:
    """Decide strict subspace concentration via the flat/separator lists.

    Satisfies iff coordinate sums hit rank/n exactly on every separator
    and stay strictly below rank/n on every other flat.
    """
    gamma = _validate_measure(gamma, U.m, tol)
    md = matroid if matroid is not None else compute_matroid(U)
    return _verdict_from_flats(gamma, U.n, md.flats, md.separator_set, tol)


def brute_force_scc(U: NormalMatrix, gamma, *, tol: float = 1e-9) -> SccVerdict:
    """Anti-drift oracle: enumerate subspaces from scratch and test directly.

    Walks every column subset, takes its span L, accumulates the measure of
    the columns inside L, and tests the complementary-subspace condition by
    the rank of the leftover columns.  Verdict semantics match scc_check.
    """
    gamma = _validate_measure(gamma, U.m, tol)
    cols = U.columns
    n, m = U.n, U.m
    flats = {}
    for size in range(1, m + 1):
        for T in itertools.combinations(range(m), size):
            r = _rank_of(cols, T)
            if r == 0 or r >= n:
                continue
            proj = _span_projector(cols[:, list(T)])
            members = tuple(
                i for i in range(m)
                if np.linalg.norm(cols[:, i] - proj @ cols[:, i]) <= RANK_TOL
            )
            flats.setdefault(members, r)
    separators = [
        S for S, r in flats.items()
        if _rank_of(cols, tuple(sorted(set(range(m)) - set(S)))) == n - r
    ]
    return _verdict_from_flats(gamma, n, list(flats.items()), separators, tol)


def pscc_direct_sum_check(U: NormalMatrix, *, tol: float = 1e-9) -> bool:
    """Whether the polytope splits as the direct sum of its block polytopes."""
    md = compute_matroid(U)
    if md.d < 2:
        raise NotReducible("irreducible ground set has no direct-sum split")
    scc = build_pscc(U, md)
    cols = U.columns
    block_vertex_sets = []
    for block in md.partition:
        r = _rank_of(cols, block)
        verts = []
        for T in itertools.combinations(block, r):
            if _rank_of(cols, T) == r:
                v = np.zeros(U.m)
                v[list(T)] = 1.0 / U.n
                verts.append(v)
        block_vertex_sets.append(verts)
    sums = []
    for choice in itertools.product(*block_vertex_sets):
        sums.append(np.sum(choice, axis=0))
    sums = np.array(sorted(map(tuple, np.round(np.array(sums), 12))))
    ref = np.array(sorted(map(tuple, np.round(scc.vrep, 12))))
    return sums.shape == ref.shape and bool(np.all(np.abs(sums - ref) <= tol))


def _lp_arrays(scc: SccPolytope):
    A_eq, b_eq = [], []
    for S, rhs in scc.equalities:
        row = np.zeros(scc.m)
        row[list(S)] = 1.0
        A_eq.append(row)
        b_eq.append(rhs)
    A_ub, b_ub = [], []
    for S, rhs in scc.inequalities:
        row = np.zeros(scc.m)
        row[list(S)] = 1.0
        A_ub.append(row)
        b_ub.append(rhs)
    return (
        np.array(A_eq),
        np.array(b_eq),
        np.array(A_ub) if A_ub else None,
        np.array(b_ub) if b_ub else None,
    )


def enumerate_hrep_vertices(scc: SccPolytope, seed: int = 0,
                            probes: int = 200, exhaustive_limit: int = 200000):
    """Vertices of the H-representation polytope.

    Small systems are enumerated exhaustively over active constraint
    subsets; otherwise vertices are collected from LP optima, combining
    one targeted objective per basis vector with seeded random probes.
    """
    m = scc.m
    A_eq, b_eq, A_ub, b_ub = _lp_arrays(scc)
    rank_eq = svd_rank(A_eq)
    rows = [np.eye(m)[i] for i in range(m)] + (
        [row for row in A_ub] if A_ub is not None else []
    )
    rhs = [0.0] * m + ([float(v) for v in b_ub] if b_ub is not None else [])
    free = m - rank_eq
    found = []

    def _push(x):
        for y in found:
            if np.linalg.norm(x - y) <= 1e-9:
                return
        found.append(x)

    if free >= 0 and math.comb(len(rows), free) <= exhaustive_limit:
        for combo in itertools.combinations(range(len(rows)), free):
            Asys = np.vstack([A_eq] + [rows[i] for i in combo])
            bsys = np.concatenate([b_eq, [rhs[i] for i in combo]])
            if svd_rank(Asys) < m:
                continue
            x, residual, *_ = np.linalg.lstsq(Asys, bsys, rcond=None)
            if np.linalg.norm(Asys @ x - bsys) > 1e-9:
                continue
            if hrep_satisfied(scc, x):
                _push(x)
    else:
        rng = np.random.default_rng(seed)
        objectives = [row for row in scc.vrep]
        objectives += [rng.normal(size=m) for _ in range(probes)]
        for c in objectives:
            res = linprog(
                -np.asarray(c, dtype=float),
                A_ub=A_ub,
                b_ub=b_ub,
                A_eq=A_eq,
                b_eq=b_eq,
                bounds=(0, None),
                method="highs",
            )
            if res.success:
                _push(np.asarray(res.x))
    found.sort(key=lambda x: tuple(np.round(x, 12)))
    return np.array(found) if found else np.zeros((0, m))
