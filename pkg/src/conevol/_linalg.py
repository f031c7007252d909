"""Small shared numeric helpers (ranks, charts, deduplication)."""

import numpy as np


def svd_rank(M: np.ndarray, rtol: float = 1e-9) -> int:
    """Numeric rank with a cutoff relative to the largest singular value."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def orthonormal_complement(v: np.ndarray) -> np.ndarray:
    """Columns form an orthonormal basis of the hyperplane orthogonal to v.

    Returns a (k, k-1) matrix for v of length k. Deterministic (SVD based).
    """
    v = np.asarray(v, dtype=float)
    k = v.size
    _, _, vt = np.linalg.svd(v.reshape(1, k))
    return vt[1:].T


def dedup_rows(points: np.ndarray, tol: float = 1e-9):
    """Indices of a representative subset with pairwise distances > tol·(1+|p|)."""
    keep = []
    for i, p in enumerate(points):
        scale = tol * (1.0 + np.linalg.norm(p))
        if all(np.linalg.norm(p - points[j]) > scale for j in keep):
            keep.append(i)
    return keep
