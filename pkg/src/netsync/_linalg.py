"""Shared dense/sparse numeric helpers."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.linalg import get_lapack_funcs

#: Matrices up to this side are stored dense; larger ones sparse.
DENSE_LIMIT = 2000

#: Hard guard for densifying in numeric kernels (side length).
SOLVE_DENSE_LIMIT = 20000

#: Relative pivot threshold for declaring a factorization singular.
PIVOT_RTOL = 1e-12

__all__ = [
    "DENSE_LIMIT",
    "SOLVE_DENSE_LIMIT",
    "PIVOT_RTOL",
    "as_dense",
    "pack_matrix",
    "spd_inverse_diag",
    "spd_inverse",
    "reachable_mask",
]


def as_dense(m) -> np.ndarray:
    """Return ``m`` as a dense float array, guarding against huge sides."""
    n = m.shape[0]
    if n > SOLVE_DENSE_LIMIT:
        raise MemoryError(
            f"refusing to densify a {n}x{n} matrix (limit {SOLVE_DENSE_LIMIT}); "
            "reduce the network size"
        )
    if sp.issparse(m):
        return m.toarray().astype(float, copy=False)
    return np.asarray(m, dtype=float)


def pack_matrix(m: np.ndarray | sp.spmatrix):
    """Store dense below :data:`DENSE_LIMIT`, CSR above."""
    n = m.shape[0]
    if n <= DENSE_LIMIT:
        return as_dense(m)
    return sp.csr_matrix(m)


def _cholesky_inverse(m: np.ndarray) -> np.ndarray:
    """Lower-triangular part of the inverse of SPD ``m`` via LAPACK potrf/potri.

    Works in place on a Fortran-ordered copy, so peak memory is one extra
    matrix. Raises ``numpy.linalg.LinAlgError`` if ``m`` is not positive
    definite or a pivot falls below ``PIVOT_RTOL * max(diag)``.
    """
    a = np.asfortranarray(m, dtype=float)
    if a is m or np.shares_memory(a, m):
        a = a.copy(order="F")
    potrf, potri = get_lapack_funcs(("potrf", "potri"), (a,))
    threshold = PIVOT_RTOL * float(np.max(np.diag(m)))
    c, info = potrf(a, lower=1, clean=0, overwrite_a=1)
    if info != 0:
        raise np.linalg.LinAlgError(f"Cholesky factorization failed (info={info})")
    pivots = np.diag(c) ** 2
    if np.min(pivots) < threshold:
        raise np.linalg.LinAlgError("matrix numerically singular (pivot below threshold)")
    inv, info = potri(c, lower=1, overwrite_c=1)
    if info != 0:
        raise np.linalg.LinAlgError(f"triangular inversion failed (info={info})")
    return inv


def spd_inverse_diag(m) -> np.ndarray:
    """Diagonal of the inverse of a symmetric positive definite matrix."""
    return np.diag(_cholesky_inverse(as_dense(m))).copy()


def spd_inverse(m) -> np.ndarray:
    """Full inverse of a symmetric positive definite matrix."""
    inv = _cholesky_inverse(as_dense(m))
    return np.tril(inv) + np.tril(inv, -1).T


def reachable_mask(pattern, sources: np.ndarray) -> np.ndarray:
    """Nodes with an undirected path (in ``pattern``) to any source node.

    Parameters
    ----------
    pattern : sparse or dense matrix
        Symmetric nonzero pattern; entry (i, j) != 0 means an edge.
    sources : boolean array
        Starting set; the returned mask includes it.
    """
    adj = sp.csr_matrix(pattern)
    adj.eliminate_zeros()
    n = adj.shape[0]
    seen = np.asarray(sources, dtype=bool).copy()
    frontier = list(np.flatnonzero(seen))
    indptr, indices = adj.indptr, adj.indices
    while frontier:
        node = frontier.pop()
        for nbr in indices[indptr[node]:indptr[node + 1]]:
            if not seen[nbr]:
                seen[nbr] = True
                frontier.append(nbr)
    return seen
