"""Dense symmetric linear algebra: Cholesky with log-determinant and eigendecomposition.

Both routines delegate to LAPACK through numpy (``potrf`` for Cholesky,
``syevd`` - tridiagonal reduction followed by an implicit QL/QR or
divide-and-conquer sweep - for the eigenproblem) and add the symmetry checks,
ordering and sign conventions the rest of the package depends on.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ConvergenceFailure, NotPositiveDefinite

# Eigenvalues within this distance of 1 are treated as exactly 1.
TAU_EIG = 1e-8
SYM_RTOL = 1e-12
_SIGN_EPS = 1e-12


class EigenPairs(NamedTuple):
    values: np.ndarray  # descending
    vectors: np.ndarray  # columns aligned with values


def as_sym(m, rtol: float = SYM_RTOL) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = np.max(np.abs(m)) if m.size else 0.0
    if np.max(np.abs(m - m.T), initial=0.0) > rtol * scale:
        raise ValueError("matrix is not symmetric")
    return m


def cholesky(m) -> tuple[np.ndarray, float]:
    """Lower factor L with L @ L.T == m, and log|m| = 2 * sum(log diag(L))."""
    m = as_sym(m)
    try:
        L = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    diag = np.diag(L)
    if not np.all(diag > 0):
        raise NotPositiveDefinite("non-positive pivot")
    return L, float(2.0 * np.sum(np.log(diag)))


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # first entry with |v| > eps made positive, so results are reproducible
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        idx = np.flatnonzero(np.abs(col) > _SIGN_EPS)
        if idx.size and col[idx[0]] < 0:
            vectors[:, j] = -col
    return vectors


def sym_eig(m, top_k: int | None = None) -> EigenPairs:
    """Full symmetric eigendecomposition, eigenvalues sorted descending.

    With ``top_k`` only the leading ``top_k`` pairs are returned.
    """
    m = as_sym(m)
    order = m.shape[0]
    if top_k is not None and not 1 <= top_k <= order:
        raise ValueError(f"top_k must be in [1, {order}]")
    # symmetrize exactly so LAPACK sees the same triangle either way
    m = 0.5 * (m + m.T)
    try:
        values, vectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from None
    values = values[::-1]
    vectors = vectors[:, ::-1]
    if top_k is not None:
        values = values[:top_k]
        vectors = vectors[:, :top_k]
    return EigenPairs(values.copy(), _fix_signs(vectors.copy()))
