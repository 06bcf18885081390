"""Ng-Jordan-Weiss spectral clustering."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kmeans
from .core import ClusteringReport, RunConfig, as_points
from .kernels import KernelSpec, kernel_matrix
from .linalg import sym_eig

DEFAULT_RESTARTS = 10


@dataclass
class SpectralEmbedding:
    vectors: np.ndarray  # top-k eigenvectors, orthonormal columns
    rows: np.ndarray  # vectors with each row scaled to unit length
    eigenvalues: np.ndarray
    weights: np.ndarray  # w_i = 1 / sum_j K_ij
    n_kernel_evals: int


def njw_matrix(data, sigma: float) -> tuple[np.ndarray, np.ndarray, int]:
    """W^1/2 K W^1/2 for the gaussian kernel with W^-1 = diag(K 1)."""
    km = kernel_matrix(KernelSpec.gaussian(sigma), as_points(data))
    w = 1.0 / km.K.sum(axis=1)
    sw = np.sqrt(w)
    return sw[:, None] * km.K * sw[None, :], w, km.n_evals


def njw_embed(data, k: int, sigma: float) -> SpectralEmbedding:
    X = as_points(data)
    if not 1 <= k <= X.shape[0]:
        raise ValueError("need 1 <= k <= n")
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    M, w, n_evals = njw_matrix(X, sigma)
    values, vectors = sym_eig(M, top_k=k)
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    rows = vectors / np.where(norms > 0, norms, 1.0)
    return SpectralEmbedding(vectors, rows, values, w, n_evals)


def njw_fit(
    data, k: int, sigma: float, cfg: RunConfig = RunConfig(), restarts: int = DEFAULT_RESTARTS
) -> ClusteringReport:
    emb = njw_embed(data, k, sigma)
    part = kmeans.fit_best(emb.rows, k, cfg, restarts=restarts)
    return ClusteringReport(
        algorithm="sc",
        params={"k": k, "sigma": sigma, "restarts": restarts},
        labels=part.labels,
        iterations=part.iterations,
        objective_trace=part.objective_trace,
        eigenvalues=emb.eigenvalues.tolist(),
        diagnostics={"kernel_evals": emb.n_kernel_evals},
    )
