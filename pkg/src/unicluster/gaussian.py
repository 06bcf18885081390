"""A single multivariate Gaussian: log-density, maximum-likelihood fit, sampling."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .core import as_points
from .linalg import as_sym, cholesky

LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class GaussianParams:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        if cov.shape != (mean.size, mean.size):
            raise ValueError("covariance shape does not match mean")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", as_sym(cov))

    @property
    def d(self) -> int:
        return self.mean.size


def regularize(cov: np.ndarray) -> np.ndarray:
    """Add ``1e-9 * trace/d + 1e-12`` to the diagonal so Cholesky never fails on a
    singular scatter (for example n < d or repeated points)."""
    d = cov.shape[0]
    reg = 1e-9 * np.trace(cov) / d + 1e-12
    return cov + reg * np.eye(d)


def log_pdf(g: GaussianParams, x) -> np.ndarray | float:
    """Log-density at a single point (returns float) or at each row of an (n, d) array."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != g.d:
        raise ValueError(f"dimension mismatch: {X.shape[1]} vs {g.d}")
    L, logdet = cholesky(g.cov)
    z = solve_triangular(L, (X - g.mean).T, lower=True, check_finite=False)
    maha = np.sum(z * z, axis=0)
    out = -0.5 * (g.d * LOG_2PI + logdet + maha)
    return float(out[0]) if single else out


def fit_mle(data, counter: Counter | None = None) -> GaussianParams:
    X = as_points(data)
    n, d = X.shape
    mean = X.mean(axis=0)
    centered = X - mean
    # scatter accumulation: n * d * d multiply-adds
    scatter = centered.T @ centered
    if counter is not None:
        counter["scatter_madds"] += n * d * d
    return GaussianParams(mean, regularize(scatter / n))


def sample(g: GaussianParams, count: int, rng: np.random.Generator) -> np.ndarray:
    """``mean + L z`` with ``z`` from ``rng.standard_normal`` (numpy's ziggurat)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    L, _ = cholesky(g.cov)
    z = rng.standard_normal((count, g.d))
    return g.mean + z @ L.T
