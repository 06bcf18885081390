"""Gaussian mixture model fitted by expectation-maximization.

All density work happens in log-space: a point that is hundreds of standard
deviations from every component still gets well-defined responsibilities,
because each row is shifted by its maximum before exponentiation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import logsumexp

from .core import RunConfig, as_points, child_seeds, rng_stream
from .errors import DegenerateRow
from .gaussian import LOG_2PI, GaussianParams, regularize
from .linalg import cholesky

# a component whose total responsibility drops below this fraction of n is reseeded
STARVED_FRACTION = 1e-8


@dataclass(frozen=True)
class MixtureModel:
    weights: np.ndarray
    means: np.ndarray
    covs: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        mu = np.atleast_2d(np.asarray(self.means, dtype=float))
        cov = np.asarray(self.covs, dtype=float)
        k, d = mu.shape
        if w.shape != (k,) or cov.shape != (k, d, d):
            raise ValueError("inconsistent mixture parameter shapes")
        if np.any(w < 0) or np.any(w > 1) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("mixing weights must lie in [0, 1] and sum to 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "covs", cov)

    @property
    def k(self) -> int:
        return self.weights.size

    @property
    def d(self) -> int:
        return self.means.shape[1]

    def component(self, c: int) -> GaussianParams:
        return GaussianParams(self.means[c], self.covs[c])

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "means": self.means.tolist(),
            "covariances": self.covs.tolist(),
        }


@dataclass
class EmTrace:
    loglik: list[float] = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.loglik)


@dataclass
class GmmFit:
    model: MixtureModel
    resp: np.ndarray
    trace: EmTrace


def weighted_log_densities(model: MixtureModel, X: np.ndarray) -> np.ndarray:
    """(n, k) matrix of log pi_c + log N(x_i | mu_c, Sigma_c)."""
    n, d = X.shape
    if d != model.d:
        raise ValueError(f"dimension mismatch: {d} vs {model.d}")
    out = np.empty((n, model.k))
    with np.errstate(divide="ignore", over="ignore"):
        log_w = np.log(model.weights)
        for c in range(model.k):
            L, logdet = cholesky(model.covs[c])
            z = solve_triangular(L, (X - model.means[c]).T, lower=True, check_finite=False)
            out[:, c] = log_w[c] - 0.5 * (d * LOG_2PI + logdet + np.sum(z * z, axis=0))
    return out


def e_step(model: MixtureModel, data) -> np.ndarray:
    X = as_points(data)
    logp = weighted_log_densities(model, X)
    row_max = logp.max(axis=1, keepdims=True)
    if not np.all(np.isfinite(row_max)):
        bad = int(np.flatnonzero(~np.isfinite(row_max[:, 0]))[0])
        raise DegenerateRow(f"point {bad} has zero density under every component")
    resp = np.exp(logp - row_max)
    resp /= resp.sum(axis=1, keepdims=True)
    return resp


def log_likelihood(model: MixtureModel, data) -> float:
    X = as_points(data)
    return float(np.sum(logsumexp(weighted_log_densities(model, X), axis=1)))


def _global_cov(X: np.ndarray) -> np.ndarray:
    centered = X - X.mean(axis=0)
    return regularize(centered.T @ centered / X.shape[0])


def m_step(data, resp) -> MixtureModel:
    X = as_points(data)
    resp = np.array(resp, dtype=float)
    n, d = X.shape
    k = resp.shape[1]
    nk = resp.sum(axis=0)
    starved = np.flatnonzero(nk < STARVED_FRACTION * n)
    if starved.size:
        # move each starved component onto the point it explains worst
        order = np.argsort(resp.max(axis=1), kind="stable")
        for c, i in zip(starved, order):
            resp[i, :] = 0.0
            resp[i, c] = 1.0
        nk = resp.sum(axis=0)
    means = (resp.T @ X) / nk[:, None]
    covs = np.empty((k, d, d))
    for c in range(k):
        centered = X - means[c]
        covs[c] = regularize((resp[:, c, None] * centered).T @ centered / nk[c])
    if starved.size:
        g = _global_cov(X)
        for c in starved:
            covs[c] = g
    weights = nk / n
    return MixtureModel(weights / weights.sum(), means, covs)


def init_model(data, k: int, rng: np.random.Generator) -> MixtureModel:
    """k distinct data points as means, the global covariance everywhere, equal weights."""
    X = as_points(data)
    idx = rng.choice(X.shape[0], size=k, replace=False)
    g = _global_cov(X)
    return MixtureModel(np.full(k, 1.0 / k), X[idx].copy(), np.repeat(g[None], k, axis=0))


def fit_em(data, k: int, cfg: RunConfig = RunConfig(), init: MixtureModel | None = None) -> GmmFit:
    X = as_points(data)
    if k < 1 or X.shape[0] < k:
        raise ValueError("need 1 <= k <= n")
    model = init if init is not None else init_model(X, k, rng_stream(cfg.seed))
    trace = EmTrace()
    resp = e_step(model, X)
    ll = log_likelihood(model, X)
    trace.loglik.append(ll)
    for _ in range(cfg.max_iters - 1):
        model = m_step(X, resp)
        resp = e_step(model, X)
        new_ll = log_likelihood(model, X)
        trace.loglik.append(new_ll)
        if abs(new_ll - ll) <= cfg.tol * abs(ll):
            trace.converged = True
            break
        ll = new_ll
    return GmmFit(model, resp, trace)


def fit_best(data, k: int, cfg: RunConfig = RunConfig(), restarts: int = 1) -> GmmFit:
    """Run ``fit_em`` from several seeded initializations; the best final log-likelihood wins."""
    best = None
    for seed in child_seeds(cfg.seed, restarts) if restarts > 1 else [cfg.seed]:
        run = fit_em(data, k, RunConfig(seed, cfg.max_iters, cfg.tol))
        if best is None or run.trace.loglik[-1] > best.trace.loglik[-1]:
            best = run
    return best


def sample_mixture(model: MixtureModel, count: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw a component from the weights, then a point from it. Returns (points, labels)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    labels = rng.choice(model.k, size=count, p=model.weights)
    z = rng.standard_normal((count, model.d))
    points = np.empty((count, model.d))
    for c in range(model.k):
        mask = labels == c
        if mask.any():
            L, _ = cholesky(model.covs[c])
            points[mask] = model.means[c] + z[mask] @ L.T
    return points, labels
