"""Lloyd's k-means and the small-variance limit of the spherical mixture."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .core import RunConfig, as_points, child_seeds, rng_stream


@dataclass
class KMeansFit:
    centroids: np.ndarray
    labels: np.ndarray
    objective_trace: list[float]
    history: list[np.ndarray] = field(repr=False, default_factory=list)
    converged: bool = False

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]

    @property
    def iterations(self) -> int:
        return len(self.history)


def sq_distances(X: np.ndarray, centroids: np.ndarray, counter: Counter | None = None) -> np.ndarray:
    # direct differences rather than the |x|^2 - 2xy + |y|^2 expansion, so exact ties stay exact
    diff = X[:, None, :] - centroids[None, :, :]
    if counter is not None:
        counter["distance_evals"] += X.shape[0] * centroids.shape[0]
    return np.einsum("nkd,nkd->nk", diff, diff)


def assign_step(centroids, data, counter: Counter | None = None) -> np.ndarray:
    X = as_points(data)
    C = np.atleast_2d(np.asarray(centroids, dtype=float))
    return np.argmin(sq_distances(X, C, counter), axis=1)


def update_step(data, labels, centroids) -> np.ndarray:
    """Cluster means. An empty cluster takes the point farthest from its own centroid."""
    X = as_points(data)
    labels = np.asarray(labels)
    old = np.atleast_2d(np.asarray(centroids, dtype=float))
    k = old.shape[0]
    counts = np.bincount(labels, minlength=k)
    new = np.zeros_like(old)
    np.add.at(new, labels, X)
    nonempty = counts > 0
    new[nonempty] /= counts[nonempty, None]
    empty = np.flatnonzero(~nonempty)
    if empty.size:
        d2 = np.sum((X - old[labels]) ** 2, axis=1)
        # stable descending order, lowest index first among equals
        far = np.argsort(-d2, kind="stable")
        for c, i in zip(empty, far):
            new[c] = X[i]
    return new


def objective(data, labels, centroids) -> float:
    X = as_points(data)
    C = np.asarray(centroids, dtype=float)
    return float(np.sum((X - C[np.asarray(labels)]) ** 2))


def init_forgy(data, k: int, rng: np.random.Generator) -> np.ndarray:
    X = as_points(data)
    return X[rng.choice(X.shape[0], size=k, replace=False)].copy()


def fit(data, k: int, cfg: RunConfig = RunConfig(), init: np.ndarray | None = None) -> KMeansFit:
    """Alternate assignment and mean updates until the assignment stops changing.

    ``objective_trace[t]`` is the within-cluster sum of squares of assignment
    ``history[t]`` against the centroids it was assigned to.
    """
    X = as_points(data)
    if k < 1 or X.shape[0] < k:
        raise ValueError("need 1 <= k <= n")
    C = init_forgy(X, k, rng_stream(cfg.seed)) if init is None else np.array(init, dtype=float)
    history: list[np.ndarray] = []
    trace: list[float] = []
    converged = False
    for _ in range(cfg.max_iters):
        labels = assign_step(C, X)
        trace.append(objective(X, labels, C))
        if history and np.array_equal(labels, history[-1]):
            converged = True
            break
        history.append(labels)
        C = update_step(X, labels, C)
    return KMeansFit(C, history[-1], trace, history, converged)


def fit_best(data, k: int, cfg: RunConfig = RunConfig(), restarts: int = 1) -> KMeansFit:
    best = None
    for seed in child_seeds(cfg.seed, restarts) if restarts > 1 else [cfg.seed]:
        run = fit(data, k, RunConfig(seed, cfg.max_iters, cfg.tol))
        if best is None or run.objective < best.objective:
            best = run
    return best


def spherical_responsibilities(centroids, data, eps: float, weights=None) -> np.ndarray:
    """Responsibilities of a mixture with shared covariance ``eps * I``.

    As ``eps`` shrinks the rows approach one-hot vectors on the nearest centroid,
    whatever the (positive) weights are.
    """
    if not eps > 0:
        raise ValueError("eps must be > 0")
    X = as_points(data)
    C = np.atleast_2d(np.asarray(centroids, dtype=float))
    k = C.shape[0]
    w = np.full(k, 1.0 / k) if weights is None else np.asarray(weights, dtype=float)
    with np.errstate(divide="ignore"):
        logits = np.log(w)[None, :] - sq_distances(X, C) / (2.0 * eps)
    logits -= logits.max(axis=1, keepdims=True)
    resp = np.exp(logits)
    return resp / resp.sum(axis=1, keepdims=True)
