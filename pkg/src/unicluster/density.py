"""Density-based clustering: DBSCAN (graph, spectral and hill-climbing forms) and Mean Shift.

Neighborhoods are boundary inclusive, ``|x - x_j| <= eps``, and always
contain the query point itself when it belongs to the dataset. A point is core
when its neighborhood holds at least ``min_pts`` points.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import OUTLIER, ClusteringReport, as_points, canonicalize
from .errors import EmptyNeighborhood
from .graph import SimilarityGraph, connected_components_dfs, eigenone_components
from .kernels import KernelSpec, kernel_matrix

CLIMB_MAX_ITERS = 500
DELTA_FRACTION = 1e-6  # fixed-point tolerance, as a fraction of eps


@dataclass(frozen=True)
class DbscanParams:
    eps: float
    min_pts: int

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be > 0")
        if self.min_pts < 1:
            raise ValueError("min_pts must be >= 1")


def eps_neighborhood(data, x, eps: float) -> np.ndarray:
    X = as_points(data)
    d = np.linalg.norm(X - np.asarray(x, dtype=float), axis=1)
    return np.flatnonzero(d <= eps)


def pairwise_distances(X: np.ndarray, counter: Counter | None = None) -> np.ndarray:
    """Symmetric distance matrix from the n(n-1)/2 pairs i < j."""
    n = X.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    diff = X[iu] - X[ju]
    vals = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    if counter is not None:
        counter["distance_evals"] += vals.size
    D = np.zeros((n, n))
    D[iu, ju] = vals
    D[ju, iu] = vals
    return D


def _attach_border(dist: np.ndarray, core: np.ndarray, core_labels: np.ndarray, eps: float) -> np.ndarray:
    """Non-core points join the cluster of their nearest core point if it lies within eps."""
    n = dist.shape[0]
    labels = np.full(n, OUTLIER, dtype=int)
    core_idx = np.flatnonzero(core)
    labels[core_idx] = core_labels
    if core_idx.size == 0:
        return labels
    for i in np.flatnonzero(~core):
        j = int(np.argmin(dist[i, core_idx]))  # ties -> lowest core index
        if dist[i, core_idx[j]] <= eps:
            labels[i] = core_labels[j]
    return labels


def _report(name: str, p: DbscanParams | None, eps: float, labels, **extra) -> ClusteringReport:
    params = {"eps": eps} if p is None else {"eps": p.eps, "min_pts": p.min_pts}
    return ClusteringReport(algorithm=name, params=params, labels=canonicalize(labels), **extra)


def dbscan_graph(data, p: DbscanParams) -> ClusteringReport:
    X = as_points(data)
    counter: Counter = Counter()
    dist = pairwise_distances(X, counter)
    within = dist <= p.eps
    core = within.sum(axis=1) >= p.min_pts
    core_idx = np.flatnonzero(core)
    g = SimilarityGraph(within[np.ix_(core_idx, core_idx)].astype(float))
    comps = connected_components_dfs(g)
    labels = _attach_border(dist, core, comps, p.eps)
    return _report("dbscan", p, p.eps, labels, diagnostics={"n_core": int(core.sum()), **counter})


def dbscan_spectral(data, p: DbscanParams) -> ClusteringReport:
    X = as_points(data)
    km = kernel_matrix(KernelSpec.heaviside(p.eps), X)
    A = km.K
    deg = A.sum(axis=1)  # neighbors plus the self loop, i.e. |N_eps(x_i)|
    core = deg >= p.min_pts
    isolated = (deg == 1) & ~core
    core_idx = np.flatnonzero(core)
    if core_idx.size:
        # the filtered graph gets fresh degrees from its own rows
        comps = eigenone_components(SimilarityGraph(A[np.ix_(core_idx, core_idx)]))
    else:
        comps = np.empty(0, dtype=int)
    labels = _attach_border(pairwise_distances(X), core, comps, p.eps)
    return _report(
        "dbscan-spectral",
        p,
        p.eps,
        labels,
        diagnostics={"n_core": int(core.sum()), "n_isolated": int(isolated.sum()), "kernel_evals": km.n_evals},
    )


# radial profiles k(u), u = |x - x_i|^2 / h^2
PROFILES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "flat": lambda u: (u <= 1.0).astype(float),
    "epanechnikov": lambda u: np.where(u <= 1.0, 1.0 - u, 0.0),
    "gaussian": lambda u: np.exp(-0.5 * u),
}


def kde(data, x, profile: str | Callable = "flat", h: float = 1.0) -> float:
    """(1 / (n h^d)) sum_i k(|(x - x_i) / h|^2)."""
    if not h > 0:
        raise ValueError("h must be > 0")
    X = as_points(data)
    n, d = X.shape
    kfun = PROFILES[profile] if isinstance(profile, str) else profile
    u = np.sum(((np.asarray(x, dtype=float) - X) / h) ** 2, axis=1)
    return float(np.sum(kfun(u)) / (n * h**d))


def mean_shift_vector(data, x, eps: float) -> np.ndarray:
    """x minus the mean of its eps-neighborhood; the climbing step moves to ``x - m(x)``."""
    X = as_points(data)
    x = np.asarray(x, dtype=float)
    idx = eps_neighborhood(X, x, eps)
    if idx.size == 0:
        raise EmptyNeighborhood("no data point within eps")
    return x - X[idx].mean(axis=0)


@dataclass
class ClimbResult:
    points: np.ndarray
    steps: np.ndarray  # accepted moves per point
    scans: int  # neighborhood scans against the original data
    paths: list[list[np.ndarray]] | None = None


def climb(
    data,
    eps: float,
    min_pts: int | None = None,
    max_iters: int = CLIMB_MAX_ITERS,
    record_paths: bool = False,
) -> ClimbResult:
    """Move a copy of every point to the mean of its eps-neighborhood in the original data.

    A point stops once it is dense (``min_pts`` given), reaches a fixed point
    (step <= 1e-6 eps), or exhausts ``max_iters`` scans. Each climb depends only
    on the static original data, so the order points are processed in is irrelevant.
    """
    X = as_points(data)
    n = X.shape[0]
    delta = DELTA_FRACTION * eps
    pos = X.copy()
    steps = np.zeros(n, dtype=int)
    active = np.ones(n, dtype=bool)
    paths = [[X[i].copy()] for i in range(n)] if record_paths else None
    scans = 0
    for _ in range(max_iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        diff = pos[idx, None, :] - X[None, :, :]
        inside = np.einsum("mnd,mnd->mn", diff, diff) <= eps * eps
        scans += idx.size
        counts = inside.sum(axis=1)
        dense = counts >= min_pts if min_pts is not None else np.zeros(idx.size, dtype=bool)
        target = (inside.astype(float) @ X) / np.maximum(counts, 1)[:, None]
        move = np.linalg.norm(target - pos[idx], axis=1)
        fixed = move <= delta
        stepping = ~dense & ~fixed
        moved = idx[stepping]
        pos[moved] = target[stepping]
        steps[moved] += 1
        if paths is not None:
            for i in moved:
                paths[i].append(pos[i].copy())
        active[idx[~stepping]] = False
    return ClimbResult(pos, steps, scans, paths)


def _climbed_components(points: np.ndarray, eps: float) -> np.ndarray:
    within = pairwise_distances(points) <= eps
    comps = connected_components_dfs(SimilarityGraph(within.astype(float)))
    sizes = np.bincount(comps)
    comps[sizes[comps] == 1] = OUTLIER
    return comps


def _centers(points: np.ndarray, labels: np.ndarray) -> np.ndarray:
    ids = [c for c in range(labels.max(initial=-1) + 1)]
    if not ids:
        return np.empty((0, points.shape[1]))
    return np.array([points[labels == c].mean(axis=0) for c in ids])


def dbscan_climb(data, p: DbscanParams, max_iters: int = CLIMB_MAX_ITERS) -> ClusteringReport:
    X = as_points(data)
    res = climb(X, p.eps, p.min_pts, max_iters)
    labels = canonicalize(_climbed_components(res.points, p.eps))
    return _report(
        "dbscan-climb",
        p,
        p.eps,
        labels,
        iterations=int(res.steps.max(initial=0)),
        centers=_centers(res.points, labels),
        diagnostics={"climb_steps": int(res.steps.sum()), "scans": res.scans},
    )


def mean_shift(data, eps: float, max_iters: int = CLIMB_MAX_ITERS) -> ClusteringReport:
    """Climb every point to its local density peak, then take eps-components of the peaks."""
    if not eps > 0:
        raise ValueError("eps must be > 0")
    X = as_points(data)
    res = climb(X, eps, None, max_iters)
    labels = canonicalize(_climbed_components(res.points, eps))
    return _report(
        "meanshift",
        None,
        eps,
        labels,
        iterations=int(res.steps.max(initial=0)),
        centers=_centers(res.points, labels),
        diagnostics={"climb_steps": int(res.steps.sum()), "scans": res.scans},
    )
