"""Kernel functions, kernel matrices and weighted kernel k-means."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import RunConfig, as_points, rng_stream
from .errors import EmptyCluster

KINDS = ("gaussian", "polynomial", "heaviside", "linear")


@dataclass(frozen=True)
class KernelSpec:
    kind: str
    sigma: float | None = None
    c: float = 0.0
    b: float = 1.0
    eps: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel {self.kind!r}")
        if self.kind == "gaussian" and not (self.sigma and self.sigma > 0):
            raise ValueError("gaussian kernel needs sigma > 0")
        if self.kind == "heaviside" and not (self.eps and self.eps > 0):
            raise ValueError("heaviside kernel needs eps > 0")
        if self.kind == "polynomial" and self.b < 1:
            raise ValueError("polynomial degree must be >= 1")

    @classmethod
    def gaussian(cls, sigma: float) -> KernelSpec:
        return cls("gaussian", sigma=sigma)

    @classmethod
    def polynomial(cls, c: float, b: float) -> KernelSpec:
        return cls("polynomial", c=c, b=b)

    @classmethod
    def heaviside(cls, eps: float) -> KernelSpec:
        return cls("heaviside", eps=eps)

    @classmethod
    def linear(cls) -> KernelSpec:
        return cls("linear")


def _pairs(spec: KernelSpec, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Kernel values for matched rows of P and Q."""
    if spec.kind == "linear":
        return np.einsum("ij,ij->i", P, Q)
    if spec.kind == "polynomial":
        return (np.einsum("ij,ij->i", P, Q) + spec.c) ** spec.b
    diff = P - Q
    d2 = np.einsum("ij,ij->i", diff, diff)
    if spec.kind == "gaussian":
        return np.exp(-d2 / (2.0 * spec.sigma**2))
    # boundary inclusive: eps - |x - y| >= 0
    return (spec.eps - np.sqrt(d2) >= 0).astype(float)


def kernel_eval(spec: KernelSpec, x, y) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ValueError("points must have the same dimension")
    return float(_pairs(spec, x[None], y[None])[0])


@dataclass(frozen=True)
class KernelMatrix:
    K: np.ndarray
    spec: KernelSpec
    n_evals: int


def kernel_matrix(spec: KernelSpec, data) -> KernelMatrix:
    """Evaluate the kernel on the n(n+1)/2 pairs i <= j and mirror."""
    X = as_points(data)
    n = X.shape[0]
    iu, ju = np.triu_indices(n)
    vals = _pairs(spec, X[iu], X[ju])
    K = np.empty((n, n))
    K[iu, ju] = vals
    K[ju, iu] = vals
    return KernelMatrix(K, spec, int(vals.size))


def _blocks(labels: np.ndarray, k: int) -> np.ndarray:
    U = np.zeros((labels.size, k))
    U[np.arange(labels.size), labels] = 1.0
    return U


def wkk_distances(K, w, labels, k: int) -> np.ndarray:
    """Squared feature-space distance of every point to every implicit cluster mean.

    ``|phi_i - m_c|^2 = K_ii - 2 sum_j w_j K_ij / s_c + sum_jl w_j w_l K_jl / s_c^2``
    with the last term computed once per cluster. Empty clusters get +inf.
    """
    K = np.asarray(K, dtype=float)
    w = np.asarray(w, dtype=float)
    Uw = _blocks(np.asarray(labels), k) * w[:, None]
    s = Uw.sum(axis=0)
    cross = K @ Uw  # (n, k): sum_{j in c} w_j K_ij
    self_term = np.einsum("jc,jc->c", Uw, cross)  # sum_{j,l in c} w_j w_l K_jl
    out = np.full((K.shape[0], k), np.inf)
    live = s > 0
    out[:, live] = (
        np.diag(K)[:, None] - 2.0 * cross[:, live] / s[live] + self_term[live] / s[live] ** 2
    )
    return out


def wkk_point_distance(K, w, labels, i: int, c: int) -> float:
    labels = np.asarray(labels)
    members = np.flatnonzero(labels == c)
    if members.size == 0:
        raise EmptyCluster(f"cluster {c} is empty")
    K = np.asarray(K, dtype=float)
    wm = np.asarray(w, dtype=float)[members]
    s = wm.sum()
    return float(
        K[i, i] - 2.0 * wm @ K[i, members] / s + wm @ K[np.ix_(members, members)] @ wm / s**2
    )


def wkk_objective(K, w, labels, k: int) -> float:
    labels = np.asarray(labels)
    dist = wkk_distances(K, w, labels, k)
    return float(np.sum(np.asarray(w) * dist[np.arange(labels.size), labels]))


def balanced_init(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    labels = np.empty(n, dtype=int)
    labels[rng.permutation(n)] = np.arange(n) % k
    return labels


@dataclass
class WkkFit:
    labels: np.ndarray
    objective_trace: list[float]
    history: list[np.ndarray] = field(repr=False, default_factory=list)
    converged: bool = False


def wkk_fit(K, w, k: int, cfg: RunConfig = RunConfig(), init=None) -> WkkFit:
    """Weighted kernel k-means driven purely by the kernel matrix.

    ``history[0]`` is the initial assignment; each further entry is the result of
    one reassignment against the implicit means of the previous one.
    """
    K = np.asarray(K, dtype=float)
    n = K.shape[0]
    w = np.ones(n) if w is None else np.asarray(w, dtype=float)
    labels = balanced_init(n, k, rng_stream(cfg.seed)) if init is None else np.asarray(init, dtype=int).copy()
    if np.any(np.bincount(labels, minlength=k)[:k] == 0):
        raise EmptyCluster("every initial cluster must be non-empty")
    history = [labels]
    trace: list[float] = []
    converged = False
    for _ in range(cfg.max_iters):
        dist = wkk_distances(K, w, labels, k)
        trace.append(float(np.sum(w * dist[np.arange(n), labels])))
        new = np.argmin(dist, axis=1)
        counts = np.bincount(new, minlength=k)
        if np.any(counts == 0):
            own = dist[np.arange(n), new]
            far = np.argsort(-own, kind="stable")
            for c, i in zip(np.flatnonzero(counts == 0), far):
                new[i] = c
        if np.array_equal(new, labels):
            converged = True
            break
        labels = new
        history.append(labels)
    return WkkFit(labels, trace, history, converged)


def assignment_matrix(w, labels, k: int) -> np.ndarray:
    """Y with entries sqrt(w_i / s_c) in the block pattern of ``labels``."""
    w = np.asarray(w, dtype=float)
    labels = np.asarray(labels)
    U = _blocks(labels, k)
    s = (U * w[:, None]).sum(axis=0)
    if np.any(s <= 0):
        raise EmptyCluster("every cluster needs positive weight")
    return U * np.sqrt(w[:, None] / s[None, :])


def wkk_trace_objective(K, w, labels, k: int | None = None) -> float:
    """Tr(Y^T W^1/2 K W^1/2 Y); larger is better."""
    labels = np.asarray(labels)
    k = int(labels.max()) + 1 if k is None else k
    w = np.asarray(w, dtype=float)
    Y = assignment_matrix(w, labels, k)
    if not np.allclose(Y.T @ Y, np.eye(k), rtol=0, atol=1e-10):
        raise AssertionError("assignment matrix columns are not orthonormal")
    sw = np.sqrt(w)
    M = sw[:, None] * np.asarray(K, dtype=float) * sw[None, :]
    return float(np.trace(Y.T @ M @ Y))
