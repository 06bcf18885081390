"""Data containers, assignment helpers and seeded randomness."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

OUTLIER = -1

# PCG64 is numpy's documented default bit generator; streams are stable for a
# given seed across platforms.
GENERATOR = "PCG64"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    points: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"points must be a non-empty (n, d) table, got shape {pts.shape}")
        object.__setattr__(self, "points", _frozen(pts))
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=int)
            if lab.shape != (pts.shape[0],):
                raise ValueError("labels must have one entry per point")
            object.__setattr__(self, "labels", _frozen(lab))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    max_iters: int = 300
    tol: float = 1e-6

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")


@dataclass
class ClusteringReport:
    """Outcome of one clustering run, in the shape the CLI serializes."""

    algorithm: str
    params: dict[str, Any]
    labels: np.ndarray
    iterations: int = 0
    loglik_trace: list[float] | None = None
    objective_trace: list[float] | None = None
    eigenvalues: list[float] | None = None
    centers: np.ndarray | None = None
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def n_outliers(self) -> int:
        return int(np.sum(self.labels == OUTLIER))

    @property
    def n_clusters(self) -> int:
        return len(np.unique(self.labels[self.labels != OUTLIER]))


def as_points(data) -> np.ndarray:
    """Accept a Dataset or anything array-like and return an (n, d) float array."""
    if isinstance(data, Dataset):
        return data.points
    pts = np.asarray(data, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError(f"expected an (n, d) array, got shape {pts.shape}")
    return pts


def canonicalize(labels) -> np.ndarray:
    """Relabel cluster ids by order of first appearance; OUTLIER stays -1.

    >>> canonicalize([2, 2, 0, 0]).tolist()
    [0, 0, 1, 1]
    """
    labels = np.asarray(labels, dtype=int)
    out = np.full(labels.shape, OUTLIER, dtype=int)
    mapping: dict[int, int] = {}
    for i, c in enumerate(labels.tolist()):
        if c == OUTLIER:
            continue
        if c not in mapping:
            mapping[c] = len(mapping)
        out[i] = mapping[c]
    return out


def n_clusters(labels) -> int:
    labels = np.asarray(labels)
    return len(np.unique(labels[labels != OUTLIER]))


def check_soft(resp, atol: float = 1e-9) -> np.ndarray:
    resp = np.asarray(resp, dtype=float)
    if resp.ndim != 2:
        raise ValueError("responsibilities must be an (n, k) matrix")
    if np.any(resp < -atol) or np.any(resp > 1 + atol):
        raise ValueError("responsibilities must lie in [0, 1]")
    if not np.allclose(resp.sum(axis=1), 1.0, rtol=0, atol=atol):
        raise ValueError("responsibility rows must sum to 1")
    return resp


def harden(resp) -> np.ndarray:
    """Index of the largest responsibility per row; ties go to the lowest index."""
    return np.argmax(np.asarray(resp, dtype=float), axis=1)


def rng_stream(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def child_seeds(seed: int, count: int) -> list[int]:
    """Independent, reproducible seeds for restarts."""
    ss = np.random.SeedSequence(seed)
    return [int(s.generate_state(1, dtype=np.uint64)[0]) for s in ss.spawn(count)]
