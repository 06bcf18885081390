"""Seeded synthetic datasets: Gaussian mixtures and concentric circles."""
from __future__ import annotations

import numpy as np

from .core import Dataset, rng_stream
from .gmm import MixtureModel, sample_mixture


def blobs(n: int, means, covariances, weights=None, rng: np.random.Generator | None = None) -> Dataset:
    means = np.atleast_2d(np.asarray(means, dtype=float))
    k = means.shape[0]
    weights = np.full(k, 1.0 / k) if weights is None else np.asarray(weights, dtype=float)
    model = MixtureModel(weights, means, np.asarray(covariances, dtype=float))
    points, labels = sample_mixture(model, n, rng if rng is not None else rng_stream(0))
    return Dataset(points, labels)


def circles(n: int, r_inner: float = 1.0, r_outer: float = 3.0, noise: float = 0.0,
            rng: np.random.Generator | None = None) -> Dataset:
    """Two concentric rings, n // 2 points on the inner one (label 0), the rest outside."""
    if not 0 < r_inner < r_outer:
        raise ValueError("need 0 < r_inner < r_outer")
    rng = rng if rng is not None else rng_stream(0)
    labels = np.repeat([0, 1], [n // 2, n - n // 2])
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    radius = np.where(labels == 0, r_inner, r_outer) + noise * rng.standard_normal(n)
    return Dataset(np.column_stack([radius * np.cos(theta), radius * np.sin(theta)]), labels)


PRESETS = {
    # one correlated Gaussian cloud
    "fig3": dict(n=500, means=[[0.0, 0.0]], covariances=[[[2.0, 1.2], [1.2, 1.0]]]),
    # three anisotropic components
    "fig5": dict(
        n=1500,
        means=[[0.0, 0.0], [7.0, 3.0], [1.0, 8.0]],
        covariances=[
            [[2.0, 1.2], [1.2, 1.0]],
            [[1.0, -0.6], [-0.6, 1.2]],
            [[0.5, 0.0], [0.0, 2.0]],
        ],
        weights=[0.3, 0.4, 0.3],
    ),
    # two long parallel ellipses that Euclidean k-means cuts the wrong way
    "ellipses": dict(
        n=600,
        means=[[0.0, -1.5], [0.0, 1.5]],
        covariances=[[[16.0, 0.0], [0.0, 0.25]], [[16.0, 0.0], [0.0, 0.25]]],
    ),
    # three well-separated round blobs
    "blobs3": dict(
        n=600,
        means=[[0.0, 0.0], [6.0, 0.0], [3.0, 5.0]],
        covariances=[np.eye(2) * 0.1] * 3,
    ),
}


def preset(name: str, seed: int = 0) -> Dataset:
    rng = rng_stream(seed)
    if name == "circles":
        return circles(300, 1.0, 3.0, 0.05, rng)
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted([*PRESETS, 'circles'])}")
    return blobs(rng=rng, **PRESETS[name])


PRESET_NAMES = sorted([*PRESETS, "circles"])
