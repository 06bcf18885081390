"""Gaussian mixtures, k-means, kernel/spectral clustering, DBSCAN and Mean Shift in one package."""
from .core import OUTLIER, ClusteringReport, Dataset, RunConfig, canonicalize, harden, rng_stream
from .metrics import ami, ari

__all__ = [
    "OUTLIER",
    "ClusteringReport",
    "Dataset",
    "RunConfig",
    "ami",
    "ari",
    "canonicalize",
    "harden",
    "rng_stream",
]
__version__ = "0.1.0"
