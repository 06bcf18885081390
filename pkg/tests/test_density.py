from collections import Counter

import numpy as np
import pytest

from unicluster.core import OUTLIER, canonicalize, rng_stream
from unicluster.density import (
    CLIMB_MAX_ITERS,
    DbscanParams,
    climb,
    dbscan_climb,
    dbscan_graph,
    dbscan_spectral,
    eps_neighborhood,
    kde,
    mean_shift,
    mean_shift_vector,
    pairwise_distances,
)
from oracles import same_partition
from unicluster.errors import EmptyNeighborhood


def planted(seed, eps=0.5):
    """Two tight blobs far apart plus 5 noise points more than 10 eps from everything."""
    r = rng_stream(seed)
    a = r.normal(size=(60, 2)) * 0.2
    b = r.normal(size=(60, 2)) * 0.2 + [20.0, 0.0]
    noise = np.array([[10.0, 30.0], [-30.0, 0.0], [50.0, 50.0], [10.0, -30.0], [-20.0, 40.0]])
    return np.vstack([a, b, noise])


def test_eps_neighborhood(rng):
    X = rng.normal(size=(30, 2))
    assert eps_neighborhood(X, X[0], 1e6).tolist() == list(range(30))
    Y = np.vstack([X, [[100.0, 100.0]]])
    assert eps_neighborhood(Y, Y[30], 0.1).tolist() == [30]
    G = np.stack(np.meshgrid(np.arange(6.0), np.arange(6.0)), -1).reshape(-1, 2)
    for q in G[::5]:
        brute = [j for j in range(len(G)) if np.sqrt(np.sum((q - G[j]) ** 2)) <= 1.0]
        assert eps_neighborhood(G, q, 1.0).tolist() == brute


def test_pairwise_distance_count(rng):
    c = Counter()
    X = rng.normal(size=(17, 3))
    D = pairwise_distances(X, c)
    assert c["distance_evals"] == 17 * 16 // 2
    np.testing.assert_allclose(D, np.linalg.norm(X[:, None] - X[None], axis=-1), atol=1e-12)


def test_dbscan_trivial_cases(rng):
    X = rng.normal(size=(20, 2)) * 0.01
    rep = dbscan_graph(X, DbscanParams(1.0, 5))
    assert rep.n_clusters == 1 and rep.n_outliers == 0
    Y = np.vstack([X, [[50.0, 50.0]]])
    assert dbscan_graph(Y, DbscanParams(1.0, 2)).labels[-1] == OUTLIER


def test_dbscan_planted_noise():
    X = planted(0)
    rep = dbscan_graph(X, DbscanParams(0.5, 5))
    assert rep.n_clusters == 2
    assert np.all(rep.labels[-5:] == OUTLIER)
    assert np.all(rep.labels[:120] != OUTLIER)


def test_border_points_attach_to_nearest_core():
    X = np.array([[0.0], [0.1], [0.2], [0.9]])
    rep = dbscan_graph(X, DbscanParams(0.75, 3))
    # points 0..2 are core; 0.9 is a border point 0.7 from its nearest core
    assert rep.labels.tolist() == [0, 0, 0, 0]
    rep = dbscan_graph(X, DbscanParams(0.65, 3))
    assert rep.labels.tolist() == [0, 0, 0, OUTLIER]


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("eps", [0.15, 0.4, 1.0])
@pytest.mark.parametrize("min_pts", [3, 5, 10])
def test_spectral_equals_graph(seed, eps, min_pts):
    X = rng_stream(seed).normal(size=(90, 2))
    p = DbscanParams(eps, min_pts)
    assert np.array_equal(dbscan_graph(X, p).labels, dbscan_spectral(X, p).labels)


def test_spectral_trivial_cases():
    far = np.arange(5.0)[:, None] * 10
    rep = dbscan_spectral(far, DbscanParams(1.0, 2))
    assert np.all(rep.labels == OUTLIER) and rep.n_clusters == 0
    clique = np.zeros((6, 2))
    assert dbscan_spectral(clique, DbscanParams(1.0, 3)).labels.tolist() == [0] * 6


def test_kde_definitions(rng):
    assert kde([[1.0, 2.0]], [1.0, 2.0], "flat", 0.5) == pytest.approx(1 / 0.25)
    X = rng.normal(size=(50, 2))
    x = np.array([0.2, -0.1])
    inside = np.sum(np.linalg.norm(X - x, axis=1) <= 0.7)
    assert kde(X, x, "flat", 0.7) == pytest.approx(inside / (50 * 0.49))
    Y = rng.normal(size=(40, 1))
    naive = sum(np.exp(-0.5 * ((0.3 - y) / 0.4) ** 2) for y in Y[:, 0]) / (40 * 0.4)
    assert kde(Y, [0.3], "gaussian", 0.4) == pytest.approx(naive, rel=1e-12)


def test_mean_shift_vector_fixed_points():
    X = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [0.0, 0.0]])
    np.testing.assert_allclose(mean_shift_vector(X, [0.0, 0.0], 1.5), 0.0)
    Y = np.array([[0.0], [10.0]])
    np.testing.assert_allclose(mean_shift_vector(Y, [0.0], 1.0), 0.0)
    with pytest.raises(EmptyNeighborhood):
        mean_shift_vector(Y, [5.0], 1.0)


def test_climb_density_early_exit():
    X = rng_stream(0).normal(size=(30, 2)) * 0.1
    res = climb(X, 1.0, min_pts=5)
    assert np.all(res.steps == 0)
    np.testing.assert_array_equal(res.points, X)


def test_climb_leaves_original_untouched():
    X = rng_stream(1).normal(size=(40, 2))
    before = X.copy()
    climb(X, 0.5)
    np.testing.assert_array_equal(X, before)


def test_lone_point_outlier():
    X = np.vstack([rng_stream(2).normal(size=(30, 2)) * 0.1, [[40.0, 40.0]]])
    res = climb(X, 0.5, min_pts=5)
    assert res.steps[-1] == 0
    assert dbscan_climb(X, DbscanParams(0.5, 5)).labels[-1] == OUTLIER
    assert mean_shift(X, 0.5).labels[-1] == OUTLIER


def _singletons_as_outliers(labels):
    labels = labels.copy()
    ids, counts = np.unique(labels[labels >= 0], return_counts=True)
    for c, m in zip(ids, counts):
        if m == 1:
            labels[labels == c] = OUTLIER
    return labels


@pytest.mark.parametrize("seed", range(5))
def test_climb_with_min_pts_one_equals_graph(seed):
    X = rng_stream(seed).normal(size=(80, 2))
    p = DbscanParams(0.3, 1)
    res = climb(X, p.eps, p.min_pts)
    assert np.all(res.steps == 0)
    expected = canonicalize(_singletons_as_outliers(dbscan_graph(X, p).labels))
    assert np.array_equal(dbscan_climb(X, p).labels, expected)


@pytest.mark.parametrize("seed", range(5))
def test_climb_three_blobs_matches_graph_count(seed):
    r = rng_stream(seed)
    means = np.array([[0, 0], [8, 0], [4, 7]])
    X = np.vstack([r.normal(size=(80, 2)) * 0.4 + m for m in means])
    p = DbscanParams(0.6, 5)
    assert dbscan_climb(X, p).n_clusters == dbscan_graph(X, p).n_clusters == 3


@pytest.mark.parametrize("seed", range(5))
def test_climb_ascends_epanechnikov_density(seed):
    X = rng_stream(seed).normal(size=(150, 2))
    eps = 0.6
    res = climb(X, eps, record_paths=True)
    for path in res.paths:
        f = [kde(X, p, "epanechnikov", eps) for p in path]
        assert all(b >= a - 1e-12 for a, b in zip(f, f[1:]))


def test_mean_shift_order_invariant():
    X = rng_stream(4).normal(size=(120, 2))
    perm = rng_stream(5).permutation(120)
    a = mean_shift(X, 0.7)
    b = mean_shift(X[perm], 0.7)
    assert same_partition(a.labels[perm].tolist(), b.labels.tolist())


def test_mean_shift_single_point():
    assert mean_shift([[1.0, 2.0]], 0.5).labels.tolist() == [OUTLIER]


@pytest.mark.parametrize("seed", range(6))
def test_mean_shift_single_blob_converges_to_one_mode(seed):
    X = rng_stream(seed).normal(size=(200, 2)) * 0.5
    eps = 1.0
    res = climb(X, eps)
    for x in res.points:
        assert np.linalg.norm(mean_shift_vector(X, x, eps)) <= 1e-6 * eps
    # flat-kernel fixed points need not coincide, but they cluster far inside eps
    assert np.linalg.norm(res.points - res.points.mean(0), axis=1).max() <= 0.05 * eps
    assert mean_shift(X, eps).n_clusters == 1


def test_mean_shift_scan_budget():
    X = rng_stream(7).normal(size=(100, 2))
    res = climb(X, 0.5, max_iters=CLIMB_MAX_ITERS)
    assert res.scans <= 100 * CLIMB_MAX_ITERS


def test_dbscan_core_distance_count():
    X = rng_stream(8).normal(size=(64, 2))
    rep = dbscan_graph(X, DbscanParams(0.3, 4))
    assert rep.diagnostics["distance_evals"] == 64 * 63 // 2


def test_params_validation():
    with pytest.raises(ValueError):
        DbscanParams(0.0, 3)
    with pytest.raises(ValueError):
        DbscanParams(1.0, 0)
