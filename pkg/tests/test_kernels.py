import numpy as np
import pytest

from unicluster import kmeans
from unicluster.core import RunConfig, rng_stream
from unicluster.datagen import circles
from unicluster.errors import EmptyCluster
from unicluster.kernels import (
    KernelSpec,
    assignment_matrix,
    kernel_eval,
    kernel_matrix,
    wkk_distances,
    wkk_fit,
    wkk_objective,
    wkk_point_distance,
    wkk_trace_objective,
)
from unicluster.metrics import ari


def test_kernel_eval_values():
    assert kernel_eval(KernelSpec.gaussian(0.7), [1.0, 2.0], [1.0, 2.0]) == 1.0
    assert kernel_eval(KernelSpec.gaussian(1.0), [0.0], [2.0]) == pytest.approx(np.exp(-2.0))
    assert kernel_eval(KernelSpec.polynomial(1.0, 2), [1.0, 2.0], [3.0, 1.0]) == 36.0
    assert kernel_eval(KernelSpec.linear(), [1.0, 2.0], [3.0, 1.0]) == 5.0


def test_heaviside_boundary():
    h = KernelSpec.heaviside(0.5)
    assert kernel_eval(h, [0.0], [0.5]) == 1.0
    assert kernel_eval(h, [0.0], [0.5 + 1e-12]) == 0.0
    assert kernel_eval(KernelSpec.heaviside(5.0), [0.0, 0.0], [3.0, 4.0]) == 1.0


def test_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec.gaussian(0.0)
    with pytest.raises(ValueError):
        KernelSpec.heaviside(-1.0)
    with pytest.raises(ValueError):
        KernelSpec.polynomial(1.0, 0.5)
    with pytest.raises(ValueError):
        KernelSpec("cosine")


def test_kernel_matrix(rng):
    for spec in (KernelSpec.gaussian(1.0), KernelSpec.heaviside(0.3)):
        assert kernel_matrix(spec, [[1.0, 2.0]]).K.tolist() == [[1.0]]
    X = rng.normal(size=(100, 3))
    km = kernel_matrix(KernelSpec.linear(), X)
    np.testing.assert_allclose(km.K, X @ X.T, atol=1e-12)
    assert km.n_evals == 5050
    g = kernel_matrix(KernelSpec.gaussian(0.8), X).K
    assert np.array_equal(g, g.T) and np.all(np.diag(g) == 1.0) and np.all((g > 0) & (g <= 1))


def test_wkk_point_distance_linear(rng):
    X = rng.normal(size=(20, 2))
    K = X @ X.T
    lab = rng.integers(0, 3, size=20)
    lab[:3] = [0, 1, 2]
    w = np.ones(20)
    D = wkk_distances(K, w, lab, 3)
    for i in range(20):
        for c in range(3):
            ref = np.sum((X[i] - X[lab == c].mean(0)) ** 2)
            assert wkk_point_distance(K, w, lab, i, c) == pytest.approx(ref, abs=1e-10)
            assert D[i, c] == pytest.approx(ref, abs=1e-10)


def test_wkk_point_distance_special_cases():
    X = np.array([[0.0], [0.1], [5.0]])
    K = kernel_matrix(KernelSpec.heaviside(0.5), X).K
    lab = np.array([0, 0, 1])
    assert wkk_point_distance(K, np.ones(3), lab, 2, 1) == 0.0
    # K_2j = 0 for j in cluster 0 -> 1 + pairwise term (= 1 here, all pairs in cluster 0 connected)
    assert wkk_point_distance(K, np.ones(3), lab, 2, 0) == pytest.approx(1.0 + 1.0)
    with pytest.raises(EmptyCluster):
        wkk_point_distance(K, np.ones(3), lab, 0, 2)


@pytest.mark.parametrize("seed", range(10))
def test_wkk_linear_reduces_to_kmeans(seed):
    r = rng_stream(seed)
    X = r.normal(size=(80, 2)) + r.integers(0, 3, size=(80, 1)) * 3
    km = kmeans.fit(X, 3, RunConfig(seed=seed))
    wk = wkk_fit(X @ X.T, np.ones(80), 3, init=km.history[0])
    assert len(wk.history) == len(km.history)
    for a, b in zip(wk.history, km.history):
        assert np.array_equal(a, b)


def test_wkk_k1_single_pass(rng):
    X = rng.normal(size=(15, 2))
    res = wkk_fit(X @ X.T, None, 1)
    assert np.all(res.labels == 0) and len(res.history) == 1


@pytest.mark.parametrize("seed", range(5))
def test_wkk_objective_non_increasing(seed):
    ds = circles(120, 1.0, 3.0, 0.1, rng_stream(seed))
    K = kernel_matrix(KernelSpec.gaussian(0.5), ds.points).K
    trace = wkk_fit(K, np.ones(120), 2, RunConfig(seed=seed)).objective_trace
    assert all(b <= a + 1e-10 * abs(a) for a, b in zip(trace, trace[1:]))


def test_wkk_separates_circles():
    ds = circles(300, 1.0, 3.0, 0.05, rng_stream(1))
    K = kernel_matrix(KernelSpec.gaussian(1.0), ds.points).K
    runs = [wkk_fit(K, None, 2, RunConfig(seed=s)) for s in range(20)]
    best = min(runs, key=lambda r: r.objective_trace[-1])
    assert ari(best.labels, ds.labels) == 1.0


def _quotient_objective(K, w, lab, k):
    total = 0.0
    for c in range(k):
        idx = np.flatnonzero(lab == c)
        total += w[idx] @ K[np.ix_(idx, idx)] @ w[idx] / w[idx].sum()
    return total


@pytest.mark.parametrize("seed", range(20))
def test_trace_objective_matches_quotient_form(seed):
    r = rng_stream(seed)
    X = r.normal(size=(25, 2))
    K = kernel_matrix(KernelSpec.gaussian(1.0), X).K
    w = r.random(25) + 0.1
    lab = r.integers(0, 3, size=25)
    lab[:3] = [0, 1, 2]
    Y = assignment_matrix(w, lab, 3)
    np.testing.assert_allclose(Y.T @ Y, np.eye(3), atol=1e-12)
    assert abs(wkk_trace_objective(K, w, lab) - _quotient_objective(K, w, lab, 3)) <= 1e-10


def test_trace_objective_single_block(rng):
    X = rng.normal(size=(12, 2))
    K = kernel_matrix(KernelSpec.gaussian(1.0), X).K
    assert wkk_trace_objective(K, np.ones(12), np.zeros(12, dtype=int)) == pytest.approx(K.sum() / 12, rel=1e-12)


def test_trace_and_wkk_objective_are_complementary(rng):
    X = rng.normal(size=(20, 2))
    K = kernel_matrix(KernelSpec.gaussian(1.0), X).K
    w = rng.random(20) + 0.5
    const = np.sum(w * np.diag(K))
    labs = []
    for _ in range(10):
        lab = rng.integers(0, 3, size=20)
        lab[:3] = [0, 1, 2]
        labs.append(lab)
        assert wkk_objective(K, w, lab, 3) == pytest.approx(const - wkk_trace_objective(K, w, lab), abs=1e-10)
    for a in labs:
        for b in labs:
            ta, tb = wkk_trace_objective(K, w, a), wkk_trace_objective(K, w, b)
            oa, ob = wkk_objective(K, w, a, 3), wkk_objective(K, w, b, 3)
            if abs(ta - tb) > 1e-9:
                assert (ta > tb) == (oa < ob)
