import itertools

import numpy as np
import pytest

from mlembed.clustering import (KMeansConfig, cluster_embedding, kmeans, kmeans_fit, spectral_clustering,
                                spectral_embedding)
from mlembed.exceptions import DimensionError
from mlembed.graph import LayerGraph, build_laplacian, eigendecompose
from mlembed.metrics import score

from conftest import blob_graph, path3, triangle
from oracles import exhaustive_wcss


def test_kmeans_two_pairs():
    x = np.array([[0.0, 0.0], [0.0, 0.0], [5.0, 5.0], [5.0, 5.0]])
    res = kmeans_fit(x, KMeansConfig(2))
    assert res.labels[0] == res.labels[1] != res.labels[2] == res.labels[3]
    assert res.wcss == 0


def test_kmeans_identical_points():
    res = kmeans_fit(np.ones((5, 2)), KMeansConfig(2))
    assert res.wcss == 0
    assert set(res.labels.tolist()) == {0, 1}


def test_kmeans_1d_enumeration():
    x = np.array([0.0, 0.1, 10.0, 10.1])
    labels = kmeans(x, KMeansConfig(2))
    assert labels.tolist() == [0, 0, 1, 1]
    res = kmeans_fit(x, KMeansConfig(2))
    assert res.wcss == pytest.approx(exhaustive_wcss(x[:, None]))


def test_kmeans_too_many_clusters():
    with pytest.raises(DimensionError):
        kmeans(np.zeros((3, 2)), KMeansConfig(4))


def test_kmeans_history_monotone(rng):
    for _ in range(10):
        x = rng.standard_normal((40, 3))
        res = kmeans_fit(x, KMeansConfig(4, seed=int(rng.integers(100))))
        assert np.all(np.diff(res.history) <= 1e-12)
        assert res.labels.max() < 4 and len(res.labels) == 40


def test_kmeans_deterministic(rng):
    x = rng.standard_normal((30, 2))
    a = kmeans_fit(x, KMeansConfig(3, seed=5))
    b = kmeans_fit(x, KMeansConfig(3, seed=5))
    np.testing.assert_array_equal(a.labels, b.labels)
    assert a.wcss == b.wcss


def test_kmeans_every_cluster_nonempty(rng):
    x = np.vstack([np.zeros((8, 2)), rng.standard_normal((2, 2)) * 1e-3])
    labels = kmeans(x, KMeansConfig(4))
    assert np.bincount(labels, minlength=4).min() >= 1


def test_spectral_embedding_examples():
    two_edges = build_laplacian(LayerGraph.from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]))
    emb = spectral_embedding(two_edges, 2)
    indicators = np.array([[1, 1, 0, 0], [0, 0, 1, 1]]).T / np.sqrt(2)
    # same column span as the component indicators
    np.testing.assert_allclose(emb @ emb.T, indicators @ indicators.T, atol=1e-12)

    col = spectral_embedding(build_laplacian(triangle()), 1)
    np.testing.assert_allclose(col[:, 0], np.full(3, 1 / np.sqrt(3)), atol=1e-12)

    # path 0-1-2: Fiedler vector (1, 0, -1)/sqrt(2), canonical sign makes entry 0 positive
    emb = spectral_embedding(build_laplacian(path3()), 2)
    np.testing.assert_allclose(emb[:, 1], np.array([1, 0, -1]) / np.sqrt(2), atol=1e-12)


def test_spectral_embedding_orthonormal_residuals(rng):
    lap = build_laplacian(LayerGraph(blob_graph(rng, [4, 5, 3])))
    emb = spectral_embedding(lap, 3)
    np.testing.assert_allclose(emb.T @ emb, np.eye(3), atol=1e-8)
    vals = eigendecompose(lap).eigenvalues[:3]
    assert np.all(np.linalg.norm(lap @ emb - emb * vals, axis=0) <= 1e-6 * max(1, np.linalg.norm(lap, 2)))


def test_spectral_embedding_row_normalization(rng):
    lap = build_laplacian(LayerGraph(blob_graph(rng, [4, 4])))
    emb = spectral_embedding(lap, 2, normalize_rows=True)
    np.testing.assert_allclose(np.linalg.norm(emb, axis=1), 1)


def test_spectral_clustering_two_triangles():
    w = np.zeros((6, 6))
    w[:3, :3] = 1 - np.eye(3)
    w[3:, 3:] = 1 - np.eye(3)
    labels = spectral_clustering(build_laplacian(LayerGraph(w)), 2, KMeansConfig(2))
    assert labels.tolist() == [0, 0, 0, 1, 1, 1]


def test_spectral_clustering_single_clique():
    w = 1 - np.eye(5)
    assert spectral_clustering(build_laplacian(LayerGraph(w)), 1, KMeansConfig(1)).tolist() == [0] * 5


def _ncut(w, mask):
    cut = w[mask][:, ~mask].sum()
    return cut / w[mask].sum() + cut / w[~mask].sum()


def test_spectral_clustering_weakly_joined_blobs():
    w = np.zeros((8, 8))
    w[:4, :4] = 1 - np.eye(4)
    w[4:, 4:] = 1 - np.eye(4)
    w[3, 4] = w[4, 3] = 0.05
    # the min normalized cut by enumeration is the blob split
    best = min((m for m in itertools.product([False, True], repeat=8) if 0 < sum(m) < 8),
               key=lambda m: _ncut(w, np.array(m)))
    want = np.array(best, dtype=int)
    labels = spectral_clustering(build_laplacian(LayerGraph(w)), 2, KMeansConfig(2))
    assert score(labels, want).accuracy == 1.0


def test_cluster_embedding_examples():
    z = np.array([[1, 0], [1, 0], [0, 1], [0, 1]]) / 2
    labels = cluster_embedding(z, KMeansConfig(2))
    assert labels[0] == labels[1] != labels[2] == labels[3]
    groups = np.repeat(np.eye(3), 4, axis=0) / np.sqrt(12) + 1e-3 * np.random.default_rng(0).standard_normal((12, 3))
    assert score(cluster_embedding(groups, KMeansConfig(3)), np.repeat([0, 1, 2], 4)).accuracy == 1.0
    with pytest.raises(DimensionError):
        cluster_embedding(z, KMeansConfig(3))
