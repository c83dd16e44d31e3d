import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlembed.exceptions import DimensionError, DomainError, SingularLaplacianError
from mlembed.graph import (LayerGraph, MultilayerGraph, build_laplacian, count_zero_eigenvalues, degrees,
                           effective_resistance, effective_resistance_matrix, eigendecompose,
                           laplacian_from_upper_weights, laplacian_pseudoinverse, total_effective_resistance,
                           validate_laplacian)

from conftest import blob_graph, path3, random_connected_adjacency, triangle


def test_layer_graph_rejects_invalid_adjacency():
    with pytest.raises(DomainError):
        LayerGraph(np.array([[0, 1], [2, 0.0]]))
    with pytest.raises(DomainError):
        LayerGraph(np.array([[0, -1], [-1, 0.0]]))
    with pytest.raises(DomainError):
        LayerGraph(np.eye(2))
    with pytest.raises(DimensionError):
        LayerGraph(np.zeros((2, 3)))


def test_multilayer_requires_matching_sizes():
    with pytest.raises(DimensionError):
        MultilayerGraph((LayerGraph.empty(3), LayerGraph.empty(4)))
    with pytest.raises(DimensionError):
        MultilayerGraph(())


def test_adjacency_is_read_only():
    g = triangle()
    with pytest.raises(ValueError):
        g.adjacency[0, 1] = 5.0


def test_edges_are_row_major_upper():
    g = LayerGraph.from_edges(4, [(2, 3, 1.5), (1, 0, 0.5)])
    assert list(g.edges()) == [(0, 1, 0.5), (2, 3, 1.5)]
    assert g.n_edges == 2


@pytest.mark.parametrize("g, expected", [
    (triangle(), [2, 2, 2]),
    (LayerGraph.empty(3), [0, 0, 0]),
    (LayerGraph.from_edges(3, [(0, 1, 0.5), (1, 2, 2.0)]), [0.5, 2.5, 2.0]),
])
def test_degrees(g, expected):
    np.testing.assert_allclose(degrees(g), expected)


def test_build_laplacian_examples():
    lt = build_laplacian(triangle())
    np.testing.assert_allclose(lt, 3 * np.eye(3) - np.ones((3, 3)))
    np.testing.assert_allclose(eigendecompose(lt).eigenvalues, [0, 3, 3], atol=1e-12)
    edge = LayerGraph.from_edges(2, [(0, 1, 1.0)])
    np.testing.assert_array_equal(build_laplacian(edge), [[1, -1], [-1, 1]])
    np.testing.assert_allclose(eigendecompose(build_laplacian(path3())).eigenvalues, [0, 1, 3], atol=1e-12)


def test_validate_laplacian():
    assert validate_laplacian(build_laplacian(triangle()))
    assert not validate_laplacian(np.eye(3))
    assert validate_laplacian(np.array([[1.0, -1.0], [-1.0, 1.0]]))
    assert not validate_laplacian(np.array([[-1.0, 1.0], [1.0, -1.0]]))  # positive off-diagonal
    assert not validate_laplacian(np.array([[1.0, -1.0], [-0.5, 0.5]]))  # asymmetric
    with pytest.raises(DimensionError):
        validate_laplacian(np.zeros((2, 3)))


def test_eigendecompose_examples():
    ed = eigendecompose(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_array_equal(ed.eigenvalues, [1, 2, 3])
    np.testing.assert_allclose(np.abs(ed.eigenvectors), np.eye(3)[:, [1, 2, 0]])


def test_eigendecompose_reconstruction():
    m = np.random.default_rng(42).standard_normal((6, 6))
    m = m + m.T
    ed = eigendecompose(m)
    u, lam = ed.eigenvectors, ed.eigenvalues
    np.testing.assert_allclose(u @ np.diag(lam) @ u.T, m, atol=1e-8)
    np.testing.assert_allclose(u.T @ u, np.eye(6), atol=1e-8)
    assert np.all(np.diff(lam) >= 0)
    res = np.linalg.norm(m @ u - u * lam, axis=0)
    assert np.all(res <= 1e-6 * max(1, np.linalg.norm(m, 2)))


def test_eigendecompose_rejects_asymmetric():
    with pytest.raises(DomainError):
        eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_pseudoinverse_examples():
    edge = build_laplacian(LayerGraph.from_edges(2, [(0, 1, 1.0)]))
    # (L + J/2)^{-1} = [[1.5, -0.5], [-0.5, 1.5]]^{-1} = [[0.75, 0.25], [0.25, 0.75]]; minus J/2
    np.testing.assert_allclose(laplacian_pseudoinverse(edge), [[0.25, -0.25], [-0.25, 0.25]], atol=1e-14)
    lt = build_laplacian(triangle())
    np.testing.assert_allclose(np.linalg.eigvalsh(laplacian_pseudoinverse(lt)), [0, 1 / 3, 1 / 3], atol=1e-12)


def test_pseudoinverse_properties(rng):
    for _ in range(10):
        lap = build_laplacian(LayerGraph(random_connected_adjacency(rng, int(rng.integers(3, 12)))))
        pinv = laplacian_pseudoinverse(lap)
        np.testing.assert_allclose(lap @ pinv @ lap, lap, atol=1e-8)
        np.testing.assert_allclose(pinv @ np.ones(len(lap)), 0, atol=1e-10)
        np.testing.assert_allclose(pinv, np.linalg.pinv(lap), atol=1e-9)


def test_pseudoinverse_disconnected_names_eigenvalue():
    lap = build_laplacian(LayerGraph.from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]))
    with pytest.raises(SingularLaplacianError) as info:
        laplacian_pseudoinverse(lap)
    assert info.value.eigenvalue is not None
    assert abs(info.value.eigenvalue) < 1e-8


def test_effective_resistance_examples():
    edge = build_laplacian(LayerGraph.from_edges(2, [(0, 1, 1.0)]))
    assert effective_resistance(edge, 0, 1) == pytest.approx(1.0)
    assert effective_resistance(build_laplacian(path3()), 0, 2) == pytest.approx(2.0)
    # 1 ohm in parallel with 2 ohms in series
    lt = build_laplacian(triangle())
    for i, j in itertools.combinations(range(3), 2):
        assert effective_resistance(lt, i, j) == pytest.approx(2 / 3)


def test_effective_resistance_errors():
    lt = build_laplacian(triangle())
    with pytest.raises(ValueError):
        effective_resistance(lt, 1, 1)
    with pytest.raises(DimensionError):
        effective_resistance(lt, 0, 3)
    disc = build_laplacian(LayerGraph.from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]))
    with pytest.raises(SingularLaplacianError):
        effective_resistance(disc, 0, 2)


def test_total_effective_resistance_examples():
    edge = build_laplacian(LayerGraph.from_edges(2, [(0, 1, 1.0)]))
    assert total_effective_resistance(edge) == pytest.approx(1.0)
    assert total_effective_resistance(build_laplacian(triangle())) == pytest.approx(2.0)
    assert total_effective_resistance(build_laplacian(path3())) == pytest.approx(4.0)
    with pytest.raises(SingularLaplacianError):
        total_effective_resistance(build_laplacian(LayerGraph.empty(3)))


def test_resistance_is_a_metric(rng):
    for _ in range(20):
        n = int(rng.integers(3, 10))
        r = effective_resistance_matrix(build_laplacian(LayerGraph(random_connected_adjacency(rng, n))))
        np.testing.assert_allclose(r, r.T, atol=1e-12)
        for i, j, k in itertools.permutations(range(n), 3):
            assert r[i, k] <= r[i, j] + r[j, k] + 1e-10


def test_resistance_linear_solve_agrees(rng):
    for _ in range(10):
        n = int(rng.integers(3, 12))
        lap = build_laplacian(LayerGraph(random_connected_adjacency(rng, n)))
        for i, j in itertools.combinations(range(n), 2):
            rhs = np.zeros(n)
            rhs[i], rhs[j] = 1.0, -1.0
            v = np.linalg.lstsq(lap, rhs, rcond=None)[0]
            assert v[i] - v[j] == pytest.approx(effective_resistance(lap, i, j), rel=1e-8)


def test_upper_weights_examples():
    np.testing.assert_allclose(laplacian_from_upper_weights([1, 1, 1], 3), build_laplacian(triangle()))
    np.testing.assert_array_equal(laplacian_from_upper_weights(np.zeros(6), 4), np.zeros((4, 4)))
    want = build_laplacian(LayerGraph.from_edges(3, [(0, 1, 0.5), (1, 2, 2.0)]))
    np.testing.assert_allclose(laplacian_from_upper_weights([0.5, 0, 2], 3), want)
    with pytest.raises(DomainError):
        laplacian_from_upper_weights([1, -1, 1], 3)
    with pytest.raises(DimensionError):
        laplacian_from_upper_weights([1, 1], 3)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 9).flatmap(
    lambda n: st.lists(st.floats(0, 10), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2)
    .map(lambda w: (n, w))))
def test_laplacian_invariants_property(nw):
    n, w = nw
    lap = laplacian_from_upper_weights(w, n)
    assert validate_laplacian(lap, tol=1e-9)
    np.testing.assert_allclose(lap @ np.ones(n), 0, atol=1e-12 * max(1, np.abs(lap).max()))
    vals = eigendecompose(lap).eigenvalues
    assert vals[0] <= 1e-8 * max(1, vals[-1])


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_components_give_zero_eigenvalues(rng, k):
    sizes = rng.integers(2, 6, size=k).tolist()
    vals = eigendecompose(build_laplacian(LayerGraph(blob_graph(rng, sizes)))).eigenvalues
    assert count_zero_eigenvalues(vals) == k
    assert vals[k] > 1e-6
