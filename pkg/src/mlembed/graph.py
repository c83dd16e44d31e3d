"""Graph containers, combinatorial Laplacians and their spectral quantities.

Everything is dense: the graphs this package targets have at most a few
hundred vertices, where a full symmetric eigendecomposition is cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .exceptions import DimensionError, DomainError, NumericalError, SingularLaplacianError

# An eigenvalue counts as zero when it is below ZERO_EIG_RTOL * max(1, lambda_max).
ZERO_EIG_RTOL = 1e-8


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LayerGraph:
    """One weighted undirected layer, stored as a dense adjacency matrix."""

    adjacency: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.adjacency, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DimensionError(f"adjacency must be square, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise DomainError("adjacency contains non-finite entries")
        if np.any(w < 0):
            raise DomainError("edge weights must be nonnegative")
        if np.any(np.diag(w) != 0):
            raise DomainError("self-loops are not allowed (nonzero diagonal)")
        if not np.array_equal(w, w.T):
            raise DomainError("adjacency must be symmetric")
        object.__setattr__(self, "adjacency", _frozen(w))

    @classmethod
    def from_edges(cls, n_vertices: int, edges) -> "LayerGraph":
        """Build a layer from ``(i, j, w)`` triples; both orientations are set."""
        w = np.zeros((n_vertices, n_vertices))
        for i, j, weight in edges:
            if i == j:
                raise DomainError(f"self-loop at vertex {i}")
            w[i, j] = w[j, i] = weight
        return cls(w)

    @classmethod
    def empty(cls, n_vertices: int) -> "LayerGraph":
        return cls(np.zeros((n_vertices, n_vertices)))

    @property
    def n_vertices(self) -> int:
        return self.adjacency.shape[0]

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Yield ``(i, j, w)`` with ``i < j`` for every positive-weight edge, row-major."""
        rows, cols = np.nonzero(np.triu(self.adjacency, 1))
        for i, j in zip(rows.tolist(), cols.tolist()):
            yield i, j, float(self.adjacency[i, j])

    @property
    def n_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency, 1)))

    def __eq__(self, other):
        if not isinstance(other, LayerGraph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class MultilayerGraph:
    """S >= 1 layers sharing one vertex set."""

    layers: tuple[LayerGraph, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise DimensionError("a multilayer graph needs at least one layer")
        n = layers[0].n_vertices
        for s, layer in enumerate(layers):
            if layer.n_vertices != n:
                raise DimensionError(
                    f"layer {s} has {layer.n_vertices} vertices, expected {n}")
        object.__setattr__(self, "layers", layers)

    @classmethod
    def from_adjacencies(cls, adjacencies: Sequence[np.ndarray]) -> "MultilayerGraph":
        return cls(tuple(LayerGraph(w) for w in adjacencies))

    @property
    def n_vertices(self) -> int:
        return self.layers[0].n_vertices

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    def __iter__(self):
        return iter(self.layers)

    def __len__(self):
        return len(self.layers)

    def __eq__(self, other):
        if not isinstance(other, MultilayerGraph):
            return NotImplemented
        return len(self) == len(other) and all(a == b for a, b in zip(self, other))

    __hash__ = None


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray   # ascending
    eigenvectors: np.ndarray  # column n pairs with eigenvalues[n]


def _adjacency(g) -> np.ndarray:
    return g.adjacency if isinstance(g, LayerGraph) else np.asarray(g, dtype=float)


def degrees(g: LayerGraph) -> np.ndarray:
    """Weighted degree of every vertex."""
    return _adjacency(g).sum(axis=1)


def build_laplacian(g: LayerGraph) -> np.ndarray:
    """Combinatorial Laplacian ``D - W``."""
    w = _adjacency(g)
    lap = -w.copy()
    # diagonal from off-diagonal sums so that rows sum to zero to rounding
    np.fill_diagonal(lap, 0.0)
    np.fill_diagonal(lap, -lap.sum(axis=1))
    return lap


def laplacian_from_weights(w: np.ndarray) -> np.ndarray:
    """Laplacian of a symmetric weight matrix; the diagonal of ``w`` is ignored."""
    lap = -np.asarray(w, dtype=float).copy()
    np.fill_diagonal(lap, 0.0)
    np.fill_diagonal(lap, -lap.sum(axis=1))
    return lap


def validate_laplacian(m, tol: float = 1e-10) -> bool:
    """Check membership in the set of valid combinatorial Laplacians.

    Off-diagonal entries must be <= tol, and symmetry and zero row sums must
    hold within tol.

    Raises:
        DimensionError: if ``m`` is not a square matrix.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        return False
    off = m - np.diag(np.diag(m))
    if np.any(off > tol):
        return False
    if np.max(np.abs(m - m.T), initial=0.0) > tol:
        return False
    return bool(np.max(np.abs(m.sum(axis=1)), initial=0.0) <= tol)


def eigendecompose(m) -> EigenDecomposition:
    """Dense symmetric eigendecomposition with ascending eigenvalues.

    The input is symmetrized as ``(M + M^T) / 2`` first.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    asym = float(np.max(np.abs(m - m.T), initial=0.0))
    if asym > 1e-10 * scale:
        raise DomainError(f"matrix is not symmetric (max |M - M^T| = {asym:.3e})")
    sym = 0.5 * (m + m.T)
    try:
        vals, vecs = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        finite = bool(np.all(np.isfinite(sym)))
        fro = float(np.linalg.norm(sym)) if finite else float("nan")
        raise NumericalError(
            f"symmetric eigensolver did not converge (n={sym.shape[0]}, "
            f"finite={finite}, ||M||_F={fro:.3e}): {exc}") from exc
    # eigh is ascending already; the stable sort pins tie order
    order = np.argsort(vals, kind="stable")
    return EigenDecomposition(vals[order], vecs[:, order])


def laplacian_pseudoinverse(lap) -> np.ndarray:
    """Moore-Penrose pseudoinverse via ``(L + 11^T/N)^{-1} - 11^T/N``.

    Raises:
        SingularLaplacianError: if the shifted matrix is numerically singular,
            which happens exactly when the graph is disconnected.
    """
    lap = np.asarray(lap, dtype=float)
    n = lap.shape[0]
    j = np.full((n, n), 1.0 / n)
    shifted = lap + j
    vals = np.linalg.eigvalsh(0.5 * (shifted + shifted.T))
    if vals[0] <= ZERO_EIG_RTOL * max(1.0, vals[-1]):
        raise SingularLaplacianError(
            f"L + 11^T/N is singular: smallest eigenvalue {vals[0]:.3e} "
            "(graph is disconnected)", eigenvalue=float(vals[0]))
    pinv = np.linalg.inv(shifted) - j
    return 0.5 * (pinv + pinv.T)


def effective_resistance(lap, i: int, j: int) -> float:
    """Effective resistance between vertices ``i`` and ``j``."""
    lap = np.asarray(lap, dtype=float)
    n = lap.shape[0]
    if i == j:
        raise ValueError("effective resistance needs two distinct vertices")
    if not (0 <= i < n and 0 <= j < n):
        raise DimensionError(f"vertex ids ({i}, {j}) out of range for N={n}")
    pinv = laplacian_pseudoinverse(lap)
    return float(pinv[i, i] + pinv[j, j] - 2.0 * pinv[i, j])


def effective_resistance_matrix(lap) -> np.ndarray:
    """All pairwise effective resistances at once (zero diagonal)."""
    pinv = laplacian_pseudoinverse(lap)
    d = np.diag(pinv)
    r = d[:, None] + d[None, :] - 2.0 * pinv
    np.fill_diagonal(r, 0.0)
    return r


def total_effective_resistance(lap) -> float:
    """``N * sum_{n>=2} 1/lambda_n``, the sum of resistances over all pairs."""
    lap = np.asarray(lap, dtype=float)
    n = lap.shape[0]
    vals = eigendecompose(lap).eigenvalues
    if n < 2:
        return 0.0
    if vals[1] < 1e-12:
        raise SingularLaplacianError(
            f"second eigenvalue {vals[1]:.3e} is below 1e-12 (graph is disconnected)",
            eigenvalue=float(vals[1]))
    return float(n * np.sum(1.0 / vals[1:]))


def laplacian_from_upper_weights(w, n: int) -> np.ndarray:
    """Assemble a Laplacian from strict-upper-triangular edge weights.

    ``w`` lists the weights of pairs (0,1), (0,2), ..., (0,N-1), (1,2), ...
    in row-major order.
    """
    w = np.asarray(w, dtype=float).ravel()
    if w.size != n * (n - 1) // 2:
        raise DimensionError(
            f"expected {n * (n - 1) // 2} upper-triangular weights for N={n}, got {w.size}")
    if np.any(w < 0):
        raise DomainError("edge weights must be nonnegative")
    full = np.zeros((n, n))
    rows, cols = np.triu_indices(n, 1)
    full[rows, cols] = w
    full[cols, rows] = w
    return laplacian_from_weights(full)


def strict_upper(m) -> np.ndarray:
    """Strict upper triangle of a square matrix, row-major, as a flat vector."""
    m = np.asarray(m)
    return m[np.triu_indices(m.shape[0], 1)]


def count_zero_eigenvalues(vals, rtol: float = ZERO_EIG_RTOL) -> int:
    vals = np.asarray(vals)
    return int(np.sum(vals <= rtol * max(1.0, float(vals[-1]))))
