"""Embedding objective: contrastive fidelity over layers plus spectral regularizers.

The objective of an embedding ``Z`` (N x K) on a multilayer graph is::

    sum_s J(Z; layer s) + gamma1 * R_eff(L(Z)) + gamma2 * R_com(L(Z))

where ``L(Z)`` is the Laplacian of the complete graph whose edge weights are
the pairwise similarities ``1 / (1 + exp(||z_i - z_j||^2))``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from .exceptions import ConfigError, DimensionError
from .graph import LayerGraph, MultilayerGraph, eigendecompose, laplacian_from_weights

# Beyond this squared distance the similarity is returned as exactly zero.
SQDIST_CUTOFF = 700.0
DEGENERACY_GAP = 1e-9


class DegenerateSpectrumWarning(RuntimeWarning):
    """Eigenvalues K and K+1 of the induced Laplacian (nearly) coincide."""


@dataclass(frozen=True)
class ObjectiveConfig:
    n_clusters: int
    gamma1: float = 0.1
    gamma2: float = 100.0
    eig_floor: float = 1e-8

    def __post_init__(self):
        if self.n_clusters < 1:
            raise ConfigError(f"n_clusters must be >= 1, got {self.n_clusters}")
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ConfigError("gamma1 and gamma2 must be nonnegative")
        if not 0 < self.eig_floor <= 1e-6:
            raise ConfigError(f"eig_floor must lie in (0, 1e-6], got {self.eig_floor}")

    def check_size(self, n_vertices: int):
        if self.n_clusters >= n_vertices:
            raise DimensionError(
                f"n_clusters={self.n_clusters} must be smaller than N={n_vertices}")


def constraint_violation(z) -> float:
    """Frobenius distance of ``Z^T Z`` from ``I / N``."""
    z = np.asarray(z, dtype=float)
    n, k = z.shape
    return float(np.linalg.norm(z.T @ z - np.eye(k) / n))


def is_embedding(z, tol: float = 1e-8) -> bool:
    return constraint_violation(z) <= tol


def _sim_from_sqdist(d2: np.ndarray) -> np.ndarray:
    d2 = np.asarray(d2, dtype=float)
    out = np.zeros_like(d2)
    ok = d2 <= SQDIST_CUTOFF
    out[ok] = 1.0 / (1.0 + np.exp(d2[ok]))
    return out


def similarity(zi, zj) -> float:
    """Similarity ``1 / (1 + exp(||zi - zj||^2))``, in (0, 1/2]."""
    zi = np.asarray(zi, dtype=float)
    zj = np.asarray(zj, dtype=float)
    if zi.shape != zj.shape:
        raise DimensionError(f"vector shapes differ: {zi.shape} vs {zj.shape}")
    d = zi - zj
    return float(_sim_from_sqdist(np.array(d @ d)))


def squared_distances(z) -> np.ndarray:
    """Pairwise squared Euclidean distances between rows, exactly symmetric."""
    z = np.asarray(z, dtype=float)
    diff = z[:, None, :] - z[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    # (a-b)^2 and (b-a)^2 agree bitwise, but keep the guarantee explicit
    return np.triu(d2, 1) + np.triu(d2, 1).T


def induced_similarity_matrix(z) -> np.ndarray:
    """Matrix of pairwise similarities between embedding rows (diagonal 1/2)."""
    return _sim_from_sqdist(squared_distances(z))


def induced_laplacian(z) -> np.ndarray:
    """Laplacian of the complete graph weighted by the induced similarities."""
    return laplacian_from_weights(induced_similarity_matrix(z))


def _neighbor_mask(g) -> np.ndarray:
    w = g.adjacency if isinstance(g, LayerGraph) else np.asarray(g)
    return w > 0


def _softmax_terms(sim: np.ndarray):
    """Row-wise log-normalizer and softmax of ``sim`` over k != i."""
    masked = sim.copy()
    np.fill_diagonal(masked, -np.inf)
    lse = logsumexp(masked, axis=1)
    prob = np.exp(masked - lse[:, None])
    return lse, prob


def _contrastive_from_sim(sim: np.ndarray, mask: np.ndarray, lse: np.ndarray) -> float:
    deg = mask.sum(axis=1)
    return float(np.sum(deg * lse) - np.sum(sim[mask]))


def contrastive_loss(z, g: LayerGraph) -> float:
    """Softmax contrastive loss of the embedding against one layer.

    Each directed neighbor pair (i, j) with ``w_ij > 0`` contributes
    ``-log softmax_{k != i}(SIM_ik)[j]``. Edge weights only decide membership.
    """
    z = np.asarray(z, dtype=float)
    mask = _neighbor_mask(g)
    if mask.shape[0] != z.shape[0]:
        raise DimensionError(f"graph has {mask.shape[0]} vertices, embedding has {z.shape[0]} rows")
    sim = induced_similarity_matrix(z)
    lse, _ = _softmax_terms(sim)
    return _contrastive_from_sim(sim, mask, lse)


def _reff_from_eigs(vals: np.ndarray, k: int, eig_floor: float) -> float:
    return float(np.sum(1.0 / np.maximum(vals[k:], eig_floor)))


def _rcom_from_eigs(vals: np.ndarray, k: int) -> float:
    return float(np.sum(vals[:k] ** 2))


def effective_resistance_regularizer(lap, k: int, eig_floor: float = 1e-8) -> float:
    """``sum_{n>K} 1 / max(lambda_n, eig_floor)`` over ascending eigenvalues."""
    lap = np.asarray(lap, dtype=float)
    if k + 1 > lap.shape[0]:
        raise DimensionError(f"K+1={k + 1} exceeds N={lap.shape[0]}")
    return _reff_from_eigs(eigendecompose(lap).eigenvalues, k, eig_floor)


def community_regularizer(lap, k: int) -> float:
    """Sum of squares of the K smallest eigenvalues."""
    lap = np.asarray(lap, dtype=float)
    if k > lap.shape[0]:
        raise DimensionError(f"K={k} exceeds N={lap.shape[0]}")
    return _rcom_from_eigs(eigendecompose(lap).eigenvalues, k)


class ObjectiveTerms(NamedTuple):
    contrastive: float
    reff: float
    rcom: float
    total: float


def _check_inputs(z: np.ndarray, g: MultilayerGraph, cfg: ObjectiveConfig):
    if z.ndim != 2:
        raise DimensionError(f"embedding must be 2-D, got shape {z.shape}")
    if z.shape[0] != g.n_vertices:
        raise DimensionError(f"graph has {g.n_vertices} vertices, embedding has {z.shape[0]} rows")
    if z.shape[1] != cfg.n_clusters:
        raise DimensionError(f"embedding has {z.shape[1]} columns, n_clusters={cfg.n_clusters}")
    cfg.check_size(g.n_vertices)


def objective_terms(z, g: MultilayerGraph, cfg: ObjectiveConfig) -> ObjectiveTerms:
    z = np.asarray(z, dtype=float)
    _check_inputs(z, g, cfg)
    sim = induced_similarity_matrix(z)
    lse, _ = _softmax_terms(sim)
    fid = sum(_contrastive_from_sim(sim, _neighbor_mask(layer), lse) for layer in g)
    vals = eigendecompose(laplacian_from_weights(sim)).eigenvalues
    k = cfg.n_clusters
    reff = _reff_from_eigs(vals, k, cfg.eig_floor)
    rcom = _rcom_from_eigs(vals, k)
    return ObjectiveTerms(fid, reff, rcom, fid + cfg.gamma1 * reff + cfg.gamma2 * rcom)


def total_objective(z, g: MultilayerGraph, cfg: ObjectiveConfig) -> float:
    """Full objective value at ``Z`` (the constraint is not checked here)."""
    return objective_terms(z, g, cfg).total


def objective_and_gradient(z, g: MultilayerGraph, cfg: ObjectiveConfig):
    """Objective value and its Euclidean gradient with respect to ``Z``.

    Returns:
        (value, grad) where grad has the shape of ``Z``.
    """
    z = np.asarray(z, dtype=float)
    _check_inputs(z, g, cfg)
    n = z.shape[0]
    k = cfg.n_clusters

    sim = induced_similarity_matrix(z)
    lse, prob = _softmax_terms(sim)

    # d(fidelity)/d(SIM_ik), treating ordered pairs as independent variables
    fid = 0.0
    g_sim = np.zeros((n, n))
    for layer in g:
        mask = _neighbor_mask(layer)
        fid += _contrastive_from_sim(sim, mask, lse)
        g_sim += mask.sum(axis=1)[:, None] * prob - mask
    np.fill_diagonal(g_sim, 0.0)

    vals, vecs = eigendecompose(laplacian_from_weights(sim))
    reff = _reff_from_eigs(vals, k, cfg.eig_floor)
    rcom = _rcom_from_eigs(vals, k)
    if k < n and vals[k] - vals[k - 1] <= DEGENERACY_GAP:
        warnings.warn(
            f"eigenvalues {k} and {k + 1} of the induced Laplacian differ by "
            f"{vals[k] - vals[k - 1]:.2e}; using solver eigenvectors as a subgradient",
            DegenerateSpectrumWarning, stacklevel=2)

    # d(regularizer)/d(lambda_n); the floor has zero slope below eig_floor
    dlam = np.zeros(n)
    dlam[:k] = 2.0 * cfg.gamma2 * vals[:k]
    tail = vals[k:]
    dlam[k:] = np.where(tail > cfg.eig_floor, -cfg.gamma1 / np.maximum(tail, cfg.eig_floor) ** 2, 0.0)
    # d lambda_n / d w_ij = (u_ni - u_nj)^2  =>  B_ii + B_jj - 2 B_ij with B = U diag(dlam) U^T
    b = (vecs * dlam) @ vecs.T
    bd = np.diag(b)
    g_w = bd[:, None] + bd[None, :] - 2.0 * b

    # chain through SIM = sigmoid(-d2) onto unordered squared distances
    coef = (g_sim + g_sim.T + g_w) * (-sim * (1.0 - sim))
    np.fill_diagonal(coef, 0.0)
    grad = 2.0 * (laplacian_from_weights(coef) @ z)
    total = fid + cfg.gamma1 * reff + cfg.gamma2 * rcom
    return total, grad


def objective_gradient(z, g: MultilayerGraph, cfg: ObjectiveConfig) -> np.ndarray:
    """Euclidean (unconstrained) gradient of :func:`total_objective`."""
    return objective_and_gradient(z, g, cfg)[1]
