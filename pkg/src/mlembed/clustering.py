"""K-means (k-means++ seeding, restarts) and spectral clustering of a Laplacian."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import ConfigError, DimensionError
from .graph import eigendecompose


@dataclass(frozen=True)
class KMeansConfig:
    n_clusters: int
    n_restarts: int = 20
    max_iters: int = 300
    tol: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.n_clusters < 1 or self.n_restarts < 1 or self.max_iters < 1 or self.tol <= 0:
            raise ConfigError("KMeansConfig fields must be positive")


class KMeansResult(NamedTuple):
    labels: np.ndarray
    centers: np.ndarray
    wcss: float
    history: list  # WCSS after every assignment/update half-step of the winning restart
    restart: int


def _sqdist(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - c[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _wcss(x: np.ndarray, labels: np.ndarray, centers: np.ndarray) -> float:
    return float(np.sum((x - centers[labels]) ** 2))


def kmeans_plusplus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Indices of k-means++ seeds. When every remaining point coincides with a
    chosen seed, the lowest unchosen index is taken."""
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    closest = np.sum((x - x[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=closest / total))
        else:
            nxt = next(i for i in range(n) if i not in chosen)
        chosen.append(nxt)
        closest = np.minimum(closest, np.sum((x - x[nxt]) ** 2, axis=1))
    return np.array(chosen)


def _repair_empty(x, labels, centers, k):
    # move the point farthest from its center in the largest cluster into each empty one
    for c in range(k):
        if np.any(labels == c):
            continue
        sizes = np.bincount(labels, minlength=k)
        big = int(np.argmax(sizes))
        members = np.flatnonzero(labels == big)
        d = np.sum((x[members] - centers[big]) ** 2, axis=1)
        victim = members[int(np.argmax(d))]
        labels[victim] = c
        centers[c] = x[victim]
        centers[big] = x[labels == big].mean(axis=0)
    return labels, centers


def _lloyd(x, centers, max_iters, tol):
    k = centers.shape[0]
    centers = centers.copy()
    labels = np.argmin(_sqdist(x, centers), axis=1)
    labels, centers = _repair_empty(x, labels, centers, k)
    history = [_wcss(x, labels, centers)]
    for _ in range(max_iters):
        new_centers = np.stack([x[labels == c].mean(axis=0) for c in range(k)])
        history.append(_wcss(x, labels, new_centers))
        shift = float(np.max(np.sum((new_centers - centers) ** 2, axis=1)))
        centers = new_centers
        new_labels = np.argmin(_sqdist(x, centers), axis=1)
        new_labels, centers = _repair_empty(x, new_labels, centers, k)
        history.append(_wcss(x, new_labels, centers))
        changed = not np.array_equal(new_labels, labels)
        labels = new_labels
        if not changed or shift <= tol:
            break
    return labels, centers, history


def _canonical(labels: np.ndarray) -> np.ndarray:
    # renumber clusters by first appearance
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty(labels.max() + 1, dtype=int)
    remap[np.unique(labels)[order]] = np.arange(order.size)
    return remap[labels]


def kmeans_fit(points, cfg: KMeansConfig) -> KMeansResult:
    """Best of ``cfg.n_restarts`` Lloyd runs by within-cluster sum of squares."""
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n, k = x.shape[0], cfg.n_clusters
    if k > n:
        raise DimensionError(f"n_clusters={k} exceeds the number of points {n}")
    best = None
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_restarts)
    for r, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        init = x[kmeans_plusplus(x, k, rng)]
        labels, centers, history = _lloyd(x, init, cfg.max_iters, cfg.tol)
        wcss = history[-1]
        # strict < keeps the earliest restart on ties
        if best is None or wcss < best.wcss:
            best = KMeansResult(labels, centers, wcss, history, r)
    return best._replace(labels=_canonical(best.labels))


def kmeans(points, cfg: KMeansConfig) -> np.ndarray:
    """Cluster labels in ``[0, K)`` for the rows of ``points``."""
    return kmeans_fit(points, cfg).labels


def canonicalize_signs(vecs: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry (first on ties) is positive."""
    vecs = np.array(vecs, dtype=float, copy=True)
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def spectral_embedding(lap, k: int, normalize_rows: bool = False) -> np.ndarray:
    """Eigenvectors of the K smallest eigenvalues, sign-canonicalized.

    ``normalize_rows`` rescales each row to unit length (off by default).
    """
    lap = np.asarray(lap, dtype=float)
    if k > lap.shape[0]:
        raise DimensionError(f"K={k} exceeds N={lap.shape[0]}")
    emb = canonicalize_signs(eigendecompose(lap).eigenvectors[:, :k])
    if normalize_rows:
        norms = np.linalg.norm(emb, axis=1, keepdims=True)
        emb = emb / np.where(norms > 0, norms, 1.0)
    return emb


def spectral_clustering(lap, k: int, cfg: KMeansConfig, normalize_rows: bool = False) -> np.ndarray:
    return kmeans(spectral_embedding(lap, k, normalize_rows), cfg)


def cluster_embedding(z, cfg: KMeansConfig) -> np.ndarray:
    """K-means on the rows of an embedding whose width equals ``cfg.n_clusters``."""
    z = np.asarray(z, dtype=float)
    if z.shape[1] != cfg.n_clusters:
        raise DimensionError(f"embedding has {z.shape[1]} columns, n_clusters={cfg.n_clusters}")
    return kmeans(z, cfg)
