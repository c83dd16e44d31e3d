"""Aggregate-then-spectral-cluster baselines."""

from __future__ import annotations

import enum

import numpy as np

from .clustering import KMeansConfig, spectral_clustering
from .graph import MultilayerGraph, build_laplacian, validate_laplacian


class BaselineMethod(enum.Enum):
    ARITHMETIC_MEAN = "arithmetic_mean"


def arithmetic_mean_laplacian(g: MultilayerGraph) -> np.ndarray:
    """Entrywise mean of the layer Laplacians.

    Each entry is summed in sorted order, so the result is bitwise identical
    under any permutation of the layers.
    """
    stack = np.sort(np.stack([build_laplacian(layer) for layer in g]), axis=0)
    mean = stack.sum(axis=0) / g.n_layers
    assert validate_laplacian(mean, tol=1e-9 * max(1.0, float(np.max(np.abs(mean)))))
    return mean


AGGREGATORS = {BaselineMethod.ARITHMETIC_MEAN: arithmetic_mean_laplacian}


def baseline_cluster(g: MultilayerGraph, k: int, method: BaselineMethod = BaselineMethod.ARITHMETIC_MEAN,
                     cfg: KMeansConfig | None = None) -> np.ndarray:
    cfg = cfg or KMeansConfig(n_clusters=k)
    return spectral_clustering(AGGREGATORS[BaselineMethod(method)](g), k, cfg)
