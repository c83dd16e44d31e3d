"""Multilayer graph clustering with an optimized node embedding."""

from .baselines import BaselineMethod, arithmetic_mean_laplacian, baseline_cluster
from .clustering import KMeansConfig, cluster_embedding, kmeans, spectral_clustering, spectral_embedding
from .data import Dataset, SyntheticConfig, generate_synthetic, knn_graph, load_multilayer, save_multilayer
from .graph import LayerGraph, MultilayerGraph, build_laplacian, eigendecompose
from .metrics import Scores, score
from .objective import ObjectiveConfig, objective_gradient, total_objective
from .optimizer import OptimizerConfig, TrainTrace, optimize, retract

__version__ = "0.1.0"
