"""End-to-end runs shared by the CLI and the acceptance tests."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .baselines import BaselineMethod, baseline_cluster
from .clustering import KMeansConfig, cluster_embedding
from .data import SyntheticConfig, generate_synthetic
from .graph import MultilayerGraph
from .metrics import Scores, score
from .objective import ObjectiveConfig, objective_gradient
from .optimizer import OptimizerConfig, TrainTrace, finite_difference_gradient, initialize_embedding, optimize


@dataclass
class ProposedResult:
    embedding: np.ndarray
    labels: np.ndarray
    trace: TrainTrace


def run_proposed(g: MultilayerGraph, obj_cfg: ObjectiveConfig, opt_cfg: OptimizerConfig,
                 km_cfg: KMeansConfig) -> ProposedResult:
    z, trace = optimize(g, obj_cfg, opt_cfg)
    return ProposedResult(z, cluster_embedding(z, km_cfg), trace)


def random_instance(rng: np.random.Generator, n: int, n_layers: int, density: float = 0.5) -> MultilayerGraph:
    """Random weighted layers; each pair is an edge with probability ``density``."""
    adj = []
    for _ in range(n_layers):
        w = np.triu(rng.uniform(0.1, 2.0, (n, n)) * (rng.random((n, n)) < density), 1)
        adj.append(w + w.T)
    return MultilayerGraph.from_adjacencies(adj)


@dataclass
class GradCheckCase:
    seed: int
    n: int
    k: int
    n_layers: int
    rel_error: float


def gradient_check(n_instances: int = 20, gamma1: float = 0.1, gamma2: float = 100.0, seed: int = 0,
                   sizes=(6, 8, 10), ks=(2, 3), layer_counts=(1, 2), h: float = 1e-5,
                   gradient=objective_gradient) -> list[GradCheckCase]:
    """Analytic vs central-difference gradient on seeded random instances.

    The relative error is ``||analytic - fd||_F / ||fd||_F`` (0 when both vanish).
    """
    cases = []
    for i in range(n_instances):
        rng = np.random.default_rng([seed, i])
        n, k, s = int(rng.choice(sizes)), int(rng.choice(ks)), int(rng.choice(layer_counts))
        g = random_instance(rng, n, s)
        z = initialize_embedding(n, k, int(rng.integers(2**31)))
        cfg = ObjectiveConfig(k, gamma1, gamma2)
        ana = gradient(z, g, cfg)
        fd = finite_difference_gradient(z, g, cfg, h)
        num = float(np.linalg.norm(ana - fd))
        den = float(np.linalg.norm(fd))
        rel = 0.0 if num == 0 else num / max(den, np.finfo(float).tiny)
        cases.append(GradCheckCase(i, n, k, s, rel))
    return cases


@dataclass
class TrialResult:
    seed: int
    proposed: Scores
    baseline: Scores
    step_failure: bool


def compare_trial(seed: int, syn_cfg: SyntheticConfig, obj_cfg: ObjectiveConfig, opt_cfg: OptimizerConfig,
                  km_cfg: KMeansConfig) -> TrialResult:
    ds = generate_synthetic(replace(syn_cfg, seed=seed))
    prop = run_proposed(ds.graph, obj_cfg, replace(opt_cfg, seed=seed), replace(km_cfg, seed=seed))
    base = baseline_cluster(ds.graph, obj_cfg.n_clusters, BaselineMethod.ARITHMETIC_MEAN, replace(km_cfg, seed=seed))
    return TrialResult(seed, score(prop.labels, ds.truth), score(base, ds.truth), prop.trace.step_failure)


def summarize(trials: list[TrialResult]) -> dict:
    """``{method: {metric: {"median", "q1", "q3"}}}`` across trials."""
    out = {}
    for method in ("proposed", "arithmetic_mean"):
        attr = "proposed" if method == "proposed" else "baseline"
        out[method] = {}
        for metric in ("accuracy", "purity", "nmi", "ari"):
            vals = np.array([getattr(getattr(t, attr), metric) for t in trials])
            q1, med, q3 = np.percentile(vals, [25, 50, 75])
            out[method][metric] = {"median": float(med), "q1": float(q1), "q3": float(q3)}
    return out
