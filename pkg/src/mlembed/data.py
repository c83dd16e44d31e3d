"""Synthetic multilayer datasets, K-NN graphs, and on-disk formats.

Directory layout of a saved multilayer graph::

    meta.json        {"n_vertices": N, "n_layers": S}
    layer_00.edges   "# ..." header, then one "i j w" line per edge (i < j)
    layer_01.edges
    labels.txt       optional, one integer per line

Floats are written with 17 significant digits so that save/load round trips
are exact.
"""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .exceptions import ConfigError, DimensionError, ParseError
from .graph import LayerGraph, MultilayerGraph

log = logging.getLogger(__name__)

MAX_WEIGHT = 1e12
META_FILE = "meta.json"
LABELS_FILE = "labels.txt"


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class SyntheticConfig:
    """Gaussian-mixture point clouds, one per layer, turned into K-NN graphs.

    With ``components=None`` every layer draws its own K means uniformly in
    ``[-mean_range, mean_range]^2`` and covariances ``cov_scale * (A^T A + 0.5 I)``
    with ``A`` standard normal. Otherwise ``components[s][c]`` is a
    ``(mean, cov)`` pair for component ``c`` of layer ``s``.
    """

    n_points: int = 50
    n_layers: int = 3
    n_components: int = 5
    dim: int = 2
    knn: int = 20
    seed: int = 0
    mean_range: float = 10.0
    cov_scale: float = 1.0
    components: Optional[Sequence] = None

    def __post_init__(self):
        if self.n_points < 1 or self.n_layers < 1 or self.n_components < 1:
            raise ConfigError("n_points, n_layers and n_components must be positive")
        if self.n_components > self.n_points:
            raise ConfigError(f"n_components={self.n_components} exceeds n_points={self.n_points}")
        if not 1 <= self.knn < self.n_points:
            raise ConfigError(f"knn must satisfy 1 <= knn < N, got knn={self.knn}, N={self.n_points}")
        if self.components is not None:
            if len(self.components) != self.n_layers:
                raise ConfigError("components must list one entry per layer")
            for layer in self.components:
                if len(layer) != self.n_components:
                    raise ConfigError("each layer needs exactly n_components (mean, cov) pairs")
                for mean, cov in layer:
                    cov = np.asarray(cov, dtype=float)
                    if np.asarray(mean).shape != (self.dim,) or cov.shape != (self.dim, self.dim):
                        raise ConfigError("component mean/cov have the wrong shape")
                    if not np.allclose(cov, cov.T) or np.linalg.eigvalsh(cov)[0] <= 0:
                        raise ConfigError("component covariances must be symmetric positive definite")


@dataclass(eq=False)
class Dataset:
    graph: MultilayerGraph
    truth: Optional[np.ndarray] = None
    points: list = field(default_factory=list)


def balanced_labels(n: int, k: int) -> np.ndarray:
    """Contiguous blocks of (nearly) equal size: the first ``n % k`` blocks get one extra."""
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    return np.repeat(np.arange(k), sizes)


def knn_graph(points, k: int) -> LayerGraph:
    """Union-symmetrized K-NN graph with weights ``1 / distance``.

    Distance ties are broken towards the lower vertex index. Coincident
    points get weight ``MAX_WEIGHT`` and trigger a warning.
    """
    x = np.asarray(points, dtype=float)
    n = x.shape[0]
    if not 1 <= k < n:
        raise ConfigError(f"k must satisfy 1 <= k < N, got k={k}, N={n}")
    diff = x[:, None, :] - x[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    ranked = dist.copy()
    np.fill_diagonal(ranked, np.inf)
    nbrs = np.argsort(ranked, axis=1, kind="stable")[:, :k]
    mask = np.zeros((n, n), dtype=bool)
    mask[np.repeat(np.arange(n), k), nbrs.ravel()] = True
    mask |= mask.T
    close = mask & (dist < 1e-12)
    if np.any(close):
        warnings.warn(f"{int(close.sum()) // 2} coincident point pairs; weights capped at {MAX_WEIGHT:g}",
                      RuntimeWarning, stacklevel=2)
    w = np.zeros((n, n))
    with np.errstate(divide="ignore"):
        w[mask] = np.minimum(1.0 / dist[mask], MAX_WEIGHT)
    return LayerGraph(w)


def _random_components(rng: np.random.Generator, cfg: SyntheticConfig):
    means = rng.uniform(-cfg.mean_range, cfg.mean_range, size=(cfg.n_components, cfg.dim))
    a = rng.standard_normal((cfg.n_components, cfg.dim, cfg.dim))
    covs = cfg.cov_scale * (np.einsum("cji,cjk->cik", a, a) + 0.5 * np.eye(cfg.dim))
    return list(zip(means, covs))


def generate_synthetic(cfg: SyntheticConfig = SyntheticConfig()) -> Dataset:
    """Draw one point cloud per layer with shared component labels, then K-NN each."""
    rng = np.random.default_rng(cfg.seed)
    truth = balanced_labels(cfg.n_points, cfg.n_components)
    layers, clouds = [], []
    for s in range(cfg.n_layers):
        comps = _random_components(rng, cfg) if cfg.components is None else cfg.components[s]
        pts = np.empty((cfg.n_points, cfg.dim))
        for c, (mean, cov) in enumerate(comps):
            idx = np.flatnonzero(truth == c)
            pts[idx] = rng.multivariate_normal(np.asarray(mean, float), np.asarray(cov, float), size=idx.size)
        clouds.append(pts)
        layers.append(knn_graph(pts, cfg.knn))
    return Dataset(MultilayerGraph(tuple(layers)), truth, clouds)


def _layer_name(s: int) -> str:
    return f"layer_{s:02d}.edges"


def save_multilayer(g: MultilayerGraph, truth, dir_path) -> Path:
    d = Path(dir_path)
    try:
        d.mkdir(parents=True, exist_ok=True)
        for old in d.glob("layer_*.edges"):
            old.unlink()
        (d / META_FILE).write_text(
            json.dumps({"n_vertices": g.n_vertices, "n_layers": g.n_layers}, indent=2) + "\n")
        for s, layer in enumerate(g):
            lines = [f"# layer {s}: n_vertices={layer.n_vertices} n_edges={layer.n_edges}", "# i j w"]
            lines += [f"{i} {j} {_fmt(w)}" for i, j, w in layer.edges()]
            (d / _layer_name(s)).write_text("\n".join(lines) + "\n")
        if truth is not None:
            save_labels(truth, d / LABELS_FILE)
        elif (d / LABELS_FILE).exists():
            (d / LABELS_FILE).unlink()
    except OSError as exc:
        raise OSError(f"cannot write multilayer graph to {d}: {exc}") from exc
    return d


def _parse_edges(path: Path, n: int) -> LayerGraph:
    w = np.zeros((n, n))
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'i j w', got {raw!r}", path, lineno)
        try:
            i, j, weight = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError(f"cannot parse {raw!r}", path, lineno) from None
        if not (0 <= i < n and 0 <= j < n):
            raise ParseError(f"vertex id out of range [0, {n}) in {raw!r}", path, lineno)
        if i == j:
            raise ParseError(f"self-loop at vertex {i}", path, lineno)
        if not np.isfinite(weight) or weight < 0:
            raise ParseError(f"edge weight must be finite and nonnegative, got {parts[2]}", path, lineno)
        # duplicates and both orientations merge by max
        w[i, j] = w[j, i] = max(w[i, j], weight)
    return LayerGraph(w)


def load_multilayer(dir_path):
    """Load ``(MultilayerGraph, labels or None)`` from a directory."""
    d = Path(dir_path)
    meta_path = d / META_FILE
    if not meta_path.is_file():
        raise ParseError("missing meta file", meta_path)
    try:
        meta = json.loads(meta_path.read_text())
        n, n_layers = int(meta["n_vertices"]), int(meta["n_layers"])
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"invalid meta file: {exc}", meta_path) from None
    files = sorted(d.glob("layer_*.edges"))
    if len(files) != n_layers:
        raise ParseError(f"meta declares {n_layers} layers, found {len(files)} .edges files", meta_path)
    graph = MultilayerGraph(tuple(_parse_edges(f, n) for f in files))
    labels_path = d / LABELS_FILE
    truth = load_labels(labels_path) if labels_path.is_file() else None
    if truth is not None and truth.size != n:
        raise ParseError(f"{truth.size} labels for {n} vertices", labels_path)
    return graph, truth


def save_labels(labels, path) -> Path:
    path = Path(path)
    labels = np.asarray(labels)
    path.write_text("".join(f"{int(v)}\n" for v in labels))
    return path


def load_labels(path) -> np.ndarray:
    path = Path(path)
    out = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(int(line))
        except ValueError:
            raise ParseError(f"expected an integer label, got {raw!r}", path, lineno) from None
    return np.array(out, dtype=int)


def save_embedding(z, path) -> Path:
    path = Path(path)
    z = np.asarray(z, dtype=float)
    lines = [f"{z.shape[0]} {z.shape[1]}"]
    lines += [" ".join(_fmt(v) for v in row) for row in z]
    path.write_text("\n".join(lines) + "\n")
    return path


def load_embedding(path) -> np.ndarray:
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty embedding file", path)
    try:
        n, k = (int(t) for t in lines[0].split())
    except ValueError:
        raise ParseError(f"bad header {lines[0]!r}, expected 'N K'", path, 1) from None
    if len(lines) - 1 != n:
        raise ParseError(f"header declares {n} rows, found {len(lines) - 1}", path)
    z = np.empty((n, k))
    for r, raw in enumerate(lines[1:]):
        try:
            row = [float(t) for t in raw.split()]
        except ValueError:
            raise ParseError(f"cannot parse row {raw!r}", path, r + 2) from None
        if len(row) != k:
            raise DimensionError(f"{path}:{r + 2}: expected {k} values, got {len(row)}")
        z[r] = row
    return z


def save_scores(scores, path) -> Path:
    path = Path(path)
    data = scores if isinstance(scores, dict) else scores.as_dict()
    path.write_text(json.dumps({k: float(data[k]) for k in ("accuracy", "purity", "nmi", "ari")},
                               indent=2) + "\n")
    return path


def load_scores(path) -> dict:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
        return {k: float(data[k]) for k in ("accuracy", "purity", "nmi", "ari")}
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"invalid scores file: {exc}", path) from None
