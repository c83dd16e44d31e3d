"""Figures written next to the text/CSV reports.

Uses the object-oriented matplotlib API with the Agg canvas, so nothing here
touches pyplot's global state or needs a display.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.collections import LineCollection
from matplotlib.figure import Figure

# Software/date metadata would make repeated runs differ byte-wise
_PNG_META = {"Software": None}
METRICS = ("accuracy", "purity", "nmi", "ari")


def _new_figure(width=6.4, height=4.0):
    fig = Figure(figsize=(width, height), dpi=100)
    FigureCanvasAgg(fig)
    return fig


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, format="png", metadata=_PNG_META)
    return path


def plot_trace(trace, path) -> Path:
    """Objective and gradient norm against iteration."""
    it = np.array([r.iteration for r in trace.records])
    fig = _new_figure()
    ax = fig.add_subplot(2, 1, 1)
    ax.plot(it, trace.objectives, marker=".", lw=1)
    ax.set_ylabel("objective")
    ax.grid(alpha=0.3)
    ax2 = fig.add_subplot(2, 1, 2, sharex=ax)
    ax2.semilogy(it, [max(r.grad_norm, 1e-300) for r in trace.records], marker=".", lw=1, color="C1")
    ax2.set_ylabel("|gradient|")
    ax2.set_xlabel("iteration")
    ax2.grid(alpha=0.3)
    return _save(fig, path)


def plot_comparison(summary: dict, path) -> Path:
    """Grouped bars of median score per method and metric, IQR as error bars.

    ``summary[method][metric]`` holds ``{"median", "q1", "q3"}``.
    """
    methods = list(summary)
    fig = _new_figure()
    ax = fig.add_subplot(1, 1, 1)
    width = 0.8 / max(len(methods), 1)
    x = np.arange(len(METRICS))
    for m, method in enumerate(methods):
        med = np.array([summary[method][k]["median"] for k in METRICS])
        lo = med - np.array([summary[method][k]["q1"] for k in METRICS])
        hi = np.array([summary[method][k]["q3"] for k in METRICS]) - med
        ax.bar(x + (m - (len(methods) - 1) / 2) * width, med, width, yerr=np.vstack([lo, hi]),
               capsize=3, label=method)
    ax.set_xticks(x)
    ax.set_xticklabels(METRICS)
    ax.set_ylim(min(-0.1, ax.get_ylim()[0]), 1.05)
    ax.axhline(0, color="k", lw=0.5)
    ax.set_ylabel("median score")
    ax.legend(frameon=False)
    return _save(fig, path)


def embedding_layout(z) -> np.ndarray:
    """2-D node positions: the embedding rows projected on their top two principal axes."""
    z = np.asarray(z, dtype=float)
    centered = z - z.mean(axis=0)
    if z.shape[1] == 1:
        return np.column_stack([centered[:, 0], np.zeros(len(z))])
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    pos = centered @ vt[:2].T
    # fix the sign of each axis so reruns draw the same picture
    idx = np.argmax(np.abs(pos), axis=0)
    return pos * np.sign(pos[idx, [0, 1]])


def plot_representative_graph(z, weights, labels, path, truth=None) -> Path:
    """Draw the embedding-induced graph with nodes colored by cluster.

    Edge opacity follows the edge weight rescaled to [0, 1]. With ``truth``
    a second panel colors the same drawing by the ground-truth labels.
    """
    pos = embedding_layout(z)
    w = np.asarray(weights, dtype=float)
    iu, ju = np.triu_indices(len(pos), 1)
    ew = w[iu, ju]
    keep = ew > 0
    iu, ju, ew = iu[keep], ju[keep], ew[keep]
    span = ew.max() - ew.min() if ew.size else 0.0
    alpha = (ew - ew.min()) / span if span > 0 else np.ones_like(ew)
    panels = [("clusters", labels)] + ([("ground truth", truth)] if truth is not None else [])
    fig = _new_figure(5.0 * len(panels), 4.6)
    for p, (title, lab) in enumerate(panels, start=1):
        ax = fig.add_subplot(1, len(panels), p)
        colors = np.zeros((ew.size, 4))
        colors[:, 3] = 0.05 + 0.4 * alpha ** 2
        ax.add_collection(LineCollection(np.stack([pos[iu], pos[ju]], axis=1), colors=colors, linewidths=0.5))
        ax.scatter(pos[:, 0], pos[:, 1], c=np.asarray(lab), cmap="tab10", vmin=0, vmax=9, s=30,
                   edgecolors="k", linewidths=0.4, zorder=3)
        ax.set_title(title)
        ax.set_xticks([])
        ax.set_yticks([])
    return _save(fig, path)


def plot_layers(points, graph, truth, path) -> Path:
    """One panel per layer: its point cloud, K-NN edges, and ground-truth colors."""
    fig = _new_figure(4.0 * len(points), 4.0)
    for s, (pts, layer) in enumerate(zip(points, graph), start=1):
        ax = fig.add_subplot(1, len(points), s)
        iu, ju = np.nonzero(np.triu(layer.adjacency, 1))
        ax.add_collection(LineCollection(np.stack([pts[iu], pts[ju]], axis=1), colors="0.7", linewidths=0.3))
        ax.scatter(pts[:, 0], pts[:, 1], c=np.asarray(truth), cmap="tab10", vmin=0, vmax=9, s=20,
                   edgecolors="k", linewidths=0.3, zorder=3)
        ax.set_title(f"layer {s}")
        ax.set_aspect("equal", adjustable="datalim")
    return _save(fig, path)
