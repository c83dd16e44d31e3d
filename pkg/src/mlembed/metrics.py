"""Partition agreement scores: accuracy, purity, NMI and adjusted Rand index."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import DimensionError


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """``counts[a, b]`` = number of items with predicted label a and true label b."""

    counts: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def pred_sizes(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def true_sizes(self) -> np.ndarray:
        return self.counts.sum(axis=0)


@dataclass(frozen=True)
class Scores:
    accuracy: float
    purity: float
    nmi: float
    ari: float

    def as_dict(self) -> dict:
        return asdict(self)


def contingency(pred, truth) -> ContingencyTable:
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.size != truth.size:
        raise DimensionError(f"label vectors differ in length: {pred.size} vs {truth.size}")
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    counts = np.zeros((p.max(initial=-1) + 1, t.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(counts, (p, t), 1)
    return ContingencyTable(counts)


def _as_table(t) -> ContingencyTable:
    return t if isinstance(t, ContingencyTable) else ContingencyTable(np.asarray(t, dtype=np.int64))


def accuracy(t) -> float:
    """Fraction matched under the best one-to-one cluster/class assignment."""
    c = _as_table(t).counts
    if c.sum() == 0:
        return 1.0
    size = max(c.shape)
    square = np.zeros((size, size), dtype=np.int64)
    square[: c.shape[0], : c.shape[1]] = c
    rows, cols = linear_sum_assignment(-square)
    return float(square[rows, cols].sum() / c.sum())


def purity(t) -> float:
    c = _as_table(t).counts
    if c.sum() == 0:
        return 1.0
    return float(c.max(axis=1).sum() / c.sum())


def _entropy(sizes: np.ndarray, n: int) -> float:
    p = sizes[sizes > 0] / n
    return -math.fsum(p * np.log(p))


def nmi(t) -> float:
    """Mutual information over the geometric mean of the two entropies (natural log)."""
    tab = _as_table(t)
    c, n = tab.counts, tab.n
    h_pred, h_true = _entropy(tab.pred_sizes, n), _entropy(tab.true_sizes, n)
    if h_pred == 0 and h_true == 0:
        return 1.0
    if h_pred == 0 or h_true == 0:
        return 0.0
    a, b = np.nonzero(c)
    nab = c[a, b].astype(float)
    # fsum is order independent, so swapping the two labelings gives the same bits
    mi = math.fsum(nab / n * np.log(n * nab / (tab.pred_sizes[a] * tab.true_sizes[b])))
    return float(min(max(mi / math.sqrt(h_pred * h_true), 0.0), 1.0))


def _comb2(x):
    x = np.asarray(x, dtype=float)
    return x * (x - 1) / 2.0


def adjusted_rand_index(t) -> float:
    tab = _as_table(t)
    total_pairs = float(_comb2(tab.n))
    if total_pairs == 0:
        return 1.0
    index = float(_comb2(tab.counts).sum())
    sa, sb = float(_comb2(tab.pred_sizes).sum()), float(_comb2(tab.true_sizes).sum())
    expected = sa * sb / total_pairs
    max_index = 0.5 * (sa + sb)
    denom = max_index - expected
    if denom == 0:
        return 1.0 if index - expected == 0 else 0.0
    return float((index - expected) / denom)


def score(pred, truth) -> Scores:
    t = contingency(pred, truth)
    return Scores(accuracy(t), purity(t), nmi(t), adjusted_rand_index(t))
