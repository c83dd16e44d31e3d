"""Gradient descent on ``{Z : Z^T Z = I/N}`` with QR retraction and Armijo backtracking."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError, DimensionError, RankError
from .graph import MultilayerGraph
from .objective import ObjectiveConfig, constraint_violation, objective_and_gradient, total_objective

log = logging.getLogger(__name__)

MAX_HALVINGS = 50


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 500
    init_step: float = 0.1
    backtrack_factor: float = 0.5
    armijo_c: float = 1e-4
    tol_rel_obj: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 0:
            raise ConfigError("max_iters must be nonnegative")
        if self.init_step <= 0 or self.armijo_c <= 0 or self.tol_rel_obj <= 0:
            raise ConfigError("init_step, armijo_c and tol_rel_obj must be positive")
        if not 0 < self.backtrack_factor < 1:
            raise ConfigError("backtrack_factor must lie in (0, 1)")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    objective: float
    grad_norm: float
    step: float
    constraint_violation: float


@dataclass
class TrainTrace:
    records: list[TraceRecord] = field(default_factory=list)
    step_failure: bool = False
    converged: bool = False

    def append(self, rec: TraceRecord):
        self.records.append(rec)

    @property
    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.records])

    @property
    def violations(self) -> np.ndarray:
        return np.array([r.constraint_violation for r in self.records])

    def __len__(self):
        return len(self.records)


def retract(m) -> np.ndarray:
    """Map a full-column-rank N x K matrix onto ``Z^T Z = I/N``.

    Uses the thin QR factor with the signs fixed so that R has a positive
    diagonal, scaled by ``1/sqrt(N)``.

    Raises:
        RankError: if ``m`` is (numerically) rank deficient.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[1] > m.shape[0]:
        raise DimensionError(f"retraction needs a tall N x K matrix, got {m.shape}")
    n, k = m.shape
    q, r = np.linalg.qr(m)
    d = np.diag(r)
    scale = max(float(np.max(np.abs(m), initial=0.0)), np.finfo(float).tiny)
    if not np.all(np.isfinite(d)) or np.min(np.abs(d)) <= 1e-12 * scale * np.sqrt(n):
        raise RankError(f"matrix is rank deficient (min |R_ii| = {np.min(np.abs(d)):.3e})")
    return q * np.sign(d) / np.sqrt(n)


def initialize_embedding(n: int, k: int, seed: int) -> np.ndarray:
    """Standard-normal N x K matrix retracted onto the constraint set."""
    # k == n is allowed: the result is then sqrt(1/N) times an orthogonal matrix
    if not 1 <= k <= n:
        raise DimensionError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    return retract(rng.standard_normal((n, k)))


def optimize(g: MultilayerGraph, obj_cfg: ObjectiveConfig, opt_cfg: OptimizerConfig = OptimizerConfig(),
             z0=None):
    """Minimize the embedding objective; returns ``(Z, TrainTrace)``.

    Each iteration steps along the negative Euclidean gradient, retracts,
    and backtracks until the sufficient-decrease test passes. The test uses
    the displacement actually taken after retraction:
    ``f(Z+) <= f(Z) + c * min(<grad, Z+ - Z>, 0)`` together with ``f(Z+) <= f(Z)``.
    """
    n = g.n_vertices
    obj_cfg.check_size(n)
    z = retract(z0) if z0 is not None else initialize_embedding(n, obj_cfg.n_clusters, opt_cfg.seed)
    f, grad = objective_and_gradient(z, g, obj_cfg)
    trace = TrainTrace()
    trace.append(TraceRecord(0, f, float(np.linalg.norm(grad)), 0.0, constraint_violation(z)))

    for it in range(1, opt_cfg.max_iters + 1):
        step = opt_cfg.init_step
        accepted = False
        for _ in range(MAX_HALVINGS):
            try:
                cand = retract(z - step * grad)
            except RankError:
                step *= opt_cfg.backtrack_factor
                continue
            f_new = total_objective(cand, g, obj_cfg)
            decrease = opt_cfg.armijo_c * min(float(np.sum(grad * (cand - z))), 0.0)
            if f_new <= f + decrease and f_new <= f:
                accepted = True
                break
            step *= opt_cfg.backtrack_factor
        if not accepted:
            trace.step_failure = True
            log.warning("line search failed at iteration %d after %d halvings", it, MAX_HALVINGS)
            break

        rel = abs(f - f_new) / max(abs(f), np.finfo(float).tiny)
        z = cand
        f, grad = objective_and_gradient(z, g, obj_cfg)
        trace.append(TraceRecord(it, f, float(np.linalg.norm(grad)), step, constraint_violation(z)))
        log.debug("iter %4d  obj %.10g  |grad| %.3e  step %.3e", it, f, trace.records[-1].grad_norm, step)
        if rel < opt_cfg.tol_rel_obj:
            trace.converged = True
            break
    return z, trace


def finite_difference_gradient(z, g: MultilayerGraph, cfg: ObjectiveConfig, h: float = 1e-5,
                               func=None) -> np.ndarray:
    """Central-difference gradient, entry by entry, ignoring the constraint.

    ``func(z)`` replaces the objective when given (used to test the scheme itself).
    """
    if not 1e-7 <= h <= 1e-3:
        raise ConfigError(f"finite-difference step must lie in [1e-7, 1e-3], got {h}")
    z = np.array(z, dtype=float)
    if func is None:
        def func(x):
            return total_objective(x, g, cfg)
    out = np.zeros_like(z)
    for idx in np.ndindex(*z.shape):
        orig = z[idx]
        z[idx] = orig + h
        fp = func(z)
        z[idx] = orig - h
        fm = func(z)
        z[idx] = orig
        out[idx] = (fp - fm) / (2.0 * h)
    return out
