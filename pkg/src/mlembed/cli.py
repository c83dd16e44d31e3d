"""Command-line front end.

Exit codes: 0 success, 1 numerical/convergence failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import data, plotting
from .baselines import BaselineMethod, baseline_cluster
from .clustering import KMeansConfig
from .exceptions import (ConfigError, DimensionError, DomainError, NumericalError, ParseError, RankError,
                         SingularLaplacianError)
from .graph import LayerGraph, MultilayerGraph, validate_laplacian
from .metrics import score
from .objective import ObjectiveConfig, induced_laplacian, induced_similarity_matrix
from .optimizer import OptimizerConfig
from .pipeline import compare_trial, gradient_check, run_proposed, summarize

log = logging.getLogger("mlembed")

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2
GRADCHECK_TOL = 1e-4


@dataclass
class RunConfig:
    """Every tunable of every command. Loaded from a JSON object with the same keys."""

    # objective
    k: int = 5
    gamma1: float = 0.1
    gamma2: float = 100.0
    eig_floor: float = 1e-8
    # optimizer
    iters: int = 500
    step: float = 0.1
    backtrack_factor: float = 0.5
    armijo_c: float = 1e-4
    tol_rel_obj: float = 1e-7
    seed: int = 0
    # k-means
    n_restarts: int = 20
    kmeans_iters: int = 300
    kmeans_tol: float = 1e-9
    # synthetic data
    n_points: int = 50
    layers: int = 3
    knn: int = 20
    mean_range: float = 10.0
    cov_scale: float = 1.0
    # per layer, K pairs [mean, cov]; pins the mixture instead of drawing it
    components: Optional[list] = None
    # harness
    trials: int = 10
    instances: int = 20
    fd_step: float = 1e-5
    gc_n: Optional[int] = None
    gc_layers: Optional[int] = None
    plots: bool = True
    # paths
    input: Optional[str] = None
    out: Optional[str] = None

    def objective(self) -> ObjectiveConfig:
        return ObjectiveConfig(self.k, self.gamma1, self.gamma2, self.eig_floor)

    def optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(self.iters, self.step, self.backtrack_factor, self.armijo_c,
                               self.tol_rel_obj, self.seed)

    def kmeans(self) -> KMeansConfig:
        return KMeansConfig(self.k, self.n_restarts, self.kmeans_iters, self.kmeans_tol, self.seed)

    def synthetic(self) -> data.SyntheticConfig:
        return data.SyntheticConfig(self.n_points, self.layers, self.k, 2, self.knn, self.seed,
                                    self.mean_range, self.cov_scale, self.components)


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def load_config(path) -> dict:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    unknown = sorted(set(raw) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {', '.join(unknown)}")
    return raw


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then explicit command-line flags."""
    values = load_config(args.config) if args.config else {}
    for name in _FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _out_dir(cfg: RunConfig, default: str) -> Path:
    d = Path(cfg.out or default)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _input_dir(cfg: RunConfig) -> Path:
    if not cfg.input:
        raise ConfigError("this command needs --input <dir>")
    d = Path(cfg.input)
    if not d.is_dir():
        raise ConfigError(f"input directory {d} does not exist")
    return d


def write_trace(trace, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "objective", "grad_norm", "step", "constraint_violation"])
        for r in trace.records:
            w.writerow([r.iteration, repr(r.objective), repr(r.grad_norm), repr(r.step),
                        repr(r.constraint_violation)])
    return path


def _print_scores(s):
    for k, v in s.as_dict().items():
        print(f"{k:>9s}  {v:.4f}")


def cmd_generate(cfg: RunConfig) -> int:
    ds = data.generate_synthetic(cfg.synthetic())
    out = _out_dir(cfg, "synthetic")
    data.save_multilayer(ds.graph, ds.truth, out)
    for s, pts in enumerate(ds.points):
        np.savetxt(out / f"points_{s:02d}.csv", pts, delimiter=",", fmt="%.17g", header="x,y", comments="")
    if cfg.plots:
        plotting.plot_layers(ds.points, ds.graph, ds.truth, out / "layers.png")
    print(f"wrote {ds.graph.n_layers} layers, N={ds.graph.n_vertices} to {out}")
    return EXIT_OK


def cmd_cluster(cfg: RunConfig) -> int:
    graph, truth = data.load_multilayer(_input_dir(cfg))
    out = _out_dir(cfg, "cluster_out")
    res = run_proposed(graph, cfg.objective(), cfg.optimizer(), cfg.kmeans())
    data.save_embedding(res.embedding, out / "embedding.txt")
    data.save_labels(res.labels, out / "labels.txt")
    write_trace(res.trace, out / "trace.csv")
    if cfg.plots:
        plotting.plot_trace(res.trace, out / "trace.png")
    last = res.trace.records[-1]
    print(f"iterations {len(res.trace) - 1}  objective {res.trace.objectives[0]:.6g} -> {last.objective:.6g}"
          f"  max constraint violation {res.trace.violations.max():.2e}")
    if truth is not None:
        data.save_labels(truth, out / "truth.txt")
        s = score(res.labels, truth)
        data.save_scores(s, out / "scores.json")
        _print_scores(s)
    if res.trace.step_failure:
        print("line search failed; outputs hold the best iterate", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_baseline(cfg: RunConfig) -> int:
    graph, truth = data.load_multilayer(_input_dir(cfg))
    out = _out_dir(cfg, "baseline_out")
    labels = baseline_cluster(graph, cfg.k, BaselineMethod.ARITHMETIC_MEAN, cfg.kmeans())
    data.save_labels(labels, out / "labels.txt")
    if truth is not None:
        s = score(labels, truth)
        data.save_scores(s, out / "scores.json")
        _print_scores(s)
    return EXIT_OK


def cmd_eval(cfg: RunConfig, pred_path: str, truth_path: str) -> int:
    for p in (pred_path, truth_path):
        if not Path(p).is_file():
            raise ConfigError(f"label file {p} does not exist")
    s = score(data.load_labels(pred_path), data.load_labels(truth_path))
    _print_scores(s)
    if cfg.out:
        out = Path(cfg.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        data.save_scores(s, out)
    return EXIT_OK


def cmd_gradcheck(cfg: RunConfig) -> int:
    sizes = (cfg.gc_n,) if cfg.gc_n else (6, 8, 10)
    ks = (cfg.k,) if cfg.gc_n else (2, 3)
    layer_counts = (cfg.gc_layers,) if cfg.gc_layers else (1, 2)
    cases = gradient_check(cfg.instances, cfg.gamma1, cfg.gamma2, cfg.seed, sizes, ks, layer_counts, cfg.fd_step)
    worst = max(cases, key=lambda c: c.rel_error)
    print(f"{len(cases)} instances, worst relative error {worst.rel_error:.3e} "
          f"(instance {worst.seed}: N={worst.n} K={worst.k} S={worst.n_layers})")
    if cfg.out:
        out = _out_dir(cfg, ".")
        with (out / "gradcheck.csv").open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["instance", "n", "k", "layers", "rel_error"])
            for c in cases:
                w.writerow([c.seed, c.n, c.k, c.n_layers, repr(c.rel_error)])
    ok = worst.rel_error <= GRADCHECK_TOL
    print("PASS" if ok else f"FAIL (tolerance {GRADCHECK_TOL:g})")
    return EXIT_OK if ok else EXIT_NUMERIC


def format_table(summary: dict, n_trials: int) -> str:
    metrics = plotting.METRICS
    rows = []
    for method, vals in summary.items():
        cells = []
        for m in metrics:
            v = vals[m]
            cells.append(f"{v['median']:.3f}" if n_trials == 1
                         else f"{v['median']:.3f} ± {v['q3'] - v['q1']:.3f}")
        rows.append([method] + cells)
    head = ["method"] + [m if n_trials == 1 else f"{m} (median ± IQR)" for m in metrics]
    widths = [max(len(r[c]) for r in rows + [head]) for c in range(len(head))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(lines) + "\n"


def cmd_compare(cfg: RunConfig) -> int:
    out = _out_dir(cfg, "compare_out")
    seeds = [cfg.seed + r for r in range(cfg.trials)]
    trials = []
    for s in seeds:
        t = compare_trial(s, cfg.synthetic(), cfg.objective(), cfg.optimizer(), cfg.kmeans())
        log.info("trial seed=%d proposed acc=%.3f baseline acc=%.3f", s, t.proposed.accuracy, t.baseline.accuracy)
        trials.append(t)
    summary = summarize(trials)
    with (out / "compare_trials.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["seed", "method", *plotting.METRICS, "step_failure"])
        for t in trials:
            for name, s in (("proposed", t.proposed), ("arithmetic_mean", t.baseline)):
                w.writerow([t.seed, name, *(repr(getattr(s, m)) for m in plotting.METRICS),
                            int(t.step_failure) if name == "proposed" else 0])
    table = format_table(summary, len(trials))
    (out / "compare.txt").write_text(table)
    doc = {"trials": len(trials), "seeds": seeds, "summary": summary}
    if len(trials) == 1:
        doc["summary"] = {m: {k: v["median"] for k, v in vals.items()} for m, vals in summary.items()}
    (out / "compare.json").write_text(json.dumps(doc, indent=2) + "\n")
    if cfg.plots:
        plotting.plot_comparison(summary, out / "compare.png")
    print(table, end="")
    return EXIT_OK


def cmd_export(cfg: RunConfig) -> int:
    """Write the embedding-induced graph of a ``cluster`` output directory."""
    src = _input_dir(cfg)
    z = data.load_embedding(src / "embedding.txt")
    labels = data.load_labels(src / "labels.txt") if (src / "labels.txt").is_file() else np.zeros(len(z), int)
    out = _out_dir(cfg, str(src / "export"))
    weights = induced_similarity_matrix(z)
    lap = induced_laplacian(z)
    if not validate_laplacian(lap):
        raise NumericalError("induced Laplacian failed validation")
    # single-layer graph directory: reloads through load_multilayer
    w = weights.copy()
    np.fill_diagonal(w, 0.0)
    rep = MultilayerGraph((LayerGraph(w),))
    data.save_multilayer(rep, labels, out / "representative")
    write_graphml(w, labels, out / "representative.graphml")
    if cfg.plots:
        truth = data.load_labels(src / "truth.txt") if (src / "truth.txt").is_file() else None
        plotting.plot_representative_graph(z, w, labels, out / "representative.png", truth)
    print(f"exported induced graph on {len(z)} nodes to {out}")
    return EXIT_OK


def write_graphml(weights, labels, path) -> Path:
    """GraphML with a ``cluster`` and ``color`` attribute per node and ``weight`` per edge."""
    import networkx as nx
    from matplotlib import colormaps
    from matplotlib.colors import to_hex

    cmap = colormaps["tab10"]
    g = nx.Graph()
    for i, c in enumerate(np.asarray(labels).tolist()):
        g.add_node(i, cluster=int(c), color=to_hex(cmap(int(c) % 10)))
    iu, ju = np.triu_indices(len(labels), 1)
    for i, j in zip(iu.tolist(), ju.tolist()):
        if weights[i, j] > 0:
            g.add_edge(i, j, weight=float(weights[i, j]))
    nx.write_graphml(g, str(path))
    return Path(path)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields")
    common.add_argument("--seed", type=int)
    common.add_argument("--gamma1", type=float)
    common.add_argument("--gamma2", type=float)
    common.add_argument("--k", type=int, help="number of clusters")
    common.add_argument("--iters", type=int, help="optimizer iteration cap")
    common.add_argument("--step", type=float, help="initial line-search step")
    common.add_argument("--out", help="output directory (file for eval)")
    common.add_argument("--trials", type=int, help="seeds for compare")
    common.add_argument("--input", help="input directory")
    common.add_argument("--n-points", dest="n_points", type=int)
    common.add_argument("--layers", type=int)
    common.add_argument("--knn", type=int)
    common.add_argument("--instances", type=int, help="gradcheck instance count")
    common.add_argument("--gc-n", dest="gc_n", type=int, help="fix gradcheck N (K then comes from --k)")
    common.add_argument("--gc-layers", dest="gc_layers", type=int, help="fix gradcheck layer count")
    common.add_argument("--no-plots", dest="plots", action="store_const", const=False)
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="mlembed", description="Multilayer graph clustering via optimized node embeddings")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("generate", parents=[common], help="write a synthetic multilayer dataset")
    sub.add_parser("cluster", parents=[common], help="optimize the embedding and cluster it")
    sub.add_parser("baseline", parents=[common], help="arithmetic-mean Laplacian + spectral clustering")
    ev = sub.add_parser("eval", parents=[common], help="score predicted labels against truth")
    ev.add_argument("pred")
    ev.add_argument("truth")
    sub.add_parser("gradcheck", parents=[common], help="analytic vs finite-difference gradient")
    sub.add_parser("compare", parents=[common], help="proposed vs baseline over several seeds")
    sub.add_parser("export", parents=[common], help="export the embedding-induced graph")
    return p


COMMANDS = {"generate": cmd_generate, "cluster": cmd_cluster, "baseline": cmd_baseline,
            "gradcheck": cmd_gradcheck, "compare": cmd_compare, "export": cmd_export}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        if args.command == "eval":
            return cmd_eval(cfg, args.pred, args.truth)
        return COMMANDS[args.command](cfg)
    except (ConfigError, ParseError, DimensionError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, SingularLaplacianError, RankError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
