"""Command-line entry point: ``netgauss <command> [options]``."""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import bundled_path, convert_tudataset, write_compounds
from .errors import EXIT_CODES, DegenerateJoint, InputError, NetGaussError
from .experiments import run_compounds, run_evolution, run_protein, write_feature_matrices
from .graph import read_graph, write_edge_list
from .metrics import SamplingConfig
from .random_models import EvolutionSpec, ModelSpec, WiringRule, generate
from .relations import ALL_METRICS, CLOSED_FORM_METRICS, MetricConfig, relation_report
from .serialize import dumps, write_csv, write_json
from .spectral import laplacian_centralities

# flag name -> (type, default); shared by the CLI and the config file
GLOBAL_OPTIONS = {
    "seed": (int, 0),
    "mode": (str, "sigma"),
    "samples": (int, 2000),
    "partitions": (int, 10),
    "partition_size": (int, None),
    "coupling": (str, "affinity"),
    "estimator": (str, "corrected"),
    "knn_k": (int, 3),
    "metrics": (str, None),
    "directions": (str, "both"),
    "theta_length": (int, None),
    "fisher_draws": (int, 3),
    "on_disconnect": (str, "repad"),
    "auto_component": (bool, False),
    "out": (str, "."),
}


def _epilog() -> str:
    codes = "\n".join(f"  {k:>2}  {v}" for k, v in sorted(EXIT_CODES.items()))
    return ("defaults: partition size k = floor(n/2), partitions h = 10, samples = 2000,\n"
            "kNN order k = 3, coupling = affinity (common and independent also available),\n"
            "estimator = corrected.\n\nexit codes:\n" + codes)


def _parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_config(path) -> dict:
    """Flat ``key = value`` file; keys mirror the long flags (dashes or underscores)."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    out = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    S = argparse.SUPPRESS
    g.add_argument("--seed", type=int, default=S, help="master seed (default 0)")
    g.add_argument("--mode", choices=["sigma", "sigma-dual"], default=S,
                   help="covariance L+J/n (sigma) or its inverse (sigma-dual)")
    g.add_argument("--samples", type=int, default=S, help="coupled samples per pair (default 2000)")
    g.add_argument("--partitions", type=int, default=S, help="random partitions h (default 10)")
    g.add_argument("--partition-size", type=int, default=S, help="circ block size k (default n//2)")
    g.add_argument("--coupling", choices=["affinity", "common", "independent"], default=S,
                   help="joint sampling of the two representations (default affinity)")
    g.add_argument("--estimator", choices=["corrected", "raw"], default=S,
                   help="entropy estimator for MI/TE (default corrected)")
    g.add_argument("--knn-k", type=int, default=S, help="neighbour order of the entropy estimator (default 3)")
    g.add_argument("--metrics", default=S, help=f"comma list from {','.join(ALL_METRICS)}")
    g.add_argument("--directions", choices=["both", "ba"], default=S,
                   help="causality directions (default both)")
    g.add_argument("--theta-length", type=int, default=S, help="Fisher parameter count")
    g.add_argument("--fisher-draws", type=int, default=S, help="Fisher theta draws per pair (default 3)")
    g.add_argument("--on-disconnect", choices=["repad", "error", "keep"], default=S,
                   help="policy when size alignment disconnects a graph (default repad)")
    g.add_argument("--auto-component", action="store_const", const=True, default=S,
                   help="replace disconnected inputs by their largest component")
    g.add_argument("--config", default=S, help="flat key=value file; flags override it")
    g.add_argument("--out", default=S, help="output directory (default .)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="netgauss", parents=[common], epilog=_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description="Gaussian representations of graphs and information-theoretic relations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, epilog=_epilog(),
                              formatter_class=argparse.RawDescriptionHelpFormatter)

    def model_args(p):
        p.add_argument("--model", choices=["ws", "er", "ba"], required=True)
        p.add_argument("--n0", type=int, default=300)
        p.add_argument("--alpha", type=int, default=15, help="WS ring neighbours")
        p.add_argument("--beta", type=float, default=0.7, help="WS rewiring probability")
        p.add_argument("--rho", type=float, default=0.15, help="ER edge probability")
        p.add_argument("--kappa", type=int, default=50, help="BA seed size")
        p.add_argument("--ba-m", type=int, default=5, help="BA edges per new node")

    p = cmd("generate", "write a random graph as an edge list")
    model_args(p)
    p.add_argument("--output", help="file name inside --out (default <model>_n<n0>_s<seed>.edges)")

    p = cmd("metrics", "relation report for two graph files (JSON)")
    p.add_argument("graph_a")
    p.add_argument("graph_b")

    p = cmd("evolve", "evolution experiment trace (CSV) and correlation summary (JSON)")
    model_args(p)
    p.add_argument("--process", choices=["delete", "rewire", "add"], required=True)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--rule", choices=["er", "ws"], help="override the foreign wiring rule")
    p.add_argument("--rule-rho", type=float, default=0.5)
    p.add_argument("--rule-alpha", type=int, default=40)
    p.add_argument("--rule-beta", type=float, default=0.1)

    p = cmd("protein", "ego-network similarity pipeline")
    p.add_argument("dataset", nargs="?", help="Pajek/edge-list file (default: bundled stand-in)")
    p.add_argument("--max-items", type=int, help="random subset of eligible nodes")
    p.add_argument("--min-neighbors", type=int, default=5)

    p = cmd("compounds", "compound metric matrices and classification")
    p.add_argument("dataset", nargs="?", help="labelled-compound file (default: bundled stand-in)")
    p.add_argument("--classifier-seeds", type=int, default=10)
    p.add_argument("--proportions", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")

    p = cmd("centrality", "Laplacian centrality of every node (CSV)")
    p.add_argument("graph")

    p = cmd("convert-tu", "convert a TUDataset directory (e.g. MUTAG) to the compound format")
    p.add_argument("directory")
    p.add_argument("--name", default="MUTAG")
    p.add_argument("--output", default="compounds.txt")
    return parser


def resolve_options(args: argparse.Namespace) -> dict:
    """Defaults < config file < explicit flags."""
    opts = {k: d for k, (_, d) in GLOBAL_OPTIONS.items()}
    if getattr(args, "config", None):
        for key, value in read_config(args.config).items():
            if key not in GLOBAL_OPTIONS:
                raise ValueError(f"unknown config key {key!r}")
            typ = GLOBAL_OPTIONS[key][0]
            opts[key] = _parse_bool(value) if typ is bool else typ(value)
    for key in GLOBAL_OPTIONS:
        if hasattr(args, key):
            opts[key] = getattr(args, key)
    return opts


def metric_config(opts: dict, default_metrics=ALL_METRICS, default_theta=10) -> MetricConfig:
    metrics = default_metrics if opts["metrics"] is None else tuple(
        m for m in opts["metrics"].split(",") if m.strip())
    sampling = SamplingConfig(samples=opts["samples"], k_neighbors=opts["knn_k"],
                              coupling=opts["coupling"], estimator=opts["estimator"],
                              partition_size=opts["partition_size"])
    return MetricConfig(mode=opts["mode"], sampling=sampling, partitions=opts["partitions"],
                        metrics=metrics, directions=opts["directions"],
                        theta_length=opts["theta_length"] or default_theta,
                        fisher_draws=opts["fisher_draws"], on_disconnect=opts["on_disconnect"],
                        auto_component=opts["auto_component"])


def _model_spec(args) -> ModelSpec:
    return ModelSpec(args.model, n0=args.n0, ws_alpha=args.alpha, ws_beta=args.beta,
                     er_rho=args.rho, ba_kappa=args.kappa, ba_m=args.ba_m)


def _run(args, opts) -> int:
    out = Path(opts["out"])
    seed = opts["seed"]
    if args.command == "generate":
        g = generate(_model_spec(args), np.random.default_rng(seed))
        path = out / (args.output or f"{args.model}_n{args.n0}_s{seed}.edges")
        out.mkdir(parents=True, exist_ok=True)
        write_edge_list(g, path)
        print(path)
    elif args.command == "metrics":
        a, b = read_graph(args.graph_a), read_graph(args.graph_b)
        cfg = metric_config(opts)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateJoint)
            rep = relation_report(a, b, cfg, seed)
        payload = rep.to_dict()
        payload.update(graph_a=args.graph_a, graph_b=args.graph_b, seed=seed)
        write_json(out / "metrics.json", payload)
        sys.stdout.write(dumps(payload))
    elif args.command == "evolve":
        model = _model_spec(args)
        rule = None
        if args.rule:
            rule = WiringRule(args.rule, rho=args.rule_rho, alpha=args.rule_alpha, beta=args.rule_beta)
        evo = EvolutionSpec(args.process, args.iters, args.model, rule, args.n0)
        trace = run_evolution(model, evo, metric_config(opts), seed)
        trace.to_csv(out / "trace.csv")
        write_json(out / "trace_summary.json", trace.summary())
        print(out / "trace.csv")
    elif args.command == "protein":
        source = args.dataset or bundled_path("protein_synthetic.net")
        cfg = metric_config(opts, CLOSED_FORM_METRICS, default_theta=3)
        res = run_protein(source, cfg, seed, args.max_items, args.min_neighbors)
        write_json(out / "protein_summary.json", res.to_json())
        write_feature_matrices(res.features, out, "protein")
        print(out / "protein_summary.json")
    elif args.command == "compounds":
        source = args.dataset or bundled_path("compounds_synthetic.txt")
        cfg = metric_config(opts, CLOSED_FORM_METRICS, default_theta=15)
        props = tuple(float(p) for p in args.proportions.split(","))
        res = run_compounds(source, cfg, seed, props, range(args.classifier_seeds))
        write_json(out / "compounds_summary.json", res.to_json())
        write_feature_matrices(res.features, out, "compounds")
        print(out / "compounds_summary.json")
    elif args.command == "centrality":
        g = read_graph(args.graph)
        c = laplacian_centralities(g)
        write_csv(out / "centrality.csv", ["node_id", "centrality"],
                  [[g.node_ids[i], float(c[i])] for i in range(g.n)])
        print(out / "centrality.csv")
    elif args.command == "convert-tu":
        compounds = convert_tudataset(args.directory, args.name)
        out.mkdir(parents=True, exist_ok=True)
        write_compounds(compounds, out / args.output, header=f"converted from {args.name}")
        print(out / args.output)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve_options(args)
        return _run(args, opts)
    except NetGaussError as exc:
        print(f"netgauss: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"netgauss: error: {exc}", file=sys.stderr)
        return 2

