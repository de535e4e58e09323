"""Evolution experiments, the protein ego-network pipeline and the compound pipeline."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import pearsonr, spearmanr

from .classify import classify_logistic, classify_nb, majority_baseline_f1
from .datasets import CompoundGraph, protein_sanity, read_compounds
from .errors import DegenerateJoint, NetGaussError, TooFewEligibleNodes
from .graph import Graph, all_pairs_distances, closeness, largest_component, read_graph, subgraph, validate
from .random_models import EvolutionSpec, ModelSpec, evolve_step, generate
from .relations import CLOSED_FORM_METRICS, MetricConfig, RelationReport, relation_report
from .serialize import Missing, finite, is_number, write_csv, write_json

TRACE_COLUMNS = [
    "iteration", "status", "n_b", "n_aligned", "entropy_a", "entropy_b",
    "kl_ab", "kl_ba", "kl_mean", "mi",
    "fisher_ab", "fisher_ba", "fisher_mean", "fisher_draws",
    "granger_ab", "granger_ba", "granger_mean", "te_ab", "te_ba", "te_mean",
    "gamma", "gamma_a", "gamma_b", "coupling_strength",
    "tg_ab", "tt_ab", "tg_ba", "tt_ba",
]
_METRIC_FIELDS = ["entropy_a", "entropy_b", "kl_ab", "kl_ba", "kl_mean", "mi", "fisher_ab",
                  "fisher_ba", "fisher_mean", "granger_ab", "granger_ba", "granger_mean",
                  "te_ab", "te_ba", "te_mean", "gamma", "gamma_a", "gamma_b", "coupling_strength"]
# non-directional value of each metric for pairwise matrices
PAIR_VALUE = {"kl": "kl_mean", "mi": "mi", "fisher": "fisher_mean",
              "granger": "granger_mean", "te": "te_mean"}
PROPORTIONS = tuple(round(0.1 * i, 1) for i in range(1, 10))
COST_FLOOR = 1e-12


def derive_seed(*parts: int) -> int:
    """Stable 63-bit seed from (master seed, task indices...)."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(2, np.uint64)[0] >> 1)


# -- evolution ---------------------------------------------------------------

@dataclass
class ExperimentTrace:
    model: ModelSpec
    evolution: EvolutionSpec
    seed: int
    records: list = field(default_factory=list)

    def column(self, name: str) -> list:
        return [r[name] for r in self.records]

    def to_csv(self, path) -> None:
        write_csv(path, TRACE_COLUMNS, self.records)

    def correlations(self) -> dict:
        """Pearson R / p between T_g and T_t, and Spearman trends vs iteration."""
        out = {}
        for d in ("ab", "ba"):
            tg, tt = [], []
            for r in self.records:
                if len(r[f"tg_{d}"]) == len(r[f"tt_{d}"]):
                    tg += list(r[f"tg_{d}"])
                    tt += list(r[f"tt_{d}"])
            out[f"partition_r_{d}"], out[f"partition_p_{d}"] = _pearson(tg, tt)
            g, t = _paired(self.column(f"granger_{d}"), self.column(f"te_{d}"))
            out[f"series_r_{d}"], out[f"series_p_{d}"] = _pearson(g, t)
        it = self.column("iteration")
        for name in ("mi", "kl_mean", "fisher_mean", "granger_mean", "te_mean"):
            x, y = _paired(it, self.column(name))
            out[f"spearman_{name}"], out[f"spearman_{name}_p"] = _spearman(x, y)
        return out

    def summary(self) -> dict:
        return {"model": _spec_dict(self.model), "evolution": _spec_dict(self.evolution),
                "seed": self.seed, "iterations": len(self.records),
                "failed": sum(r["status"] != "ok" for r in self.records),
                "correlations": self.correlations()}


def _spec_dict(spec) -> dict:
    out = {}
    for k, v in vars(spec).items():
        out[k] = _spec_dict(v) if hasattr(v, "__dataclass_fields__") else getattr(v, "value", v)
    return out


def _paired(x, y):
    keep = [(a, b) for a, b in zip(x, y) if finite(a) and finite(b)]
    return [a for a, _ in keep], [b for _, b in keep]


def _pearson(x, y):
    x, y = _paired(x, y)
    if len(x) < 3 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return math.nan, math.nan
    r = pearsonr(x, y)
    return float(r.statistic), float(r.pvalue)


def _spearman(x, y):
    if len(x) < 3 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return math.nan, math.nan
    r = spearmanr(x, y)
    return float(r.statistic), float(r.pvalue)


def _record(iteration: int, n_b: int, rep: RelationReport) -> dict:
    rec = {name: getattr(rep, name) for name in _METRIC_FIELDS if hasattr(rep, name)}
    rec.update(iteration=iteration, status="ok", n_b=n_b, n_aligned=rep.n,
               gamma=min(rep.gamma_a, rep.gamma_b), fisher_draws=rep.fisher_draws_ab,
               tg_ab=rep.tg_ab, tt_ab=rep.tt_ab, tg_ba=rep.tg_ba, tt_ba=rep.tt_ba)
    return rec


def _failed_record(iteration: int, n_b: int, exc: Exception) -> dict:
    miss = Missing(type(exc).__name__)
    rec = {name: miss for name in _METRIC_FIELDS}
    rec.update(iteration=iteration, status=f"error:{type(exc).__name__}", n_b=n_b,
               n_aligned=miss, fisher_draws=(), tg_ab=(), tt_ab=(), tg_ba=(), tt_ba=())
    return rec


def run_evolution(model: ModelSpec, evolution: EvolutionSpec, config: MetricConfig | None = None,
                  seed: int = 0, progress=None) -> ExperimentTrace:
    """Evolve a random graph and compare every iterate against the initial graph.

    Record i (i >= 1) relates the initial graph a to the graph after i
    steps; failed iterations are kept with an error status and the chain
    carries on.
    """
    cfg = config or MetricConfig()
    if evolution.n0 is None:
        evolution = EvolutionSpec(evolution.process, evolution.iterations, evolution.origin,
                                  evolution.rule, model.n0)
    g0 = largest_component(generate(model, np.random.default_rng([seed, 0])))
    evo_rng = np.random.default_rng([seed, 1])
    trace = ExperimentTrace(model, evolution, seed)
    g = g0
    for it in range(1, evolution.iterations + 1):
        g = evolve_step(g, evolution, evo_rng)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DegenerateJoint)
                rep = relation_report(g0, largest_component(g), cfg, derive_seed(seed, 2, it))
            trace.records.append(_record(it, g.n, rep))
        except NetGaussError as exc:
            trace.records.append(_failed_record(it, g.n, exc))
        if progress is not None:
            progress(it, trace.records[-1])
    return trace


# -- pairwise matrices -------------------------------------------------------

@dataclass
class FeatureMatrix:
    metric: str
    item_ids: list
    values: list  # row-major list of lists; floats, inf or Missing

    def numeric(self) -> np.ndarray:
        return np.array([[float(v) if is_number(v) else math.nan for v in row]
                         for row in self.values])

    def to_json(self) -> dict:
        return {"metric": self.metric, "index": list(self.item_ids), "rows": self.values}


def pairwise_reports(graphs: list, config: MetricConfig, seed: int, diagonal: bool = False,
                     progress=None) -> dict:
    """relation_report for every unordered pair (and optionally each graph with itself)."""
    out = {}
    pairs = [(i, j) for i in range(len(graphs)) for j in range(i if diagonal else i + 1, len(graphs))]
    for count, (i, j) in enumerate(pairs):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DegenerateJoint)
                out[i, j] = relation_report(graphs[i], graphs[j], config, derive_seed(seed, i, j))
        except NetGaussError as exc:
            out[i, j] = Missing(type(exc).__name__)
        if progress is not None:
            progress(count + 1, len(pairs))
    return out


def feature_matrices(reports: dict, size: int, ids, metrics) -> dict:
    out = {}
    for m in metrics:
        rows = [[Missing("self", "null") for _ in range(size)] for _ in range(size)]
        for (i, j), rep in reports.items():
            v = rep if isinstance(rep, Missing) else getattr(rep, PAIR_VALUE[m])
            rows[i][j] = rows[j][i] = v
        out[m] = FeatureMatrix(m, list(ids), rows)
    return out


def sanitize_features(X: np.ndarray) -> np.ndarray:
    """Finite copy: +inf -> column max finite, -inf -> column min, nan -> column median."""
    X = np.array(X, dtype=float)
    for c in range(X.shape[1]):
        col = X[:, c]
        ok = np.isfinite(col)
        if not ok.any():
            X[:, c] = 0.0
            continue
        col[np.isposinf(col)] = col[ok].max()
        col[np.isneginf(col)] = col[ok].min()
        col[np.isnan(col)] = np.median(col[ok])
    return X


# -- protein ego-networks ----------------------------------------------------

@dataclass
class ProteinResult:
    eligible: list
    features: dict
    class_tables: dict
    distance_curves: dict
    closeness: dict
    sanity: dict

    def to_json(self) -> dict:
        return {"eligible": self.eligible, "class_tables": self.class_tables,
                "distance_curves": self.distance_curves, "closeness": self.closeness,
                "sanity": self.sanity}


def ego_network(graph: Graph, node: int) -> Graph:
    """The node, its neighbours and every edge among them (node first)."""
    return subgraph(graph, [node] + [int(v) for v in graph.neighbors(node)])


def eligible_nodes(graph: Graph, min_neighbors: int = 5) -> list:
    counts = np.count_nonzero(graph.weights > 0, axis=1)
    return [int(v) for v in np.flatnonzero(counts > min_neighbors)]


def _class_table(values, labels) -> dict:
    classes = sorted(set(labels))
    pos = {c: k for k, c in enumerate(classes)}
    sums = np.zeros((len(classes), len(classes)))
    counts = np.zeros_like(sums)
    within, cross, excluded = [], [], 0
    n = len(labels)
    for i in range(n):
        for j in range(i + 1, n):
            v = values[i][j]
            if not finite(v):
                excluded += 1
                continue
            a, b = pos[labels[i]], pos[labels[j]]
            sums[a, b] += v
            counts[a, b] += 1
            if a != b:
                sums[b, a] += v
                counts[b, a] += 1
            (within if a == b else cross).append(v)
    with np.errstate(invalid="ignore"):
        table = np.where(counts > 0, sums / np.maximum(counts, 1), math.nan)
    return {"classes": classes, "table": table.tolist(),
            "within_mean": float(np.mean(within)) if within else math.nan,
            "cross_mean": float(np.mean(cross)) if cross else math.nan,
            "excluded": {"count": excluded, "reason": "non-finite or degenerate value"}}


def _distance_curve(values, dist) -> list:
    groups: dict = {}
    n = len(values)
    for i in range(n):
        for j in range(i + 1, n):
            if finite(values[i][j]) and math.isfinite(dist[i, j]):
                groups.setdefault(int(dist[i, j]), []).append(values[i][j])
    return [{"distance": d, "mean": float(np.mean(v)), "count": len(v)} for d, v in sorted(groups.items())]


def constrained_closeness(graph: Graph, eligible: list, values, metric: str) -> list:
    """Closeness on the eligible-node network with metric-derived edge costs.

    Cost is the metric itself for KL (a divergence) and 1/metric otherwise,
    floored at a tiny positive value; edges whose metric is degenerate are
    dropped. Ineligible nodes get the minimum closeness of eligible ones.
    """
    pos = {v: k for k, v in enumerate(eligible)}
    sub = subgraph(graph, eligible)
    m = len(eligible)
    W = np.zeros((m, m))
    C = np.zeros((m, m))
    for i, j, _ in sub.edges():
        v = values[i][j]
        if not is_number(v) or math.isnan(v):
            continue
        if metric == "kl":
            if not math.isfinite(v):
                continue
            cost = v
        else:
            if v <= 0:
                continue
            cost = 1.0 / v          # an infinite metric gives the floor
        W[i, j] = W[j, i] = 1.0
        C[i, j] = C[j, i] = max(cost, COST_FLOOR)
    cg = validate(W)
    scores = [closeness(cg, k, C) for k in range(m)]
    floor = min(scores) if scores else 0.0
    return [scores[pos[v]] if v in pos else floor for v in range(graph.n)]


def run_protein(source, config: MetricConfig | None = None, seed: int = 0,
                max_items: int | None = None, min_neighbors: int = 5, progress=None) -> ProteinResult:
    """Pairwise ego-network metrics over nodes with more than ``min_neighbors`` neighbours.

    ``max_items`` keeps a seeded random subset of the eligible nodes.
    """
    cfg = config or MetricConfig(metrics=CLOSED_FORM_METRICS, theta_length=3)
    graph = source if isinstance(source, Graph) else read_graph(source)
    if graph.node_labels is None:
        graph = validate(graph.weights, graph.node_ids, [0] * graph.n)
    eligible = eligible_nodes(graph, min_neighbors)
    if max_items is not None and len(eligible) > max_items:
        rng = np.random.default_rng([seed, 7])
        eligible = sorted(int(v) for v in rng.choice(eligible, size=max_items, replace=False))
    if len(eligible) < 2:
        raise TooFewEligibleNodes(f"{len(eligible)} nodes have more than {min_neighbors} neighbours")
    egos = [ego_network(graph, v) for v in eligible]
    reports = pairwise_reports(egos, cfg, seed, progress=progress)
    ids = [graph.node_ids[v] for v in eligible]
    features = feature_matrices(reports, len(egos), ids, cfg.metrics)
    labels = [graph.node_labels[v] for v in eligible]
    dist = all_pairs_distances(graph)[np.ix_(eligible, eligible)]
    tables, curves, closes = {}, {}, {}
    for m, fm in features.items():
        tables[m] = _class_table(fm.values, labels)
        curves[m] = _distance_curve(fm.values, dist)
        closes[m] = constrained_closeness(graph, eligible, fm.values, m)
    return ProteinResult(eligible, features, tables, curves, closes, protein_sanity(graph))


# -- compounds ---------------------------------------------------------------

@dataclass
class CompoundResult:
    compound_ids: list
    classes: list
    features: dict
    class_summary: dict
    classification: dict
    baseline_f1: float

    def to_json(self) -> dict:
        return {"compound_ids": self.compound_ids, "classes": self.classes,
                "class_summary": self.class_summary, "classification": self.classification,
                "baseline_f1": self.baseline_f1}


def _first_class_summary(values, classes, first: int = 1) -> dict:
    inside, rest = [], []
    n = len(classes)
    for i in range(n):
        for j in range(i + 1, n):
            v = values[i][j]
            if finite(v):
                (inside if classes[i] == classes[j] == first else rest).append(v)
    return {"first_class": first,
            "within_first_class_mean": float(np.mean(inside)) if inside else math.nan,
            "rest_mean": float(np.mean(rest)) if rest else math.nan}


def classification_report(X: np.ndarray, y, proportions=PROPORTIONS, seeds=range(10),
                          classifiers=("nb", "logistic")) -> dict:
    fns = {"nb": classify_nb, "logistic": classify_logistic}
    out = {}
    for name in classifiers:
        per = {}
        for p in proportions:
            scores = [fns[name](X, y, p, derive_seed(s, int(round(p * 100)))) for s in seeds]
            per[f"{p:.1f}"] = {"median_f1": float(np.median(scores)), "f1": scores}
        out[name] = per
    return out


def run_compounds(source, config: MetricConfig | None = None, seed: int = 0,
                  proportions=PROPORTIONS, classifier_seeds=range(10),
                  classifiers=("nb", "logistic"), progress=None) -> CompoundResult:
    """Pairwise metric matrices over all compounds, then classification on the rows."""
    cfg = config or MetricConfig(metrics=CLOSED_FORM_METRICS, theta_length=15)
    compounds: list[CompoundGraph] = source if isinstance(source, list) else read_compounds(source)
    graphs = [largest_component(c.graph) for c in compounds]
    ids = [c.compound_id for c in compounds]
    y = np.array([c.cls for c in compounds])
    reports = pairwise_reports(graphs, cfg, seed, diagonal=True, progress=progress)
    features = feature_matrices(reports, len(graphs), ids, cfg.metrics)
    summary, classification = {}, {}
    for m, fm in features.items():
        summary[m] = _first_class_summary(fm.values, y.tolist())
        X = sanitize_features(fm.numeric())
        classification[m] = classification_report(X, y, proportions, classifier_seeds, classifiers)
    return CompoundResult(ids, y.tolist(), features, summary, classification,
                          majority_baseline_f1(y))


def write_feature_matrices(features: dict, out_dir, prefix: str) -> list:
    paths = []
    for m, fm in features.items():
        path = f"{out_dir}/{prefix}_{m}_matrix.json"
        write_json(path, fm.to_json())
        paths.append(path)
    return paths
