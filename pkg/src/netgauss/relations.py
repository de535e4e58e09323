"""All relation metrics for one graph pair, after size alignment."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .align import align_pair
from .errors import DegenerateJoint, DegenerateResiduals
from .gaussian import RepresentationMode, coupled_sample, coupling_strength, entropy, represent
from .graph import Graph
from .metrics import (DEFAULT_PARTITIONS, FisherSetup, SamplingConfig, _causality_from_samples,
                      _joint_degenerate, _partitions, fisher_quantity, kl_divergence)
from .serialize import NOT_REQUESTED, Missing, finite

ALL_METRICS = ("kl", "mi", "fisher", "granger", "te")
CLOSED_FORM_METRICS = ("kl", "fisher")


@dataclass(frozen=True)
class MetricConfig:
    """Which metrics to compute for a pair, and how.

    directions: "both" computes Granger/TE for a->b and b->a; "ba" only the
    b->a direction (b's variable helping to predict a's blocks).
    """

    mode: RepresentationMode = RepresentationMode.SIGMA
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    partitions: int = DEFAULT_PARTITIONS
    metrics: tuple = ALL_METRICS
    directions: str = "both"
    theta_length: int = 10
    fisher_draws: int = 3
    on_disconnect: str = "repad"
    auto_component: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", RepresentationMode.parse(self.mode))
        metrics = tuple(m.strip().lower() for m in self.metrics)
        bad = set(metrics) - set(ALL_METRICS)
        if bad:
            raise ValueError(f"unknown metrics {sorted(bad)}; choose from {ALL_METRICS}")
        object.__setattr__(self, "metrics", metrics)
        if self.directions not in ("both", "ba"):
            raise ValueError("directions must be 'both' or 'ba'")
        if self.partitions < 1 or self.theta_length < 1 or self.fisher_draws < 1:
            raise ValueError("partitions, theta_length and fisher_draws must be >= 1")

    def wants(self, metric: str) -> bool:
        return metric in self.metrics


@dataclass
class RelationReport:
    n: int
    gamma_a: float
    gamma_b: float
    entropy_a: float
    entropy_b: float
    coupling_strength: float
    kl_ab: object = NOT_REQUESTED
    kl_ba: object = NOT_REQUESTED
    kl_mean: object = NOT_REQUESTED
    mi: object = NOT_REQUESTED
    fisher_ab: object = NOT_REQUESTED
    fisher_ba: object = NOT_REQUESTED
    fisher_mean: object = NOT_REQUESTED
    fisher_draws_ab: tuple = ()
    granger_ab: object = NOT_REQUESTED
    granger_ba: object = NOT_REQUESTED
    granger_mean: object = NOT_REQUESTED
    te_ab: object = NOT_REQUESTED
    te_ba: object = NOT_REQUESTED
    te_mean: object = NOT_REQUESTED
    tg_ab: tuple = ()
    tt_ab: tuple = ()
    tg_ba: tuple = ()
    tt_ba: tuple = ()
    partitions_used: int = 0
    samples_used: int = 0

    @property
    def fisher_quantity(self):
        return self.fisher_mean

    def to_dict(self) -> dict:
        return asdict(self)


def pair_mean(x, y):
    """Non-directional reduction; sentinels propagate."""
    for v in (x, y):
        if isinstance(v, Missing):
            return v
    if finite(x) and finite(y):
        return (x + y) / 2
    return math.inf if (x == math.inf or y == math.inf) else math.nan


def _fisher_draws(base, source: Graph, length: int, draws: int, rng) -> list:
    """Theta = degrees of random source nodes, applied to random base nodes."""
    length = min(length, base.n, source.n)
    out = []
    deg = source.degrees
    for _ in range(draws):
        theta = deg[rng.choice(source.n, size=length, replace=False)]
        targets = rng.choice(base.n, size=length, replace=False)
        out.append(fisher_quantity(FisherSetup(tuple(theta), tuple(targets)), base))
    return out


def _direction(target, xt, xs, cfg: MetricConfig, h_joint, seed, stream):
    parts = _partitions(target.n, cfg.partitions, cfg.sampling.block_size(target.n), seed, stream)
    try:
        tg, tt = _causality_from_samples(target, xt, xs, parts, cfg.sampling, h_joint,
                                         want_te=cfg.wants("te"))
    except DegenerateResiduals:
        miss = Missing("residuals")
        return miss, miss, (), ()
    g = float(np.mean(tg)) if cfg.wants("granger") else NOT_REQUESTED
    t = float(np.mean(tt)) if cfg.wants("te") else NOT_REQUESTED
    return g, t, tuple(tg) if cfg.wants("granger") else (), tuple(tt)


def relation_report(a: Graph, b: Graph, config: MetricConfig | None = None,
                    seed: int = 0) -> RelationReport:
    """Align sizes, represent both graphs, and compute the requested metrics.

    Random streams are derived from ``seed``: 1 for Fisher draws, 2 for the
    coupled samples, 3/4 for the partitions of a/b.
    """
    cfg = config or MetricConfig()
    pair = align_pair(a, b, cfg.on_disconnect)
    ga = represent(pair.a, cfg.mode, cfg.auto_component)
    gb = represent(pair.b, cfg.mode, cfg.auto_component)
    report = RelationReport(n=ga.n, gamma_a=pair.gamma_a, gamma_b=pair.gamma_b,
                            entropy_a=entropy(ga), entropy_b=entropy(gb),
                            coupling_strength=coupling_strength(ga, gb))
    if ga.n != gb.n:  # auto_component shrank one side
        return _fill_missing(report, Missing("size-mismatch"))
    if cfg.wants("kl"):
        report.kl_ab = kl_divergence(ga, gb)
        report.kl_ba = kl_divergence(gb, ga)
        report.kl_mean = (report.kl_ab + report.kl_ba) / 2
    if cfg.wants("fisher"):
        rng = np.random.default_rng([seed, 1])
        draws_ab = _fisher_draws(ga, pair.b, cfg.theta_length, cfg.fisher_draws, rng)
        draws_ba = _fisher_draws(gb, pair.a, cfg.theta_length, cfg.fisher_draws, rng)
        report.fisher_draws_ab = tuple(draws_ab)
        report.fisher_ab = float(np.mean(draws_ab))
        report.fisher_ba = float(np.mean(draws_ba))
        report.fisher_mean = (report.fisher_ab + report.fisher_ba) / 2
    if not any(cfg.wants(m) for m in ("mi", "granger", "te")):
        return report

    sc = cfg.sampling
    xa, xb = coupled_sample(ga, gb, sc.samples, sc.coupling, np.random.default_rng([seed, 2]))
    report.samples_used = sc.samples
    joint = np.hstack([xa, xb])
    degenerate = _joint_degenerate(joint)
    h_joint = math.nan
    if cfg.wants("mi") or cfg.wants("te"):
        h_joint = -math.inf if degenerate else sc.entropy(joint)
    if cfg.wants("mi"):
        if degenerate:
            warnings.warn("joint sample covariance is singular; mutual information is +inf",
                          DegenerateJoint, stacklevel=2)
            report.mi = math.inf
        else:
            report.mi = entropy(ga) + entropy(gb) - h_joint
    if cfg.wants("granger") or cfg.wants("te"):
        report.partitions_used = cfg.partitions
        g, t, report.tg_ba, report.tt_ba = _direction(ga, xa, xb, cfg, h_joint, seed, 3)
        report.granger_ba, report.te_ba = g, t
        if cfg.directions == "both":
            g, t, report.tg_ab, report.tt_ab = _direction(gb, xb, xa, cfg, h_joint, seed, 4)
            report.granger_ab, report.te_ab = g, t
            report.granger_mean = pair_mean(report.granger_ab, report.granger_ba)
            report.te_mean = pair_mean(report.te_ab, report.te_ba)
        else:
            skipped = Missing("direction-skipped", "null")
            report.granger_ab = report.te_ab = skipped
            report.granger_mean = report.te_mean = skipped
        if not cfg.wants("granger"):
            report.granger_ab = report.granger_ba = report.granger_mean = NOT_REQUESTED
        if not cfg.wants("te"):
            report.te_ab = report.te_ba = report.te_mean = NOT_REQUESTED
    return report


def _fill_missing(report: RelationReport, miss: Missing) -> RelationReport:
    for name in ("kl_ab", "kl_ba", "kl_mean", "mi", "fisher_ab", "fisher_ba", "fisher_mean",
                 "granger_ab", "granger_ba", "granger_mean", "te_ab", "te_ba", "te_mean"):
        setattr(report, name, miss)
    return report
