"""Watts-Strogatz / Erdos-Renyi / Barabasi-Albert generators and evolution steps."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadSpec, TooSmall
from .graph import Graph, subgraph, validate


class ModelKind(enum.Enum):
    WS = "ws"
    ER = "er"
    BA = "ba"

    @classmethod
    def parse(cls, value) -> "ModelKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise BadSpec(f"unknown model {value!r}; expected ws, er or ba") from None


class Process(enum.Enum):
    DELETE = "delete"
    REWIRE = "rewire"
    ADD = "add"

    @classmethod
    def parse(cls, value) -> "Process":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise BadSpec(f"unknown process {value!r}; expected delete, rewire or add") from None


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    n0: int = 300
    ws_alpha: int = 15
    ws_beta: float = 0.7
    er_rho: float = 0.15
    ba_kappa: int = 50
    ba_m: int = 5

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind.parse(self.kind))
        if self.n0 < 1:
            raise BadSpec("n0 must be positive")
        for name in ("ws_beta", "er_rho"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise BadSpec(f"{name} must lie in [0, 1]")
        if self.kind is ModelKind.WS and not 1 <= self.ws_alpha < self.n0:
            raise BadSpec(f"ws_alpha={self.ws_alpha} must lie in [1, n0)")
        if self.kind is ModelKind.BA:
            if not 1 <= self.ba_kappa <= self.n0:
                raise BadSpec(f"ba_kappa={self.ba_kappa} must lie in [1, n0]")
            if self.ba_m < 1:
                raise BadSpec("ba_m must be >= 1")


@dataclass(frozen=True)
class WiringRule:
    """How a single node (re)acquires edges during REWIRE / ADD.

    "er": link to every other node independently with probability rho.
    "ws": link to the alpha nearest indices on the ring, then move each
    link to a uniformly random node with probability beta.
    """

    kind: str
    rho: float = 0.5
    alpha: int = 40
    beta: float = 0.1

    def __post_init__(self):
        if self.kind not in ("er", "ws"):
            raise BadSpec(f"unknown wiring rule {self.kind!r}")
        if not (0 <= self.rho <= 1 and 0 <= self.beta <= 1) or self.alpha < 1:
            raise BadSpec("invalid wiring rule parameters")


def foreign_rule(origin: ModelKind) -> WiringRule:
    """Rule that differs from the origin model's own wiring."""
    if ModelKind.parse(origin) is ModelKind.ER:
        return WiringRule("ws", alpha=40, beta=0.1)
    return WiringRule("er", rho=0.5)


@dataclass(frozen=True)
class EvolutionSpec:
    process: Process
    iterations: int
    origin: ModelKind = ModelKind.WS
    rule: WiringRule | None = None
    n0: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "process", Process.parse(self.process))
        object.__setattr__(self, "origin", ModelKind.parse(self.origin))
        if self.rule is None:
            object.__setattr__(self, "rule", foreign_rule(self.origin))
        if self.iterations < 1:
            raise BadSpec("iterations must be >= 1")
        if self.process is Process.DELETE and self.n0 is not None and self.iterations >= self.n0 - 1:
            raise BadSpec(f"{self.iterations} deletions need n0 > {self.iterations + 1}")


def _from_edges(n: int, edges) -> Graph:
    W = np.zeros((n, n))
    for i, j in edges:
        W[i, j] = W[j, i] = 1.0
    return validate(W, list(range(n)))


def _ring_edges(n: int, alpha: int) -> list:
    """Each node to ceil(alpha/2) clockwise and floor(alpha/2) counter-clockwise neighbours."""
    seen, out = set(), []
    cw, ccw = math.ceil(alpha / 2), alpha // 2
    for i in range(n):
        for o in list(range(1, cw + 1)) + [-o for o in range(1, ccw + 1)]:
            j = (i + o) % n
            key = (min(i, j), max(i, j))
            if i != j and key not in seen:
                seen.add(key)
                out.append((i, j))
    return out


def _watts_strogatz(n, alpha, beta, rng) -> Graph:
    lattice = _ring_edges(n, alpha)
    adj = [set() for _ in range(n)]
    for i, j in lattice:
        adj[i].add(j)
        adj[j].add(i)
    for i, j in lattice:
        if rng.random() >= beta:
            continue
        candidates = [v for v in range(n) if v != i and v not in adj[i]]
        if not candidates:
            continue
        new = candidates[int(rng.integers(len(candidates)))]
        adj[i].discard(j)
        adj[j].discard(i)
        adj[i].add(new)
        adj[new].add(i)
    return _from_edges(n, [(i, j) for i in range(n) for j in adj[i] if i < j])


def _erdos_renyi(n, rho, rng) -> Graph:
    upper = np.triu(rng.random((n, n)) < rho, 1)
    W = (upper | upper.T).astype(float)
    return validate(W, list(range(n)))


def _barabasi_albert(n, kappa, m, rng) -> Graph:
    W = np.zeros((n, n))
    if kappa == 2:
        W[0, 1] = W[1, 0] = 1.0
    elif kappa > 2:
        for i in range(kappa):
            j = (i + 1) % kappa
            W[i, j] = W[j, i] = 1.0
    for v in range(kappa, n):
        deg = W[:v, :v].sum(axis=1)
        p = deg / deg.sum() if deg.sum() > 0 else np.full(v, 1.0 / v)
        support = np.count_nonzero(p)
        targets = rng.choice(v, size=min(m, support), replace=False, p=p)
        W[v, targets] = W[targets, v] = 1.0
    return validate(W, list(range(n)))


def generate(spec: ModelSpec, rng: np.random.Generator) -> Graph:
    """Unit-weight random graph of the requested model."""
    if spec.kind is ModelKind.WS:
        return _watts_strogatz(spec.n0, spec.ws_alpha, spec.ws_beta, rng)
    if spec.kind is ModelKind.ER:
        return _erdos_renyi(spec.n0, spec.er_rho, rng)
    return _barabasi_albert(spec.n0, spec.ba_kappa, spec.ba_m, rng)


def _wire(v: int, n: int, rule: WiringRule, rng) -> np.ndarray:
    """Neighbour indices for node v among the other n-1 nodes."""
    others = np.array([u for u in range(n) if u != v])
    if rule.kind == "er":
        return others[rng.random(len(others)) < rule.rho]
    cw, ccw = math.ceil(rule.alpha / 2), rule.alpha // 2
    near = []
    for o in list(range(1, cw + 1)) + [-o for o in range(1, ccw + 1)]:
        u = (v + o) % n
        if u != v and u not in near:
            near.append(u)
    chosen = set(near)
    out = []
    for u in near:
        if rng.random() < rule.beta:
            pool = [w for w in others if w not in chosen]
            if pool:
                w = int(pool[int(rng.integers(len(pool)))])
                chosen.discard(u)
                chosen.add(w)
                out.append(w)
                continue
        out.append(u)
    return np.array(sorted(set(out)), dtype=int)


def _next_id(graph: Graph):
    ids = graph.node_ids
    if all(isinstance(i, (int, np.integer)) for i in ids):
        return (max(ids) + 1) if ids else 0
    return f"v{graph.n}"


def evolve_step(graph: Graph, spec: EvolutionSpec, rng: np.random.Generator) -> Graph:
    """One DELETE / REWIRE / ADD step."""
    n = graph.n
    if spec.process is Process.DELETE:
        if n <= 2:
            raise TooSmall(f"cannot delete from a graph with {n} nodes")
        v = int(rng.integers(n))
        return subgraph(graph, [u for u in range(n) if u != v])
    if spec.process is Process.REWIRE:
        if n < 2:
            raise TooSmall("cannot rewire a graph with fewer than 2 nodes")
        v = int(rng.integers(n))
        W = np.array(graph.weights)
        W[v, :] = W[:, v] = 0.0
        nb = _wire(v, n, spec.rule, rng)
        W[v, nb] = W[nb, v] = 1.0
        return validate(W, graph.node_ids, graph.node_labels)
    W = np.zeros((n + 1, n + 1))
    W[:n, :n] = graph.weights
    nb = _wire(n, n + 1, spec.rule, rng)
    W[n, nb] = W[nb, n] = 1.0
    labels = None if graph.node_labels is None else list(graph.node_labels) + [0]
    return validate(W, list(graph.node_ids) + [_next_id(graph)], labels)
