"""Weighted undirected graphs: validation, topology queries, file formats."""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra, shortest_path

from .errors import (
    AsymmetricMatrix,
    EmptyGraph,
    InputError,
    NegativeWeight,
    NodeOutOfRange,
    ParseError,
    SelfLoop,
)


@dataclass(frozen=True, eq=False)
class Graph:
    """Validated symmetric non-negative weight matrix plus node metadata.

    Build instances with :func:`validate`; the weight array is made
    read-only so a Graph can be shared freely.
    """

    weights: np.ndarray
    node_ids: tuple = field(default=())
    node_labels: tuple | None = None

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return self.weights.sum(axis=1)

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.weights, 1)))

    def edges(self):
        """Yield ``(i, j, w)`` for i < j with w > 0."""
        iu, ju = np.nonzero(np.triu(self.weights, 1))
        for i, j in zip(iu.tolist(), ju.tolist()):
            yield i, j, float(self.weights[i, j])

    def neighbors(self, i: int) -> np.ndarray:
        _check_node(self, i)
        return np.flatnonzero(self.weights[i] > 0)

    def same_as(self, other: "Graph") -> bool:
        return self.n == other.n and np.array_equal(self.weights, other.weights)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


def validate(matrix, node_ids: Sequence | None = None,
             node_labels: Sequence[int] | None = None) -> Graph:
    W = np.array(matrix, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ValueError(f"weight matrix must be square, got shape {W.shape}")
    n = W.shape[0]
    if not np.all(np.isfinite(W)):
        i, j = np.argwhere(~np.isfinite(W))[0]
        raise ValueError(f"non-finite weight at ({i}, {j})")
    diag = np.flatnonzero(np.diag(W) != 0)
    if diag.size:
        raise SelfLoop(int(diag[0]), float(W[diag[0], diag[0]]))
    neg = np.argwhere(W < 0)
    if neg.size:
        i, j = neg[0]
        raise NegativeWeight(int(i), int(j), float(W[i, j]))
    asym = np.argwhere(W != W.T)
    if asym.size:
        i, j = sorted(asym[0].tolist())
        raise AsymmetricMatrix(i, j, float(W[i, j]), float(W[j, i]))

    ids = tuple(range(n)) if node_ids is None else tuple(node_ids)
    if len(ids) != n:
        raise ValueError(f"{len(ids)} node ids for {n} nodes")
    labels = None
    if node_labels is not None:
        labels = tuple(int(x) for x in node_labels)
        if len(labels) != n:
            raise ValueError(f"{len(labels)} node labels for {n} nodes")
    W.flags.writeable = False
    return Graph(W, ids, labels)


def _check_node(graph: Graph, node: int) -> None:
    if not 0 <= int(node) < graph.n:
        raise NodeOutOfRange(int(node), graph.n)


def _components(graph: Graph) -> tuple[int, np.ndarray]:
    return connected_components(csr_matrix(graph.weights > 0), directed=False)


def is_connected(graph: Graph) -> bool:
    if graph.n == 0:
        return False
    ncomp, _ = _components(graph)
    return ncomp == 1


def subgraph(graph: Graph, nodes: Sequence[int]) -> Graph:
    """Induced subgraph on ``nodes`` (kept in the given order)."""
    idx = np.asarray(nodes, dtype=int)
    for v in idx:
        _check_node(graph, v)
    W = graph.weights[np.ix_(idx, idx)]
    labels = None
    if graph.node_labels is not None:
        labels = [graph.node_labels[i] for i in idx]
    return validate(W, [graph.node_ids[i] for i in idx], labels)


def largest_component(graph: Graph) -> Graph:
    if graph.n == 0:
        raise EmptyGraph("graph has no nodes")
    ncomp, comp = _components(graph)
    if ncomp == 1:
        return graph
    sizes = np.bincount(comp, minlength=ncomp)
    best = max(range(ncomp), key=lambda c: (sizes[c], -int(np.flatnonzero(comp == c)[0])))
    return subgraph(graph, np.flatnonzero(comp == best))


def _cost_matrix(graph: Graph, costs) -> csr_matrix:
    if costs is None:
        return csr_matrix(graph.weights > 0)
    C = np.zeros_like(graph.weights)
    if isinstance(costs, Mapping):
        for (i, j), c in costs.items():
            _check_node(graph, i)
            _check_node(graph, j)
            C[i, j] = C[j, i] = c
    else:
        C = np.array(costs, dtype=float)
        if C.shape != graph.weights.shape:
            raise ValueError("cost matrix shape does not match the graph")
    edge = graph.weights > 0
    if np.any(C[edge] <= 0) or not np.all(np.isfinite(C[edge])):
        missing = np.argwhere(edge & ~(C > 0))
        if missing.size:
            i, j = missing[0]
            raise ValueError(f"edge ({i}, {j}) needs a positive finite cost")
        raise ValueError("edge costs must be positive and finite")
    return csr_matrix(np.where(edge, C, 0.0))


def distances_from(graph: Graph, source: int, costs=None) -> np.ndarray:
    """Shortest-path lengths from ``source``; ``inf`` where unreachable."""
    _check_node(graph, source)
    M = _cost_matrix(graph, costs)
    if costs is None:
        return shortest_path(M, directed=False, unweighted=True, indices=source)
    return dijkstra(M, directed=False, indices=source)


def all_pairs_distances(graph: Graph, costs=None) -> np.ndarray:
    M = _cost_matrix(graph, costs)
    if costs is None:
        return shortest_path(M, directed=False, unweighted=True)
    return dijkstra(M, directed=False)


def graph_distance(graph: Graph, source: int, target: int, costs=None) -> float:
    """Hop count, or summed edge cost when ``costs`` is given."""
    _check_node(graph, target)
    return float(distances_from(graph, source, costs)[target])


def closeness(graph: Graph, node: int, costs=None) -> float:
    d = distances_from(graph, node, costs)
    reach = np.isfinite(d)
    reach[node] = False
    total = d[reach].sum()
    if not reach.any() or total == 0:
        return 0.0
    return float(reach.sum() / total)


# -- file formats ------------------------------------------------------------

def read_edge_list(path, default_weight: float = 1.0) -> Graph:
    """``src dst [weight]`` per line; ``#`` starts a comment.

    Node ids are arbitrary tokens mapped to dense indices in first-seen order.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    index: dict[str, int] = {}
    edges: dict[tuple[int, int], float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'src dst [weight]', got {raw.strip()!r}", lineno, path)
        try:
            w = float(parts[2]) if len(parts) == 3 else default_weight
        except ValueError:
            raise ParseError(f"bad weight {parts[2]!r}", lineno, path) from None
        u, v = (index.setdefault(tok, len(index)) for tok in parts[:2])
        key = (min(u, v), max(u, v))
        if u == v:
            raise ParseError(f"self-loop on node {parts[0]!r}", lineno, path)
        if key in edges and edges[key] != w:
            raise ParseError(f"conflicting weights for edge {parts[0]}-{parts[1]}", lineno, path)
        edges[key] = w
    W = np.zeros((len(index), len(index)))
    for (u, v), w in edges.items():
        W[u, v] = W[v, u] = w
    return validate(W, list(index))


def read_pajek(path) -> Graph:
    """Read the Pajek subset: ``*Vertices N``, vertex lines, ``*Edges`` lines.

    Vertex lines are ``i ["label"] [class]`` with 1-based ``i``; the optional
    trailing integer becomes the node's class label. Edge lines are
    ``i j [w]``. ``%`` comment lines and blank lines are skipped; any other
    content is a parse error.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    n = None
    names: list[str] = []
    classes: list[int | None] = []
    edges: list[tuple[int, int, float]] = []
    section = None
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("*"):
            head = line.split()
            key = head[0].lower()
            if key == "*vertices" and len(head) == 2 and n is None:
                try:
                    n = int(head[1])
                except ValueError:
                    raise ParseError(f"bad vertex count {head[1]!r}", lineno, path) from None
                names = [str(i + 1) for i in range(n)]
                classes = [None] * n
                section = "vertices"
            elif key == "*edges" and len(head) == 1 and n is not None:
                section = "edges"
            else:
                raise ParseError(f"unsupported Pajek directive {line!r}", lineno, path)
            continue
        try:
            parts = shlex.split(line)
        except ValueError:
            raise ParseError(f"unbalanced quotes in {line!r}", lineno, path) from None
        if section == "vertices":
            try:
                i = int(parts[0]) - 1
                if not 0 <= i < n:
                    raise ValueError
                rest = parts[1:]
                if rest and not _is_int(rest[0]):
                    names[i] = rest.pop(0)
                if len(rest) > 1:
                    raise ValueError
                if rest:
                    classes[i] = int(rest[0])
            except (ValueError, IndexError):
                raise ParseError(f"bad vertex line {line!r}", lineno, path) from None
        elif section == "edges":
            try:
                if len(parts) not in (2, 3):
                    raise ValueError
                i, j = int(parts[0]) - 1, int(parts[1]) - 1
                w = float(parts[2]) if len(parts) == 3 else 1.0
                if not (0 <= i < n and 0 <= j < n) or i == j:
                    raise ValueError
            except ValueError:
                raise ParseError(f"bad edge line {line!r}", lineno, path) from None
            edges.append((i, j, w))
        else:
            raise ParseError(f"content outside a section: {line!r}", lineno, path)
    if n is None:
        raise ParseError("missing *Vertices header", None, path)
    W = np.zeros((n, n))
    for i, j, w in edges:
        W[i, j] = W[j, i] = w
    labels = None
    if any(c is not None for c in classes):
        if any(c is None for c in classes):
            missing = classes.index(None) + 1
            raise ParseError(f"vertex {missing} has no class label while others do", None, path)
        labels = classes
    return validate(W, names, labels)


def _is_int(tok: str) -> bool:
    try:
        int(tok)
    except ValueError:
        return False
    return True


def read_graph(path) -> Graph:
    """Dispatch on content: Pajek if the first directive is ``*Vertices``."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    with path.open() as fh:
        for raw in fh:
            line = raw.strip()
            if line and not line.startswith(("%", "#")):
                if line.lower().startswith("*vertices"):
                    return read_pajek(path)
                break
    return read_edge_list(path)


def write_edge_list(graph: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {graph.n} nodes, {graph.edge_count} edges\n")
        for i, j, w in graph.edges():
            fh.write(f"{graph.node_ids[i]} {graph.node_ids[j]} {w!r}\n")


def write_pajek(graph: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"*Vertices {graph.n}\n")
        for i in range(graph.n):
            cls = "" if graph.node_labels is None else f" {graph.node_labels[i]}"
            fh.write(f'{i + 1} "{graph.node_ids[i]}"{cls}\n')
        fh.write("*Edges\n")
        for i, j, w in graph.edges():
            fh.write(f"{i + 1} {j + 1} {w!r}\n")
