"""Size alignment by Laplacian centrality and the rationality score gamma."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BadTarget, DisconnectedResult, ZeroEnergy
from .graph import Graph, _components, is_connected, subgraph
from .spectral import energy_from_degrees, laplacian_centralities

ON_DISCONNECT = ("repad", "error", "keep")


@dataclass(frozen=True, eq=False)
class Alignment:
    kept_nodes: tuple
    filtered_graph: Graph
    gamma: float
    disconnected: bool = False


def centrality_ranking(graph: Graph) -> np.ndarray:
    """Node indices by decreasing centrality, ties to the smaller index."""
    c = laplacian_centralities(graph)
    return np.lexsort((np.arange(graph.n), -c))


def _repad(graph: Graph, ranking: np.ndarray, kept: list, target_n: int):
    """Largest component of ``kept``, grown by next-ranked adjacent nodes."""
    sub = subgraph(graph, sorted(kept))
    _, labels = _components(sub)
    order = np.asarray(sorted(kept))
    sizes = np.bincount(labels)
    rank_pos = np.empty(graph.n, dtype=int)
    rank_pos[ranking] = np.arange(graph.n)
    # size ties go to the component holding the better-ranked node
    best = max(range(len(sizes)),
               key=lambda c: (sizes[c], -rank_pos[order[labels == c]].min()))
    chosen = {int(v) for v in order[labels == best]}
    adj = graph.weights > 0
    while len(chosen) < target_n:
        members = np.fromiter(chosen, dtype=int)
        frontier = adj[members].any(axis=0)
        for v in ranking:
            if int(v) not in chosen and frontier[v]:
                chosen.add(int(v))
                break
        else:
            return None
    return sorted(chosen)


def align_down(graph: Graph, target_n: int, on_disconnect: str = "repad") -> Alignment:
    """Keep the ``target_n`` most central nodes (centralities ranked once).

    If the survivors are disconnected: "repad" keeps their largest component
    and adds the next-ranked nodes adjacent to it until the size is reached
    (falling back to the plain top set, flagged, if that is impossible);
    "error" raises DisconnectedResult; "keep" returns the flagged top set.
    """
    if on_disconnect not in ON_DISCONNECT:
        raise ValueError(f"on_disconnect must be one of {ON_DISCONNECT}")
    if graph.n < 2:
        raise BadTarget(f"cannot align a graph with {graph.n} nodes")
    if not 1 <= target_n <= graph.n:
        raise BadTarget(f"target size {target_n} outside [1, {graph.n}]")
    energy = energy_from_degrees(graph.weights)
    if energy == 0:
        raise ZeroEnergy("graph has zero Laplacian energy")
    ranking = centrality_ranking(graph)
    kept = sorted(int(v) for v in ranking[:target_n])
    filtered = subgraph(graph, kept)
    disconnected = False
    if target_n < graph.n and not is_connected(filtered) and is_connected(graph):
        if on_disconnect == "error":
            raise DisconnectedResult(f"keeping {target_n} most central nodes disconnects the graph")
        repadded = _repad(graph, ranking, kept, target_n) if on_disconnect == "repad" else None
        if repadded is None:
            disconnected = True
            warnings.warn("size alignment produced a disconnected graph", RuntimeWarning, stacklevel=2)
        else:
            kept = repadded
            filtered = subgraph(graph, kept)
    gamma = energy_from_degrees(filtered.weights) / energy
    return Alignment(tuple(kept), filtered, float(gamma), disconnected)


class AlignedPair(NamedTuple):
    a: Graph
    b: Graph
    gamma_a: float
    gamma_b: float


def align_pair(a: Graph, b: Graph, on_disconnect: str = "repad") -> AlignedPair:
    """Filter the larger graph down to the smaller one's size."""
    if a.n > b.n:
        al = align_down(a, b.n, on_disconnect)
        return AlignedPair(al.filtered_graph, b, al.gamma, 1.0)
    if b.n > a.n:
        al = align_down(b, a.n, on_disconnect)
        return AlignedPair(a, al.filtered_graph, 1.0, al.gamma)
    return AlignedPair(a, b, 1.0, 1.0)
