"""Laplacian algebra: pseudoinverse, spectra, smoothness, energy, centrality."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotConnected, ZeroEnergy
from .graph import Graph, _check_node, subgraph


class RepresentationMode(enum.Enum):
    SIGMA = "sigma"              # covariance L + J/n
    SIGMA_DUAL = "sigma-dual"    # covariance L^+ + J/n

    @classmethod
    def parse(cls, value) -> "RepresentationMode":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower().replace("_", "-"))


def zero_tolerance(eigenvalues: np.ndarray) -> float:
    top = float(eigenvalues[-1]) if len(eigenvalues) else 0.0
    return 1e-10 * max(1.0, top)


def laplacian(graph: Graph) -> np.ndarray:
    W = graph.weights
    return np.diag(W.sum(axis=1)) - W


def pseudoinverse(L: np.ndarray, require_connected: bool = True) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a symmetric Laplacian via eigh."""
    lam, V = np.linalg.eigh(L)
    tol = zero_tolerance(lam)
    keep = lam > tol
    if require_connected and np.count_nonzero(~keep) > 1:
        raise NotConnected(f"Laplacian has {np.count_nonzero(~keep)} near-zero eigenvalues")
    inv = np.zeros_like(lam)
    inv[keep] = 1.0 / lam[keep]
    P = (V * inv) @ V.T
    return (P + P.T) / 2


@dataclass(frozen=True, eq=False)
class SpectralCache:
    laplacian: np.ndarray
    pseudoinverse: np.ndarray
    eigenvalues: np.ndarray
    logdet_sigma: float
    connected: bool

    @property
    def n(self) -> int:
        return self.laplacian.shape[0]


def spectral_cache(graph: Graph) -> SpectralCache:
    L = laplacian(graph)
    lam, V = np.linalg.eigh(L)
    tol = zero_tolerance(lam)
    keep = lam > tol
    connected = graph.n > 0 and np.count_nonzero(~keep) == 1
    inv = np.zeros_like(lam)
    inv[keep] = 1.0 / lam[keep]
    P = (V * inv) @ V.T
    # eig(L + J/n) = {1} U {lambda_2..lambda_n} on a connected graph
    logdet = float(np.sum(np.log(lam[1:]))) if connected else -np.inf
    for arr in (L, lam):
        arr.flags.writeable = False
    P = (P + P.T) / 2
    P.flags.writeable = False
    return SpectralCache(L, P, lam, logdet, bool(connected))


def dirichlet_smoothness(graph: Graph, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (graph.n,):
        raise DimensionMismatch(f"signal of shape {x.shape} on a graph with {graph.n} nodes")
    return float(x @ laplacian(graph) @ x)


def expected_smoothness(cache: SpectralCache, mode=RepresentationMode.SIGMA) -> float:
    """E[x^T L x] under the Gaussian representation of the given mode."""
    if not cache.connected:
        raise NotConnected("expected smoothness needs a connected graph")
    mode = RepresentationMode.parse(mode)
    if mode is RepresentationMode.SIGMA:
        return float(np.sum(cache.eigenvalues ** 2))
    return float(cache.n - 1)


def laplacian_energy(graph: Graph) -> float:
    """Sum of squared Laplacian eigenvalues."""
    if graph.n == 0:
        return 0.0
    lam = np.linalg.eigvalsh(laplacian(graph))
    return float(np.sum(lam ** 2))


def energy_from_degrees(weights: np.ndarray) -> float:
    """Same energy via sum(deg^2) + sum_{i != j} W_ij^2."""
    W = np.asarray(weights, dtype=float)
    return float(np.sum(W.sum(axis=1) ** 2) + np.sum(W ** 2))


def _offdiag_upper_sum(P: np.ndarray) -> float:
    return float((P.sum() - np.trace(P)) / 2)


def laplacian_centrality(graph: Graph, node: int) -> float:
    """Fractional energy drop when ``node`` is deleted, by walk counting.

    drop = 4 [W^2]_ii + 2 (sum_{j<k} [W^2]_jk - sum_{j<k} [M^2]_jk), with M
    the weight matrix after deleting ``node``. The off-diagonal sums run over
    unordered pairs; over ordered pairs the factor 2 would double count.
    """
    _check_node(graph, node)
    W = graph.weights
    energy = energy_from_degrees(W)
    if energy == 0:
        raise ZeroEnergy("graph has zero Laplacian energy")
    keep = np.arange(graph.n) != node
    M = W[np.ix_(keep, keep)]
    W2 = W @ W
    M2 = M @ M
    drop = 4 * W2[node, node] + 2 * (_offdiag_upper_sum(W2) - _offdiag_upper_sum(M2))
    return float(drop / energy)


def laplacian_centralities(graph: Graph) -> np.ndarray:
    """All centralities from one W^2 product.

    Deleting node i gives M^2 = (W^2)_{-i,-i} - w_i w_i^T, so its
    off-diagonal sum follows from row sums of W^2 and the degree of i.
    """
    W = graph.weights
    energy = energy_from_degrees(W)
    if energy == 0:
        raise ZeroEnergy("graph has zero Laplacian energy")
    P = W @ W
    deg = W.sum(axis=1)
    dP = np.diag(P)
    total_off = P.sum() - dP.sum()
    row_off = P.sum(axis=1) - dP
    m_off = (total_off - 2 * row_off - (deg ** 2 - dP)) / 2
    drop = 4 * dP + 2 * (total_off / 2 - m_off)
    return drop / energy


def centrality_by_energy_difference(graph: Graph, node: int) -> float:
    """Direct route: eigen-energy of the graph with and without ``node``."""
    energy = laplacian_energy(graph)
    if energy == 0:
        raise ZeroEnergy("graph has zero Laplacian energy")
    rest = [i for i in range(graph.n) if i != node]
    return (energy - laplacian_energy(subgraph(graph, rest))) / energy
