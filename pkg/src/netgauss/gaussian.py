"""Graph -> zero-mean Gaussian representation, entropy and coupled sampling."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotConnected, NumericalError
from .graph import Graph, is_connected, largest_component
from .spectral import RepresentationMode, spectral_cache

__all__ = [
    "Coupling",
    "NetworkGaussian",
    "RepresentationMode",
    "coupled_sample",
    "coupling_strength",
    "entropy",
    "gaussian_from_covariance",
    "joint_covariance",
    "represent",
    "sample",
]

LOG_2PI = math.log(2 * math.pi)


class Coupling(enum.Enum):
    """How paired samples of two representations share randomness.

    COMMON_SOURCE feeds one standard-normal vector through both square-root
    factors. INDEPENDENT uses separate vectors. AFFINITY mixes the two:
    ``x_b = A_b (c z + sqrt(1 - c^2) z')`` with ``c`` the per-coordinate
    Bhattacharyya affinity of the pair, so it equals COMMON_SOURCE for
    identical covariances and loses dependence as the graphs drift apart.
    """

    COMMON_SOURCE = "common"
    INDEPENDENT = "independent"
    AFFINITY = "affinity"

    @classmethod
    def parse(cls, value) -> "Coupling":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True, eq=False)
class NetworkGaussian:
    covariance: np.ndarray
    precision: np.ndarray
    logdet_cov: float
    sqrt_factor: np.ndarray
    mode: RepresentationMode | None = None
    graph: Graph | None = None

    @property
    def n(self) -> int:
        return self.covariance.shape[0]

    @property
    def mean(self) -> np.ndarray:
        return np.zeros(self.n)

    @property
    def entropy(self) -> float:
        return entropy(self)


def _sym_sqrt(cov: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(cov)
    if w[0] <= 0:
        raise NumericalError(f"covariance is not positive definite (min eigenvalue {w[0]:.3g})")
    A = (V * np.sqrt(w)) @ V.T
    return (A + A.T) / 2


def _freeze(*arrays):
    for a in arrays:
        a.flags.writeable = False


def gaussian_from_covariance(cov, mode: RepresentationMode | None = None,
                             graph: Graph | None = None) -> NetworkGaussian:
    cov = np.array(cov, dtype=float, ndmin=2)
    cov = (cov + cov.T) / 2
    w = np.linalg.eigvalsh(cov)
    if w[0] <= 0:
        raise NumericalError("covariance is not positive definite")
    prec = np.linalg.inv(cov)
    prec = (prec + prec.T) / 2
    A = _sym_sqrt(cov)
    _freeze(cov, prec, A)
    return NetworkGaussian(cov, prec, float(np.sum(np.log(w))), A, mode, graph)


def represent(graph: Graph, mode=RepresentationMode.SIGMA,
              auto_component: bool = False) -> NetworkGaussian:
    """Gaussian representation of a connected graph.

    SIGMA: covariance L + J/n, precision L^+ + J/n.
    SIGMA_DUAL: the two swapped.
    With ``auto_component`` a disconnected graph is replaced by its largest
    connected component instead of raising NotConnected.
    """
    mode = RepresentationMode.parse(mode)
    if not is_connected(graph):
        if not auto_component:
            raise NotConnected(f"graph with {graph.n} nodes is not connected")
        graph = largest_component(graph)
    cache = spectral_cache(graph)
    n = graph.n
    Jn = np.full((n, n), 1.0 / n)
    sigma = cache.laplacian + Jn
    sigma_inv = cache.pseudoinverse + Jn
    if mode is RepresentationMode.SIGMA:
        cov, prec, logdet = sigma, sigma_inv, cache.logdet_sigma
    else:
        cov, prec, logdet = sigma_inv, sigma, -cache.logdet_sigma
    resid = np.max(np.abs(cov @ prec - np.eye(n)))
    if resid > 1e-8 * max(1.0, float(np.max(np.abs(cov))) * float(np.max(np.abs(prec)))):
        raise NumericalError(f"closed-form precision failed the inverse check (residual {resid:.2e})")
    cov = np.array(cov)
    prec = np.array(prec)
    A = _sym_sqrt(cov)
    _freeze(cov, prec, A)
    return NetworkGaussian(cov, prec, logdet, A, mode, graph)


def entropy(g: NetworkGaussian) -> float:
    """Differential entropy in nats."""
    return g.n / 2 + g.n / 2 * LOG_2PI + g.logdet_cov / 2


def sample(g: NetworkGaussian, count: int, rng: np.random.Generator) -> np.ndarray:
    if count < 1:
        raise ValueError("count must be >= 1")
    z = rng.standard_normal((count, g.n))
    return z @ g.sqrt_factor


def coupling_strength(a: NetworkGaussian, b: NetworkGaussian) -> float:
    """Per-coordinate Bhattacharyya affinity exp(-D_B / n), in (0, 1]."""
    if a.n != b.n:
        raise DimensionMismatch(f"{a.n} vs {b.n} nodes")
    if np.array_equal(a.covariance, b.covariance):
        return 1.0
    _, logdet_mid = np.linalg.slogdet((a.covariance + b.covariance) / 2)
    d_b = 0.5 * logdet_mid - 0.25 * (a.logdet_cov + b.logdet_cov)
    return float(min(1.0, math.exp(-max(d_b, 0.0) / a.n)))


def _strength(a, b, coupling: Coupling, strength: float | None) -> float:
    if coupling is Coupling.COMMON_SOURCE:
        return 1.0
    if coupling is Coupling.INDEPENDENT:
        return 0.0
    c = coupling_strength(a, b) if strength is None else float(strength)
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"coupling strength {c} outside [0, 1]")
    return c


def coupled_sample(a: NetworkGaussian, b: NetworkGaussian, count: int,
                   coupling=Coupling.COMMON_SOURCE, rng: np.random.Generator | None = None,
                   strength: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``count`` paired rows ``(x_a, x_b)`` with the requested coupling."""
    if a.n != b.n:
        raise DimensionMismatch(f"cannot couple {a.n}- and {b.n}-dimensional representations")
    if count < 1:
        raise ValueError("count must be >= 1")
    if rng is None:
        raise ValueError("an explicit seeded Generator is required")
    coupling = Coupling.parse(coupling)
    c = _strength(a, b, coupling, strength)
    z = rng.standard_normal((count, a.n))
    xa = z @ a.sqrt_factor
    if c == 1.0:
        return xa, z @ b.sqrt_factor
    z2 = rng.standard_normal((count, b.n))
    zb = z2 if c == 0.0 else c * z + math.sqrt(1 - c * c) * z2
    return xa, zb @ b.sqrt_factor


def joint_covariance(a: NetworkGaussian, b: NetworkGaussian,
                     coupling=Coupling.COMMON_SOURCE, strength: float | None = None) -> np.ndarray:
    """Exact covariance of the concatenated row ``(x_a, x_b)``."""
    if a.n != b.n:
        raise DimensionMismatch(f"{a.n} vs {b.n} nodes")
    coupling = Coupling.parse(coupling)
    c = _strength(a, b, coupling, strength)
    cross = c * a.sqrt_factor @ b.sqrt_factor.T
    return np.block([[a.covariance, cross], [cross.T, b.covariance]])
