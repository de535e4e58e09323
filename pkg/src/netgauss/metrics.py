"""Relations between two network Gaussians: KL, MI, Fisher, Granger, transfer entropy."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (BadSize, DegenerateJoint, DegenerateResiduals, DimensionMismatch,
                     NotPositiveDefinite, SingularBlock, TooFewSamples)
from .estimators import (DEFAULT_K, DEFAULT_SAMPLES, corrected_entropy, kl_entropy,
                         ols_residual_covariance, wishart_logdet_bias)
from .gaussian import LOG_2PI, Coupling, NetworkGaussian, coupled_sample, entropy

DEFAULT_PARTITIONS = 10
# relative eigenvalue floors below which sample covariances count as singular
JOINT_RTOL = 1e-10
RESIDUAL_RTOL = 1e-9


@dataclass(frozen=True)
class Partition:
    circ: tuple
    star: tuple

    def __post_init__(self):
        if not self.circ or not self.star:
            raise BadSize("both partition blocks must be nonempty")
        if set(self.circ) & set(self.star):
            raise BadSize("partition blocks overlap")

    @property
    def n(self) -> int:
        return len(self.circ) + len(self.star)


def random_partition(n: int, k: int, rng: np.random.Generator) -> Partition:
    """Uniform random k-subset as the circ block, complement as star."""
    if not 1 <= k <= n - 1:
        raise BadSize(f"partition size k={k} must lie in [1, {n - 1}]")
    mask = np.zeros(n, dtype=bool)
    mask[rng.choice(n, size=k, replace=False)] = True
    idx = np.arange(n)
    return Partition(tuple(int(i) for i in idx[mask]), tuple(int(i) for i in idx[~mask]))


@dataclass(frozen=True)
class SamplingConfig:
    """Knobs for every estimator-backed metric.

    estimator: "corrected" (whitened, bias-referenced KL; default) or "raw"
    (plain Kozachenko-Leonenko). partition_size None means floor(n/2).
    """

    samples: int = DEFAULT_SAMPLES
    k_neighbors: int = DEFAULT_K
    coupling: Coupling = Coupling.AFFINITY
    estimator: str = "corrected"
    partition_size: int | None = None
    ridge: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "coupling", Coupling.parse(self.coupling))
        if self.estimator not in ("corrected", "raw"):
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if self.samples < 2:
            raise TooFewSamples("need at least 2 samples")

    def entropy(self, X: np.ndarray) -> float:
        if self.estimator == "raw":
            return kl_entropy(X, self.k_neighbors).value
        return corrected_entropy(X, self.k_neighbors).value

    def block_size(self, n: int) -> int:
        return n // 2 if self.partition_size is None else self.partition_size


def _check_pair(a: NetworkGaussian, b: NetworkGaussian):
    if a.n != b.n:
        raise DimensionMismatch(f"graphs have {a.n} and {b.n} nodes; align sizes first")


def _rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    if seed_or_rng is None:
        raise ValueError("an explicit seed or Generator is required")
    return np.random.default_rng(seed_or_rng)


def _master_seed(seed_or_rng) -> int:
    if isinstance(seed_or_rng, np.random.Generator):
        return int(seed_or_rng.integers(2 ** 63))
    if seed_or_rng is None:
        raise ValueError("an explicit seed or Generator is required")
    return int(seed_or_rng)


# -- closed forms -------------------------------------------------------------

def kl_divergence(a: NetworkGaussian, b: NetworkGaussian) -> float:
    """KL(a || b) in nats between zero-mean Gaussians."""
    _check_pair(a, b)
    if np.array_equal(a.covariance, b.covariance):
        return 0.0
    tr = float(np.sum(b.precision * a.covariance))
    value = 0.5 * (tr - a.n + b.logdet_cov - a.logdet_cov)
    if value < 0 and value >= -1e-9:
        return 0.0
    return float(value)


@dataclass(frozen=True)
class FisherSetup:
    """Additive diagonal perturbation C(theta) = base + sum_i theta_i E(t_i)."""

    theta: tuple
    target_nodes: tuple

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(float(t) for t in self.theta))
        object.__setattr__(self, "target_nodes", tuple(int(t) for t in self.target_nodes))
        if len(self.theta) != len(self.target_nodes):
            raise BadSize(f"{len(self.theta)} parameters for {len(self.target_nodes)} targets")
        if any(t < 0 for t in self.theta):
            raise BadSize("theta entries are variances and must be >= 0")
        if len(set(self.target_nodes)) != len(self.target_nodes):
            raise BadSize("target nodes must be distinct")

    @property
    def k(self) -> int:
        return len(self.theta)

    def derivative_matrices(self, n: int) -> list:
        out = []
        for t in self.target_nodes:
            E = np.zeros((n, n))
            E[t, t] = 1.0
            out.append(E)
        return out

    def perturbed(self, covariance: np.ndarray) -> np.ndarray:
        C = np.array(covariance, dtype=float)
        idx = np.asarray(self.target_nodes, dtype=int)
        C[idx, idx] += np.asarray(self.theta)
        return C


def _perturbed_inverse(setup: FisherSetup, base: NetworkGaussian) -> np.ndarray:
    if setup.target_nodes and max(setup.target_nodes) >= base.n:
        raise BadSize(f"target node out of range for n={base.n}")
    C = setup.perturbed(base.covariance)
    try:
        chol = np.linalg.cholesky(C)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("perturbed covariance is not positive definite") from None
    inv_chol = np.linalg.inv(chol)
    return inv_chol.T @ inv_chol


def fisher_matrix(setup: FisherSetup, base: NetworkGaussian) -> np.ndarray:
    """F_ij = 1/2 tr[C^-1 dC_i C^-1 dC_j] = 1/2 (C^-1)_{t_i t_j}^2 for single-entry derivatives."""
    Cinv = _perturbed_inverse(setup, base)
    idx = np.asarray(setup.target_nodes, dtype=int)
    F = 0.5 * Cinv[np.ix_(idx, idx)] ** 2
    return (F + F.T) / 2


def fisher_matrix_trace_form(setup: FisherSetup, base: NetworkGaussian) -> np.ndarray:
    """Same matrix through the general trace formula (dense; for checking)."""
    Cinv = _perturbed_inverse(setup, base)
    mats = [Cinv @ D for D in setup.derivative_matrices(base.n)]
    k = setup.k
    F = np.empty((k, k))
    for i in range(k):
        for j in range(k):
            F[i, j] = 0.5 * np.trace(mats[i] @ mats[j])
    return F


def fisher_quantity(setup: FisherSetup, base: NetworkGaussian) -> float:
    return float(np.trace(fisher_matrix(setup, base)))


def conditional_covariance(a: NetworkGaussian, p: Partition) -> np.ndarray:
    """Covariance of the star block given the circ block (Schur complement)."""
    if p.n != a.n:
        raise BadSize(f"partition covers {p.n} nodes, representation has {a.n}")
    circ = np.asarray(p.circ)
    star = np.asarray(p.star)
    S = a.covariance
    S_cc = S[np.ix_(circ, circ)]
    S_sc = S[np.ix_(star, circ)]
    try:
        chol = np.linalg.cholesky(S_cc)
    except np.linalg.LinAlgError:
        raise SingularBlock("circ block of the covariance is singular") from None
    half = np.linalg.solve(chol, S_sc.T)
    out = S[np.ix_(star, star)] - half.T @ half
    out = (out + out.T) / 2
    if np.linalg.eigvalsh(out)[0] <= 0:
        raise SingularBlock("conditional covariance is not positive definite")
    return out


def conditional_entropy(a: NetworkGaussian, p: Partition) -> float:
    """Analytic H(x_star | x_circ) = (n-k)/2 (1 + ln 2pi) + 1/2 ln(det S / det S_cc)."""
    circ = np.asarray(p.circ)
    _, logdet_cc = np.linalg.slogdet(a.covariance[np.ix_(circ, circ)])
    return len(p.star) / 2 * (1 + LOG_2PI) + 0.5 * (a.logdet_cov - logdet_cc)


# -- estimator-backed ---------------------------------------------------------

def _joint_degenerate(X: np.ndarray) -> bool:
    Xc = X - X.mean(axis=0)
    w = np.linalg.eigvalsh(Xc.T @ Xc)
    return bool(w[0] <= JOINT_RTOL * max(w[-1], 0.0))


def _mi_from_samples(a, b, xa, xb, cfg: SamplingConfig) -> tuple[float, float]:
    """(mi, joint entropy estimate); both inf-valued on a degenerate joint."""
    joint = np.hstack([xa, xb])
    if _joint_degenerate(joint):
        warnings.warn("joint sample covariance is singular; mutual information is +inf",
                      DegenerateJoint, stacklevel=3)
        return math.inf, -math.inf
    h_joint = cfg.entropy(joint)
    return entropy(a) + entropy(b) - h_joint, h_joint


def mutual_information(a: NetworkGaussian, b: NetworkGaussian, config: SamplingConfig | None = None,
                       rng=None) -> float:
    """H(a) + H(b) - H_hat(a, b) from coupled samples; +inf if the joint is degenerate."""
    _check_pair(a, b)
    cfg = config or SamplingConfig()
    xa, xb = coupled_sample(a, b, cfg.samples, cfg.coupling, _rng(rng))
    return _mi_from_samples(a, b, xa, xb, cfg)[0]


@dataclass(frozen=True)
class CausalityResult:
    granger: float
    transfer_entropy: float
    granger_per_partition: tuple
    te_per_partition: tuple
    partitions: tuple = field(repr=False, default=())


def _partitions(n: int, h: int, k: int, seed: int, stream: int) -> list:
    return [random_partition(n, k, np.random.default_rng([seed, stream, i])) for i in range(h)]


def _causality_from_samples(a, xa, xb, partitions, cfg: SamplingConfig, h_joint: float,
                            want_te: bool = True) -> tuple[list, list]:
    """Per-partition T_g and T_t for the direction b -> a.

    h_joint is the estimated entropy of the concatenated (x_a, x_b) rows;
    it does not depend on the partition so callers estimate it once.
    """
    count = xa.shape[0]
    t_g, t_t = [], []
    for p in partitions:
        circ, star = np.asarray(p.circ), np.asarray(p.star)
        predictors = np.hstack([xa[:, circ], xb])
        if count <= predictors.shape[1] + 1:
            raise TooFewSamples(f"{count} samples for {predictors.shape[1]} predictors")
        _, logdet_cond = np.linalg.slogdet(conditional_covariance(a, p))
        resid = ols_residual_covariance(xa[:, star], predictors, cfg.ridge).matrix
        w = np.linalg.eigvalsh(resid)
        # scale the floor by the target block, not the residual: an exact fit
        # leaves every residual eigenvalue at rounding level
        scale = float(np.mean(np.var(xa[:, star], axis=0)))
        if w[0] <= RESIDUAL_RTOL * scale:
            raise DegenerateResiduals("source variable predicts the target block exactly")
        logdet_resid = float(np.sum(np.log(w)))
        if cfg.estimator == "corrected":
            # residual scatter has count - q - 1 degrees of freedom
            logdet_resid -= wishart_logdet_bias(len(star), count - predictors.shape[1])
        t_g.append(float(logdet_cond - logdet_resid))
        if want_te:
            if not math.isfinite(h_joint):
                raise DegenerateResiduals("joint sample covariance is singular")
            h_cond = h_joint - cfg.entropy(predictors)
            t_t.append(float(conditional_entropy(a, p) - h_cond))
    return t_g, t_t


def causality(a: NetworkGaussian, b: NetworkGaussian, h: int = DEFAULT_PARTITIONS,
              config: SamplingConfig | None = None, seed=None) -> CausalityResult:
    """Granger causality and transfer entropy of b -> a over h random partitions of a.

    One coupled sample set is shared by all partitions; partition p_i is
    drawn from the stream (seed, i) so it does not depend on scheduling.
    """
    _check_pair(a, b)
    if h < 1:
        raise BadSize("need at least one partition")
    cfg = config or SamplingConfig()
    seed = _master_seed(seed)
    xa, xb = coupled_sample(a, b, cfg.samples, cfg.coupling, np.random.default_rng([seed, 0]))
    joint = np.hstack([xa, xb])
    h_joint = -math.inf if _joint_degenerate(joint) else cfg.entropy(joint)
    parts = _partitions(a.n, h, cfg.block_size(a.n), seed, 1)
    t_g, t_t = _causality_from_samples(a, xa, xb, parts, cfg, h_joint)
    return CausalityResult(float(np.mean(t_g)), float(np.mean(t_t)), tuple(t_g), tuple(t_t),
                           tuple(parts))


def granger(a: NetworkGaussian, b: NetworkGaussian, h: int = DEFAULT_PARTITIONS,
            config: SamplingConfig | None = None, seed=None) -> tuple[float, tuple]:
    """Mean T_g of b -> a and the per-partition values."""
    _check_pair(a, b)
    cfg = config or SamplingConfig()
    seed = _master_seed(seed)
    xa, xb = coupled_sample(a, b, cfg.samples, cfg.coupling, np.random.default_rng([seed, 0]))
    parts = _partitions(a.n, h, cfg.block_size(a.n), seed, 1)
    t_g, _ = _causality_from_samples(a, xa, xb, parts, cfg, math.nan, want_te=False)
    return float(np.mean(t_g)), tuple(t_g)


def transfer_entropy(a: NetworkGaussian, b: NetworkGaussian, h: int = DEFAULT_PARTITIONS,
                     config: SamplingConfig | None = None, seed=None) -> tuple[float, tuple]:
    """Mean T_t of b -> a and the per-partition values."""
    res = causality(a, b, h, config, seed)
    return res.transfer_entropy, res.te_per_partition
