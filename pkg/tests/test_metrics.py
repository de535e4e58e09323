import math
import warnings

import numpy as np
import pytest

from netgauss.errors import (BadSize, DegenerateJoint, DegenerateResiduals, DimensionMismatch,
                             NotPositiveDefinite)
from netgauss.gaussian import Coupling, gaussian_from_covariance, represent
from netgauss.graph import validate
from netgauss.metrics import (FisherSetup, Partition, SamplingConfig, causality, conditional_covariance,
                              conditional_entropy, fisher_matrix, fisher_matrix_trace_form, fisher_quantity,
                              granger, kl_divergence, mutual_information, random_partition, transfer_entropy)

from conftest import complete_graph, path_graph, random_connected_graph


def test_kl_examples(P2, P2w2):
    a, b = represent(P2w2), represent(P2)
    assert kl_divergence(a, a) == 0
    assert kl_divergence(a, b) == pytest.approx(0.5 * (1 - math.log(2)), abs=1e-12)
    assert kl_divergence(b, a) == pytest.approx(0.5 * (math.log(2) - 0.5), abs=1e-12)
    assert kl_divergence(a, b) != kl_divergence(b, a)


def test_kl_dimension_mismatch(P2, K3):
    with pytest.raises(DimensionMismatch):
        kl_divergence(represent(P2), represent(K3))


def test_kl_nonnegative_and_zero_only_on_equal():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(3, 30))
        a = represent(random_connected_graph(n, rng))
        b = represent(random_connected_graph(n, rng))
        assert kl_divergence(a, b) > 0
        assert kl_divergence(a, a) == 0
        same = gaussian_from_covariance(np.array(a.covariance))
        assert abs(kl_divergence(a, same)) <= 1e-10


def test_mi_identical_graphs_is_inf(K3):
    a = represent(K3)
    cfg = SamplingConfig(samples=500, coupling=Coupling.COMMON_SOURCE)
    with pytest.warns(DegenerateJoint):
        assert mutual_information(a, a, cfg, 0) == math.inf


def test_mi_independent_coupling_is_small():
    rng = np.random.default_rng(1)
    a = represent(random_connected_graph(6, rng))
    b = represent(random_connected_graph(6, rng))
    cfg = SamplingConfig(samples=10_000, coupling=Coupling.INDEPENDENT)
    values = [mutual_information(a, b, cfg, s) for s in range(10)]
    assert abs(np.median(values)) <= 0.15


def test_mi_dimension_mismatch(P2, K3):
    with pytest.raises(DimensionMismatch):
        mutual_information(represent(P2), represent(K3), SamplingConfig(samples=100), 0)


def test_mi_dependent_graphs_is_positive():
    a = represent(path_graph(5))
    b = represent(validate(path_graph(5).weights * 1.2))
    assert mutual_information(a, b, SamplingConfig(samples=2000), 3) > 1.0


def test_fisher_examples(P2):
    base = represent(P2)
    one = FisherSetup((0.0,), (0,))
    assert fisher_matrix(one, base) == pytest.approx(np.array([[0.28125]]), abs=1e-12)
    assert fisher_quantity(one, base) == pytest.approx(0.28125, abs=1e-12)
    two = FisherSetup((0.0, 0.0), (0, 1))
    F = fisher_matrix(two, base)
    assert F[0, 1] == pytest.approx(0.03125, abs=1e-12)
    assert np.array_equal(F, F.T)
    assert fisher_quantity(two, base) == pytest.approx(0.5625, abs=1e-12)
    big = FisherSetup((1e6,), (0,))
    assert fisher_quantity(big, base) < 1e-11


def test_fisher_setup_contract(P2):
    with pytest.raises(BadSize):
        FisherSetup((1.0,), (0, 1))
    with pytest.raises(BadSize):
        FisherSetup((-1.0,), (0,))
    with pytest.raises(BadSize):
        FisherSetup((1.0, 1.0), (0, 0))
    base = gaussian_from_covariance([[1.0, 0.999], [0.999, 1.0]])
    bad = FisherSetup((0.0,), (0,))
    bad_cov = object.__new__(type(base))
    object.__setattr__(bad_cov, "covariance", np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(NotPositiveDefinite):
        fisher_matrix(bad, bad_cov)


def test_fisher_trace_form_and_symmetry():
    rng = np.random.default_rng(4)
    g = represent(random_connected_graph(12, rng))
    setup = FisherSetup(tuple(rng.uniform(0, 3, 5)), tuple(rng.choice(12, 5, replace=False)))
    F = fisher_matrix(setup, g)
    assert np.max(np.abs(F - fisher_matrix_trace_form(setup, g))) <= 1e-12
    assert np.max(np.abs(F - F.T)) <= 1e-12
    assert np.linalg.eigvalsh(F)[0] >= -1e-12


def _kl_hessian_check(base, setup, delta=1e-4):
    F = fisher_matrix(setup, base)
    C0 = gaussian_from_covariance(setup.perturbed(base.covariance))
    k = setup.k
    H = np.empty((k, k))
    # central differences of the KL divergence, whose Hessian at zero is F
    idx = np.asarray(setup.target_nodes)

    def kl_at(step):
        C = np.array(C0.covariance)
        C[idx, idx] += step
        return kl_divergence(C0, gaussian_from_covariance(C))

    for i in range(k):
        for j in range(k):
            ei = np.eye(k)[i] * delta
            ej = np.eye(k)[j] * delta
            H[i, j] = (kl_at(ei + ej) - kl_at(ei - ej) - kl_at(-ei + ej) + kl_at(-ei - ej)) / (4 * delta ** 2)
    return F, H


@pytest.mark.parametrize("graph,setup", [
    (path_graph(2), FisherSetup((0.0,), (0,))),
    (path_graph(2), FisherSetup((0.5, 0.2), (0, 1))),
    (complete_graph(3), FisherSetup((0.1, 0.3, 0.0), (0, 1, 2))),
])
def test_fisher_matches_kl_hessian(graph, setup):
    F, H = _kl_hessian_check(represent(graph), setup)
    assert np.max(np.abs(F - H)) <= 1e-3 * np.max(np.abs(F))


def test_random_partition_examples():
    firsts = {random_partition(2, 1, np.random.default_rng(s)).circ for s in range(200)}
    assert firsts == {(0,), (1,)}
    share = np.mean([random_partition(2, 1, np.random.default_rng(s)).circ == (0,) for s in range(400)])
    assert 0.4 < share < 0.6
    p = random_partition(10, 5, np.random.default_rng(0))
    assert len(p.circ) == 5 and not set(p.circ) & set(p.star) and set(p.circ) | set(p.star) == set(range(10))
    assert random_partition(10, 5, np.random.default_rng(7)) == random_partition(10, 5, np.random.default_rng(7))
    for k in (0, 10):
        with pytest.raises(BadSize):
            random_partition(10, k, np.random.default_rng(0))


def test_conditional_covariance_examples(P2, K3):
    assert conditional_covariance(represent(P2), Partition((0,), (1,))) == pytest.approx(np.array([[4 / 3]]))
    a = represent(K3)
    p = Partition((0,), (1, 2))
    C = conditional_covariance(a, p)
    S = a.covariance
    oracle = S[1:, 1:] - np.outer(S[1:, 0], S[0, 1:]) / S[0, 0]
    assert np.allclose(C, oracle, atol=1e-12) and np.linalg.det(C) > 0

    # nearly independent coordinate: conditioning barely changes its variance
    cov = np.eye(4) + 0.5 * (np.ones((4, 4)) - np.eye(4))
    cov[3, :3] = cov[:3, 3] = 1e-6
    g = gaussian_from_covariance(cov)
    cond = conditional_covariance(g, Partition((0, 1, 2), (3,)))
    assert cond[0, 0] == pytest.approx(g.covariance[3, 3], rel=1e-9)


def test_weakly_attached_node_is_still_predictable():
    # the shared J/n component ties every coordinate of L + J/n together
    W = complete_graph(4).weights.copy()
    W[3, :3] = W[:3, 3] = 1e-6
    g = represent(validate(W))
    cond = conditional_covariance(g, Partition((0, 1, 2), (3,)))
    assert cond[0, 0] < 1e-4 * g.covariance[3, 3]


def test_conditioning_reduces_generalized_variance():
    rng = np.random.default_rng(8)
    for _ in range(10):
        n = int(rng.integers(4, 25))
        a = represent(random_connected_graph(n, rng))
        p = random_partition(n, n // 2, rng)
        star = np.asarray(p.star)
        assert np.linalg.det(conditional_covariance(a, p)) <= np.linalg.det(a.covariance[np.ix_(star, star)]) + 1e-9


def test_conditional_entropy_spot_value(P2):
    value = conditional_entropy(represent(P2), Partition((0,), (1,)))
    assert value == pytest.approx(0.5 + 0.5 * math.log(2 * math.pi) + 0.5 * math.log(2 / 1.5), abs=1e-12)
    assert value == pytest.approx(1.56278, abs=1e-5)


def test_causality_degenerate_for_identical_common_source(K3):
    a = represent(random_connected_graph(8, np.random.default_rng(0)))
    cfg = SamplingConfig(samples=500, coupling=Coupling.COMMON_SOURCE)
    with pytest.raises(DegenerateResiduals):
        granger(a, a, 3, cfg, 0)
    with pytest.raises(DegenerateResiduals):
        transfer_entropy(a, a, 3, cfg, 0)


def test_causality_means_are_partition_means():
    rng = np.random.default_rng(2)
    a = represent(random_connected_graph(10, rng))
    b = represent(random_connected_graph(10, rng))
    res = causality(a, b, 10, SamplingConfig(samples=1000), 5)
    assert len(res.granger_per_partition) == 10 and len(res.te_per_partition) == 10
    assert res.granger == float(np.mean(res.granger_per_partition))
    assert res.transfer_entropy == float(np.mean(res.te_per_partition))
    g, per = granger(a, b, 10, SamplingConfig(samples=1000), 5)
    assert per == res.granger_per_partition and g == res.granger
    t, per_t = transfer_entropy(a, b, 10, SamplingConfig(samples=1000), 5)
    assert per_t == res.te_per_partition and t == res.transfer_entropy


def test_causality_null_small_graph():
    rng = np.random.default_rng(3)
    a = represent(random_connected_graph(10, rng))
    b = represent(random_connected_graph(10, rng))
    cfg = SamplingConfig(samples=2000, coupling=Coupling.INDEPENDENT)
    results = [causality(a, b, 3, cfg, s) for s in range(10)]
    assert np.median([abs(r.granger) for r in results]) <= 0.2
    assert np.median([abs(r.transfer_entropy) for r in results]) <= 0.2


def test_causality_detects_coupled_source():
    a = represent(path_graph(6))
    b = represent(validate(path_graph(6).weights * 1.3))
    res = causality(a, b, 4, SamplingConfig(samples=2000), 1)
    assert res.granger > 0.5 and res.transfer_entropy > 0.25
    assert all(math.isfinite(v) for v in res.granger_per_partition + res.te_per_partition)


def test_causality_is_seed_deterministic():
    rng = np.random.default_rng(5)
    a = represent(random_connected_graph(8, rng))
    b = represent(random_connected_graph(8, rng))
    cfg = SamplingConfig(samples=400)
    assert causality(a, b, 3, cfg, 11) == causality(a, b, 3, cfg, 11)


def test_mi_warning_not_emitted_for_distinct_graphs():
    a = represent(path_graph(4))
    b = represent(complete_graph(4))
    with warnings.catch_warnings():
        warnings.simplefilter("error", DegenerateJoint)
        assert math.isfinite(mutual_information(a, b, SamplingConfig(samples=500), 0))
