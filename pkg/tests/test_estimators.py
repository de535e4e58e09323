import math

import numpy as np
import pytest

from netgauss.errors import TooFewSamples
from netgauss.estimators import corrected_entropy, kl_entropy, knn_search, ols_residual_covariance

GAUSS_1D = 0.5 * math.log(2 * math.pi * math.e)


def test_knn_search_examples():
    pts = np.array([0.0, 1.0, 3.0])
    for method in ("brute", "tree"):
        assert np.allclose(knn_search(pts, 1, method=method), [1, 1, 2])
        assert np.allclose(knn_search(pts, 2, method=method), [3, 2, 3])
    with pytest.raises(TooFewSamples):
        knn_search(pts, 3)


def test_knn_search_matches_rescan():
    X = np.random.default_rng(0).standard_normal((100, 2))
    D = np.sqrt(((X[:, None, :] - X[None, :, :]) ** 2).sum(-1))
    np.fill_diagonal(D, np.inf)
    ref = np.sort(D, axis=1)
    for k in (1, 3, 7):
        assert np.allclose(knn_search(X, k), ref[:, k - 1], atol=1e-12)
        assert np.allclose(knn_search(X, k, method="tree"), ref[:, k - 1], atol=1e-12)


def test_knn_search_float32_path():
    X = np.random.default_rng(1).standard_normal((300, 20))
    exact = knn_search(X, 3)
    fast = knn_search(X, 3, dtype=np.float32)
    assert np.allclose(fast, exact, rtol=1e-3)


def test_kl_entropy_examples():
    rng = np.random.default_rng(0)
    est = kl_entropy(rng.standard_normal(50_000), k=3)
    assert abs(est.value - GAUSS_1D) <= 0.05
    assert est.k == 3 and est.sample_count == 50_000 and not est.degenerate
    assert abs(kl_entropy(rng.uniform(size=50_000), k=3).value) <= 0.05
    dup = np.repeat(rng.standard_normal((50, 2)), 2, axis=0)
    assert kl_entropy(dup, k=1).degenerate
    with pytest.raises(TooFewSamples):
        kl_entropy(np.zeros((3, 1)), k=3)


def test_kl_entropy_permutation_invariant():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((500, 3))
    a = kl_entropy(X).value
    b = kl_entropy(X[rng.permutation(500)]).value
    assert a == pytest.approx(b, rel=0, abs=1e-12)


def test_kl_entropy_bias_shrinks_with_count():
    truth = 1 + math.log(2 * math.pi)
    errors = np.empty((10, 3))
    for s in range(10):
        rng = np.random.default_rng(100 + s)
        for j, count in enumerate((500, 5000, 50_000)):
            errors[s, j] = abs(kl_entropy(rng.standard_normal((count, 2))).value - truth)
    med = np.median(errors, axis=0)
    assert med[0] > med[1] > med[2]


def test_corrected_entropy_high_dimension():
    rng = np.random.default_rng(7)
    d = 30
    A = rng.standard_normal((d, d)) / math.sqrt(d)
    cov = A @ A.T + 0.5 * np.eye(d)
    X = rng.standard_normal((2000, d)) @ np.linalg.cholesky(cov).T
    truth = d / 2 * (1 + math.log(2 * math.pi)) + 0.5 * np.linalg.slogdet(cov)[1]
    assert abs(corrected_entropy(X).value - truth) <= 0.3
    # plain KL is far off at this dimension and sample size
    assert abs(kl_entropy(X).value - truth) > 1.0


def test_corrected_entropy_singular_is_degenerate():
    x = np.random.default_rng(0).standard_normal((200, 1))
    est = corrected_entropy(np.hstack([x, 2 * x]))
    assert est.degenerate and est.value == -math.inf


def test_ols_examples():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((500, 3))
    Y = 1.5 + X @ rng.standard_normal((3, 2))
    assert np.max(np.abs(ols_residual_covariance(Y, X).matrix)) <= 1e-8

    X = rng.standard_normal((100_000, 2))
    Y = rng.standard_normal((100_000, 2)) @ np.array([[1.0, 0.3], [0.0, 1.0]])
    R = ols_residual_covariance(Y, X).matrix
    C = np.cov(Y.T)
    assert np.all(np.abs(R - C) <= 0.03 * np.abs(C))

    x = rng.standard_normal((200, 1))
    res = ols_residual_covariance(rng.standard_normal((200, 1)), np.hstack([x, x]), ridge=1e-8)
    assert np.all(np.isfinite(res.matrix)) and res.ridge_used == 1e-8


def test_ols_contract():
    rng = np.random.default_rng(1)
    with pytest.raises(TooFewSamples):
        ols_residual_covariance(rng.standard_normal((3, 1)), rng.standard_normal((3, 2)))
    res = ols_residual_covariance(rng.standard_normal((50, 2)), rng.standard_normal((50, 4)))
    assert np.allclose(res.matrix, res.matrix.T, atol=1e-10)
    assert np.linalg.eigvalsh(res.matrix)[0] >= -1e-8


def test_ols_cannot_increase_generalized_variance():
    rng = np.random.default_rng(2)
    for _ in range(10):
        Y = rng.standard_normal((400, 3))
        X = rng.standard_normal((400, 4)) + 0.3 * Y[:, :1]
        R = ols_residual_covariance(Y, X).matrix
        Yc = Y - Y.mean(axis=0)
        # same count - q - 1 normalisation for both sides
        C = Yc.T @ Yc / (400 - 4 - 1)
        assert np.linalg.det(R) <= np.linalg.det(C) + 1e-6
