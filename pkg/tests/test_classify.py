import numpy as np
import pytest

from netgauss.classify import (classify_logistic, classify_nb, f1_score, majority_baseline_f1,
                               stratified_split)
from netgauss.errors import DegenerateSplit


def _blobs(seed, n=100, gap=8.0):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.standard_normal((n, 3)), rng.standard_normal((n, 3)) + gap])
    y = np.repeat([0, 1], n)
    return X, y


def test_f1_and_baseline():
    assert f1_score([1, 1, 0, 0], [1, 0, 0, 0]) == pytest.approx(2 / 3)
    assert f1_score([0, 0], [0, 0]) == 0
    assert majority_baseline_f1([1, 1, 1, 0]) == pytest.approx(2 * 3 / (3 + 4))
    assert majority_baseline_f1([0, 0, 0, 1]) == 0


def test_stratified_split_keeps_classes():
    y = np.array([0] * 30 + [1] * 70)
    train, test = stratified_split(y, 0.1, np.random.default_rng(0))
    assert not set(train) & set(test) and len(train) + len(test) == 100
    assert np.count_nonzero(y[train] == 0) == 3 and np.count_nonzero(y[train] == 1) == 7


def test_blobs_are_separated():
    X, y = _blobs(0)
    for p in (0.2, 0.5, 0.8):
        assert classify_nb(X, y, p, 1) >= 0.99
        assert classify_logistic(X, y, p, 1) >= 0.99


def test_shuffled_labels_near_baseline():
    X, y = _blobs(1, gap=0.0)
    rng = np.random.default_rng(2)
    y = rng.permutation(np.r_[np.zeros(60, int), np.ones(140, int)])
    base = majority_baseline_f1(y)
    scores = [classify_nb(X, rng.permutation(y), 0.5, s) for s in range(20)]
    assert abs(np.median(scores) - base) <= 0.15


def test_single_class_split():
    X = np.random.default_rng(0).standard_normal((10, 2))
    with pytest.raises(DegenerateSplit):
        classify_nb(X, np.ones(10, int), 0.5, 0)
    with pytest.raises(DegenerateSplit):
        classify_logistic(X, np.ones(10, int), 0.5, 0)


def test_classifiers_are_deterministic():
    X, y = _blobs(3, gap=1.0)
    assert classify_nb(X, y, 0.3, 5) == classify_nb(X, y, 0.3, 5)
    assert classify_logistic(X, y, 0.3, 5) == classify_logistic(X, y, 0.3, 5)
