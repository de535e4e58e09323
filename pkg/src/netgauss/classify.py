"""Gaussian naive Bayes and logistic regression on metric-feature rows."""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .errors import DegenerateSplit

VAR_FLOOR = 1e-9
L2 = 1e-4
LOGISTIC_STEPS = 500
LOGISTIC_RATE = 0.5


def stratified_split(labels, proportion: float, rng: np.random.Generator):
    """Train/test index arrays keeping each class's share near ``proportion``.

    Every class with at least two members contributes at least one row to
    each side.
    """
    y = np.asarray(labels)
    if not 0 < proportion < 1:
        raise ValueError("training proportion must lie in (0, 1)")
    train, test = [], []
    for c in np.unique(y):
        idx = rng.permutation(np.flatnonzero(y == c))
        take = int(round(proportion * len(idx)))
        if len(idx) >= 2:
            take = min(max(take, 1), len(idx) - 1)
        train.extend(idx[:take].tolist())
        test.extend(idx[take:].tolist())
    return np.sort(np.array(train, dtype=int)), np.sort(np.array(test, dtype=int))


def f1_score(y_true, y_pred, positive=1) -> float:
    y_true = np.asarray(y_true) == positive
    y_pred = np.asarray(y_pred) == positive
    tp = np.count_nonzero(y_true & y_pred)
    denom = np.count_nonzero(y_true) + np.count_nonzero(y_pred)
    return 2.0 * tp / denom if denom else 0.0


def majority_baseline_f1(labels, positive=1) -> float:
    """F1 of predicting the majority class for every item."""
    y = np.asarray(labels)
    values, counts = np.unique(y, return_counts=True)
    majority = values[np.argmax(counts)]
    return f1_score(y, np.full_like(y, majority), positive)


def _check_train(y):
    if len(np.unique(y)) < 2:
        raise DegenerateSplit("training split contains a single class")


class GaussianNB:
    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        _check_train(y)
        self.classes_ = np.unique(y)
        self.mean_ = np.array([X[y == c].mean(axis=0) for c in self.classes_])
        self.var_ = np.array([X[y == c].var(axis=0) for c in self.classes_]) + VAR_FLOOR
        self.log_prior_ = np.log(np.array([np.mean(y == c) for c in self.classes_]))
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        ll = -0.5 * (np.log(2 * np.pi * self.var_)[None] +
                     (X[:, None, :] - self.mean_[None]) ** 2 / self.var_[None]).sum(axis=2)
        return self.classes_[np.argmax(ll + self.log_prior_, axis=1)]


class LogisticRegression:
    """Binary logistic regression by full-batch gradient descent.

    Features are standardised with training statistics; the L2 penalty
    applies to the weights, not the intercept.
    """

    def __init__(self, l2: float = L2, steps: int = LOGISTIC_STEPS, rate: float = LOGISTIC_RATE):
        self.l2, self.steps, self.rate = l2, steps, rate

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        _check_train(y)
        self.classes_ = np.unique(y)
        if len(self.classes_) != 2:
            raise DegenerateSplit("logistic classifier needs exactly two classes")
        t = (y == self.classes_[1]).astype(float)
        self.mu_ = X.mean(axis=0)
        self.sd_ = X.std(axis=0)
        self.sd_[self.sd_ == 0] = 1.0
        Z = (X - self.mu_) / self.sd_
        w = np.zeros(Z.shape[1])
        b = 0.0
        m = len(t)
        for _ in range(self.steps):
            err = expit(Z @ w + b) - t
            w -= self.rate * (Z.T @ err / m + self.l2 * w)
            b -= self.rate * err.mean()
        self.w_, self.b_ = w, b
        return self

    def predict(self, X):
        Z = (np.asarray(X, dtype=float) - self.mu_) / self.sd_
        return np.where(Z @ self.w_ + self.b_ > 0, self.classes_[1], self.classes_[0])


def _classify(model, features, labels, proportion, seed, positive=1) -> float:
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train, test = stratified_split(y, proportion, rng)
    model.fit(X[train], y[train])
    return f1_score(y[test], model.predict(X[test]), positive)


def classify_nb(features, labels, proportion: float, seed: int, positive=1) -> float:
    """F1 (positive class) of Gaussian naive Bayes on a stratified split."""
    return _classify(GaussianNB(), features, labels, proportion, seed, positive)


def classify_logistic(features, labels, proportion: float, seed: int, positive=1) -> float:
    """F1 (positive class) of L2 logistic regression on a stratified split."""
    return _classify(LogisticRegression(), features, labels, proportion, seed, positive)
