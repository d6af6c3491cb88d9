"""Gradient-descent logistic regression and subgradient linear SVM."""

from __future__ import annotations

import numpy as np


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


class LogisticRegressionGD:
    """Multinomial logistic regression, full-batch gradient descent, L2 penalty."""

    def __init__(
        self,
        lr: float = 0.5,
        l2: float = 1e-4,
        max_iter: int = 500,
        tol: float = 1e-6,
        seed: int = 0,
    ):
        if lr <= 0 or max_iter < 1 or l2 < 0:
            raise ValueError("lr must be > 0, max_iter >= 1, l2 >= 0")
        self.lr = lr
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y_idx, n_classes):
        n, d = X.shape
        onehot = np.eye(n_classes)[y_idx]
        self._w = np.zeros((d, n_classes))
        self._b = np.zeros(n_classes)
        for _ in range(self.max_iter):
            p = _softmax(X @ self._w + self._b)
            g = (p - onehot) / n
            gw = X.T @ g + self.l2 * self._w
            gb = g.sum(axis=0)
            if max(np.abs(gw).max(), np.abs(gb).max()) < self.tol:
                break
            self._w -= self.lr * gw
            self._b -= self.lr * gb
        return self

    def predict_scores(self, X) -> np.ndarray:
        return _softmax(X @ self._w + self._b)

    def predict_idx(self, X) -> np.ndarray:
        return np.argmax(X @ self._w + self._b, axis=1)


class LinearSvmSubgradient:
    """One-vs-rest linear SVM: hinge loss + L2, full-batch subgradient descent."""

    def __init__(self, lr: float = 0.1, l2: float = 1e-3, max_iter: int = 500, seed: int = 0):
        if lr <= 0 or max_iter < 1 or l2 < 0:
            raise ValueError("lr must be > 0, max_iter >= 1, l2 >= 0")
        self.lr = lr
        self.l2 = l2
        self.max_iter = max_iter

    def fit(self, X, y_idx, n_classes):
        n, d = X.shape
        self._w = np.zeros((d, n_classes))
        self._b = np.zeros(n_classes)
        for c in range(n_classes):
            sign = np.where(y_idx == c, 1.0, -1.0)
            w = np.zeros(d)
            b = 0.0
            for _ in range(self.max_iter):
                margins = sign * (X @ w + b)
                viol = margins < 1
                gw = self.l2 * w - (sign[viol, None] * X[viol]).sum(axis=0) / n
                gb = -sign[viol].sum() / n
                w -= self.lr * gw
                b -= self.lr * gb
            self._w[:, c] = w
            self._b[c] = b
        return self

    def predict_scores(self, X) -> np.ndarray:
        """Raw one-vs-rest margins (not probabilities)."""
        return X @ self._w + self._b

    def predict_idx(self, X) -> np.ndarray:
        return np.argmax(self.predict_scores(X), axis=1)
