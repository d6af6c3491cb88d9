"""Multilayer perceptron: ReLU hidden layers, softmax output, mini-batch SGD."""

from __future__ import annotations

import numpy as np

from .linear import _softmax


class MlpClassifier:
    def __init__(
        self,
        hidden: tuple = (32,),
        epochs: int = 200,
        lr: float = 0.05,
        batch_size: int = 32,
        l2: float = 0.0,
        seed: int = 0,
    ):
        hidden = tuple(int(h) for h in hidden)
        if not hidden or any(h < 1 for h in hidden):
            raise ValueError(f"hidden layers must be non-empty positive ints, got {hidden}")
        if epochs < 1 or lr <= 0 or batch_size < 1 or l2 < 0:
            raise ValueError("epochs >= 1, lr > 0, batch_size >= 1, l2 >= 0 required")
        self.hidden = hidden
        self.epochs = epochs
        self.lr = lr
        self.batch_size = batch_size
        self.l2 = l2
        self.seed = seed

    def fit(self, X, y_idx, n_classes):
        rng = np.random.default_rng(self.seed)
        sizes = [X.shape[1], *self.hidden, n_classes]
        self._w = [
            rng.normal(0.0, np.sqrt(2.0 / sizes[i]), size=(sizes[i], sizes[i + 1]))
            for i in range(len(sizes) - 1)
        ]
        self._b = [np.zeros(sizes[i + 1]) for i in range(len(sizes) - 1)]
        onehot = np.eye(n_classes)[y_idx]
        n = X.shape[0]
        for _ in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                batch = order[start : start + self.batch_size]
                self._step(X[batch], onehot[batch])
        return self

    def _step(self, xb, yb):
        acts = [xb]
        for i in range(len(self._w) - 1):
            acts.append(np.maximum(acts[-1] @ self._w[i] + self._b[i], 0.0))
        p = _softmax(acts[-1] @ self._w[-1] + self._b[-1])
        delta = (p - yb) / len(xb)
        for i in range(len(self._w) - 1, -1, -1):
            gw = acts[i].T @ delta + self.l2 * self._w[i]
            gb = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self._w[i].T) * (acts[i] > 0)
            self._w[i] -= self.lr * gw
            self._b[i] -= self.lr * gb

    def _forward(self, X) -> np.ndarray:
        act = X
        for i in range(len(self._w) - 1):
            act = np.maximum(act @ self._w[i] + self._b[i], 0.0)
        return act @ self._w[-1] + self._b[-1]

    def predict_scores(self, X) -> np.ndarray:
        return _softmax(self._forward(X))

    def predict_idx(self, X) -> np.ndarray:
        return np.argmax(self._forward(X), axis=1)
