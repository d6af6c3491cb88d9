"""k-nearest-neighbors classifier (Euclidean metric)."""

from __future__ import annotations

import numpy as np


class KNearestNeighbors:
    def __init__(self, k: int = 5, seed: int = 0):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        self.k = k

    def fit(self, X, y_idx, n_classes):
        self._X = X
        self._y = y_idx
        self._n_classes = n_classes
        return self

    def _votes(self, X) -> np.ndarray:
        k = min(self.k, len(self._X))
        votes = np.zeros((X.shape[0], self._n_classes))
        for i, row in enumerate(X):
            d = ((self._X - row) ** 2).sum(axis=1)
            # ties at the boundary resolve toward the lower label index
            order = np.lexsort((np.arange(len(d)), self._y, d))
            np.add.at(votes[i], self._y[order[:k]], 1.0)
        return votes / k

    def predict_scores(self, X) -> np.ndarray:
        return self._votes(X)

    def predict_idx(self, X) -> np.ndarray:
        return np.argmax(self._votes(X), axis=1)
