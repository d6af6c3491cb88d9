"""Gaussian NB, Bernoulli NB, and quadratic discriminant analysis."""

from __future__ import annotations

import numpy as np


def _normalize_log_posteriors(log_post: np.ndarray) -> np.ndarray:
    shifted = log_post - log_post.max(axis=1, keepdims=True)
    p = np.exp(shifted)
    return p / p.sum(axis=1, keepdims=True)


class GaussianNaiveBayes:
    def __init__(self, var_floor: float = 1e-9, seed: int = 0):
        if var_floor <= 0:
            raise ValueError("var_floor must be > 0")
        self.var_floor = var_floor

    def fit(self, X, y_idx, n_classes):
        self._mean = np.zeros((n_classes, X.shape[1]))
        self._var = np.zeros_like(self._mean)
        self._log_prior = np.zeros(n_classes)
        for c in range(n_classes):
            xc = X[y_idx == c]
            self._mean[c] = xc.mean(axis=0)
            self._var[c] = np.maximum(xc.var(axis=0), self.var_floor)
            self._log_prior[c] = np.log(len(xc) / len(X))
        return self

    def _log_posterior(self, X) -> np.ndarray:
        out = np.empty((X.shape[0], len(self._log_prior)))
        for c in range(len(self._log_prior)):
            diff = X - self._mean[c]
            out[:, c] = self._log_prior[c] - 0.5 * (
                np.log(2 * np.pi * self._var[c]) + diff**2 / self._var[c]
            ).sum(axis=1)
        return out

    def predict_scores(self, X) -> np.ndarray:
        return _normalize_log_posteriors(self._log_posterior(X))

    def predict_idx(self, X) -> np.ndarray:
        return np.argmax(self._log_posterior(X), axis=1)


class BernoulliNaiveBayes:
    """Features are min-max scaled on the training data and binarized at 0.5."""

    def __init__(self, alpha: float = 1.0, seed: int = 0):
        if alpha <= 0:
            raise ValueError("alpha must be > 0")
        self.alpha = alpha

    def _binarize(self, X) -> np.ndarray:
        span = np.where(self._span == 0, 1.0, self._span)
        return ((X - self._min) / span) > 0.5

    def fit(self, X, y_idx, n_classes):
        self._min = X.min(axis=0)
        self._span = X.max(axis=0) - self._min
        xb = self._binarize(X)
        self._log_prior = np.zeros(n_classes)
        self._feature_logp = np.zeros((n_classes, X.shape[1]))
        self._feature_logq = np.zeros((n_classes, X.shape[1]))
        for c in range(n_classes):
            xc = xb[y_idx == c]
            theta = (xc.sum(axis=0) + self.alpha) / (len(xc) + 2 * self.alpha)
            self._feature_logp[c] = np.log(theta)
            self._feature_logq[c] = np.log1p(-theta)
            self._log_prior[c] = np.log(len(xc) / len(X))
        return self

    def _log_posterior(self, X) -> np.ndarray:
        xb = self._binarize(X)
        return (
            self._log_prior
            + xb @ self._feature_logp.T
            + (~xb) @ self._feature_logq.T
        )

    def predict_scores(self, X) -> np.ndarray:
        return _normalize_log_posteriors(self._log_posterior(X))

    def predict_idx(self, X) -> np.ndarray:
        return np.argmax(self._log_posterior(X), axis=1)


class QuadraticDiscriminant:
    def __init__(self, ridge: float = 1e-6, seed: int = 0):
        if ridge < 0:
            raise ValueError("ridge must be >= 0")
        self.ridge = ridge

    def fit(self, X, y_idx, n_classes):
        d = X.shape[1]
        self._mean = np.zeros((n_classes, d))
        self._prec = np.zeros((n_classes, d, d))
        self._log_det = np.zeros(n_classes)
        self._log_prior = np.zeros(n_classes)
        for c in range(n_classes):
            xc = X[y_idx == c]
            self._mean[c] = xc.mean(axis=0)
            if len(xc) > 1:
                cov = np.cov(xc, rowvar=False).reshape(d, d)
            else:
                cov = np.zeros((d, d))
            cov = cov + self.ridge * np.eye(d)
            sign, logdet = np.linalg.slogdet(cov)
            if sign <= 0:
                cov = cov + 1e-6 * np.eye(d)
                _, logdet = np.linalg.slogdet(cov)
            self._prec[c] = np.linalg.inv(cov)
            self._log_det[c] = logdet
            self._log_prior[c] = np.log(len(xc) / len(X))
        return self

    def _log_posterior(self, X) -> np.ndarray:
        out = np.empty((X.shape[0], len(self._log_prior)))
        for c in range(len(self._log_prior)):
            diff = X - self._mean[c]
            quad = np.einsum("ij,jk,ik->i", diff, self._prec[c], diff)
            out[:, c] = self._log_prior[c] - 0.5 * (self._log_det[c] + quad)
        return out

    def predict_scores(self, X) -> np.ndarray:
        return _normalize_log_posteriors(self._log_posterior(X))

    def predict_idx(self, X) -> np.ndarray:
        return np.argmax(self._log_posterior(X), axis=1)
