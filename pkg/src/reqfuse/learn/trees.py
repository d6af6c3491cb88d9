"""Tree-based classifiers: CART decision tree, random forest, AdaBoost (SAMME),
and softmax gradient boosting over small regression trees."""

from __future__ import annotations

import numpy as np


def _class_counts(y_idx, n_classes) -> np.ndarray:
    return np.bincount(y_idx, minlength=n_classes).astype(float)


def _split_feature(x_col, y_idx, n_classes, min_leaf):
    """Best Gini split on one feature column; returns (score, threshold) or None."""
    n = len(y_idx)
    order = np.argsort(x_col, kind="stable")
    xs = x_col[order]
    ys = y_idx[order]
    boundaries = np.nonzero(xs[:-1] < xs[1:])[0]
    if len(boundaries) == 0:
        return None
    left = np.cumsum(np.eye(n_classes)[ys], axis=0)  # (n, K)
    total = left[-1]
    nl = boundaries + 1.0
    nr = n - nl
    valid = (nl >= min_leaf) & (nr >= min_leaf)
    if not valid.any():
        return None
    lcounts = left[boundaries]
    rcounts = total - lcounts
    gini_l = 1.0 - ((lcounts / nl[:, None]) ** 2).sum(axis=1)
    gini_r = 1.0 - ((rcounts / nr[:, None]) ** 2).sum(axis=1)
    weighted = (nl * gini_l + nr * gini_r) / n
    weighted[~valid] = np.inf
    i = int(np.argmin(weighted))
    b = boundaries[i]
    return float(weighted[i]), float((xs[b] + xs[b + 1]) / 2.0)


class _TreeNode:
    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, feature=None, threshold=None, left=None, right=None, value=None):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.value = value  # leaf: class-probability vector


class DecisionTreeClassifier:
    def __init__(
        self,
        max_depth: int | None = None,
        min_samples_split: int = 2,
        min_samples_leaf: int = 1,
        max_features: str | int | None = None,
        seed: int = 0,
    ):
        if max_depth is not None and max_depth < 1:
            raise ValueError("max_depth must be >= 1 or None")
        if min_samples_split < 2 or min_samples_leaf < 1:
            raise ValueError("min_samples_split >= 2 and min_samples_leaf >= 1 required")
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.seed = seed

    def _candidate_features(self, d, rng):
        if self.max_features is None:
            return np.arange(d)
        m = self.max_features
        if m == "sqrt":
            m = max(1, int(np.sqrt(d)))
        m = min(int(m), d)
        return np.sort(rng.choice(d, size=m, replace=False))

    def fit(self, X, y_idx, n_classes):
        self._n_classes = n_classes
        rng = np.random.default_rng(self.seed)
        self._root = self._grow(X, y_idx, depth=0, rng=rng)
        return self

    def _leaf(self, y_idx) -> _TreeNode:
        counts = _class_counts(y_idx, self._n_classes)
        return _TreeNode(value=counts / counts.sum())

    def _grow(self, X, y_idx, depth, rng) -> _TreeNode:
        if (
            (self.max_depth is not None and depth >= self.max_depth)
            or len(y_idx) < self.min_samples_split
            or len(np.unique(y_idx)) == 1
        ):
            return self._leaf(y_idx)
        best = None
        for j in self._candidate_features(X.shape[1], rng):
            found = _split_feature(X[:, j], y_idx, self._n_classes, self.min_samples_leaf)
            if found is not None and (best is None or found[0] < best[0]):
                best = (found[0], int(j), found[1])
        if best is None:
            return self._leaf(y_idx)
        _, feature, threshold = best
        mask = X[:, feature] <= threshold
        return _TreeNode(
            feature=feature,
            threshold=threshold,
            left=self._grow(X[mask], y_idx[mask], depth + 1, rng),
            right=self._grow(X[~mask], y_idx[~mask], depth + 1, rng),
        )

    def _row_probs(self, row) -> np.ndarray:
        node = self._root
        while node.value is None:
            node = node.left if row[node.feature] <= node.threshold else node.right
        return node.value

    def predict_scores(self, X) -> np.ndarray:
        return np.stack([self._row_probs(row) for row in X])

    def predict_idx(self, X) -> np.ndarray:
        return np.argmax(self.predict_scores(X), axis=1)


class RandomForestClassifier:
    """Bagged CART trees with per-split feature sampling, averaged leaf distributions."""

    def __init__(
        self,
        n_trees: int = 50,
        max_depth: int | None = 12,
        min_samples_split: int = 2,
        min_samples_leaf: int = 1,
        max_features: str | int | None = "sqrt",
        bootstrap: bool = True,
        seed: int = 0,
    ):
        if n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.seed = seed

    def fit(self, X, y_idx, n_classes):
        self._n_classes = n_classes
        self._trees = []
        n = X.shape[0]
        # One tree with bootstrap/sampling disabled is exactly a DT with the same seed.
        seeds = [self.seed] if self.n_trees == 1 else [
            int(s.generate_state(1)[0] % (2**31))
            for s in np.random.SeedSequence(self.seed).spawn(self.n_trees)
        ]
        for t in range(self.n_trees):
            rng = np.random.default_rng(seeds[t])
            idx = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = DecisionTreeClassifier(
                max_depth=self.max_depth,
                min_samples_split=self.min_samples_split,
                min_samples_leaf=self.min_samples_leaf,
                max_features=self.max_features,
                seed=seeds[t],
            )
            tree.fit(X[idx], y_idx[idx], n_classes)
            self._trees.append(tree)
        return self

    def predict_scores(self, X) -> np.ndarray:
        return np.mean([t.predict_scores(X) for t in self._trees], axis=0)

    def predict_idx(self, X) -> np.ndarray:
        return np.argmax(self.predict_scores(X), axis=1)


def _fit_stump(X, y_idx, w, n_classes):
    """Weighted decision stump minimizing misclassification weight."""
    n, d = X.shape
    onehot_w = w[:, None] * np.eye(n_classes)[y_idx]
    best = None  # (err, feature, threshold, left_class, right_class)
    for j in range(d):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        cum = np.cumsum(onehot_w[order], axis=0)  # (n, K)
        total = cum[-1]
        boundaries = np.nonzero(xs[:-1] < xs[1:])[0]
        if len(boundaries) == 0:
            continue
        lw = cum[boundaries]
        rw = total - lw
        lbest = np.argmax(lw, axis=1)
        rbest = np.argmax(rw, axis=1)
        correct = lw[np.arange(len(boundaries)), lbest] + rw[np.arange(len(boundaries)), rbest]
        err = w.sum() - correct
        i = int(np.argmin(err))
        if best is None or err[i] < best[0]:
            b = boundaries[i]
            best = (
                float(err[i]),
                j,
                float((xs[b] + xs[b + 1]) / 2.0),
                int(lbest[i]),
                int(rbest[i]),
            )
    if best is None:  # all features constant
        c = int(np.argmax(onehot_w.sum(axis=0)))
        return (float(w.sum() - onehot_w.sum(axis=0)[c]), 0, -np.inf, c, c)
    return best


class AdaBoostSamme:
    def __init__(self, n_rounds: int = 50, seed: int = 0):
        if n_rounds < 1:
            raise ValueError("n_rounds must be >= 1")
        self.n_rounds = n_rounds

    def fit(self, X, y_idx, n_classes):
        self._n_classes = n_classes
        n = X.shape[0]
        w = np.full(n, 1.0 / n)
        self._stumps: list[tuple] = []
        self._alphas: list[float] = []
        for _ in range(self.n_rounds):
            err, feature, threshold, lc, rc = _fit_stump(X, y_idx, w, n_classes)
            pred = np.where(X[:, feature] <= threshold, lc, rc)
            miss = pred != y_idx
            err = float(w[miss].sum())
            if err >= 1.0 - 1.0 / n_classes:  # no better than random
                break
            err = max(err, 1e-12)
            alpha = np.log((1 - err) / err) + np.log(n_classes - 1)
            self._stumps.append((feature, threshold, lc, rc))
            self._alphas.append(alpha)
            if not miss.any():
                break
            w = w * np.exp(alpha * miss)
            w /= w.sum()
        if not self._stumps:  # degenerate data: fall back to the majority class
            c = int(np.argmax(_class_counts(y_idx, n_classes)))
            self._stumps.append((0, -np.inf, c, c))
            self._alphas.append(1.0)
        return self

    def _weighted_votes(self, X) -> np.ndarray:
        votes = np.zeros((X.shape[0], self._n_classes))
        for (feature, threshold, lc, rc), alpha in zip(self._stumps, self._alphas):
            pred = np.where(X[:, feature] <= threshold, lc, rc)
            votes[np.arange(len(pred)), pred] += alpha
        return votes

    def predict_scores(self, X) -> np.ndarray:
        votes = self._weighted_votes(X)
        return votes / sum(self._alphas)

    def predict_idx(self, X) -> np.ndarray:
        return np.argmax(self._weighted_votes(X), axis=1)


class _RegressionTree:
    """Depth-capped least-squares tree; exposes leaf membership for boosting updates."""

    def __init__(self, max_depth=3, min_samples_leaf=1):
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf

    def fit(self, X, targets):
        self._nodes = []  # (feature, threshold, left_node, right_node) or ("leaf", leaf_id)
        self.leaf_samples: list[np.ndarray] = []
        self.leaf_values: list[float] = []
        self._root = self._grow(X, targets, np.arange(X.shape[0]), depth=0)
        return self

    def _make_leaf(self, targets, idx) -> int:
        self.leaf_samples.append(idx)
        self.leaf_values.append(float(targets.mean()) if len(targets) else 0.0)
        node_id = len(self._nodes)
        self._nodes.append(("leaf", len(self.leaf_samples) - 1))
        return node_id

    def _grow(self, X, targets, idx, depth) -> int:
        if depth >= self.max_depth or len(targets) < 2 * self.min_samples_leaf or np.ptp(targets) == 0:
            return self._make_leaf(targets, idx)
        best = None  # (sse, feature, threshold)
        n = len(targets)
        for j in range(X.shape[1]):
            order = np.argsort(X[:, j], kind="stable")
            xs = X[order, j]
            ts = targets[order]
            boundaries = np.nonzero(xs[:-1] < xs[1:])[0]
            if len(boundaries) == 0:
                continue
            csum = np.cumsum(ts)
            csq = np.cumsum(ts**2)
            nl = boundaries + 1.0
            nr = n - nl
            valid = (nl >= self.min_samples_leaf) & (nr >= self.min_samples_leaf)
            if not valid.any():
                continue
            sl = csum[boundaries]
            sr = csum[-1] - sl
            ql = csq[boundaries]
            qr = csq[-1] - ql
            sse = (ql - sl**2 / nl) + (qr - sr**2 / nr)
            sse[~valid] = np.inf
            i = int(np.argmin(sse))
            if np.isfinite(sse[i]) and (best is None or sse[i] < best[0]):
                b = boundaries[i]
                best = (float(sse[i]), j, float((xs[b] + xs[b + 1]) / 2.0))
        if best is None:
            return self._make_leaf(targets, idx)
        _, feature, threshold = best
        mask = X[:, feature] <= threshold
        node_id = len(self._nodes)
        self._nodes.append(None)  # reserve slot before children exist
        left = self._grow(X[mask], targets[mask], idx[mask], depth + 1)
        right = self._grow(X[~mask], targets[~mask], idx[~mask], depth + 1)
        self._nodes[node_id] = (feature, threshold, left, right)
        return node_id

    def apply(self, X) -> np.ndarray:
        out = np.empty(X.shape[0], dtype=int)
        for i, row in enumerate(X):
            node = self._nodes[self._root]
            while node[0] != "leaf":
                feature, threshold, left, right = node
                node = self._nodes[left] if row[feature] <= threshold else self._nodes[right]
            out[i] = node[1]
        return out

    def predict(self, X, values=None) -> np.ndarray:
        values = self.leaf_values if values is None else values
        return np.array([values[leaf] for leaf in self.apply(X)])


class GradientBoostingClassifier:
    """Softmax gradient boosting with shrinkage; records train log-loss per round."""

    def __init__(
        self,
        n_rounds: int = 100,
        lr: float = 0.1,
        max_depth: int = 3,
        min_samples_leaf: int = 1,
        seed: int = 0,
    ):
        if n_rounds < 1 or lr <= 0 or max_depth < 1:
            raise ValueError("n_rounds >= 1, lr > 0, max_depth >= 1 required")
        self.n_rounds = n_rounds
        self.lr = lr
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf

    def fit(self, X, y_idx, n_classes):
        from .linear import _softmax

        self._n_classes = n_classes
        n = X.shape[0]
        onehot = np.eye(n_classes)[y_idx]
        f = np.zeros((n, n_classes))
        self._rounds: list[list[tuple[_RegressionTree, list[float]]]] = []
        self.train_log_loss: list[float] = []
        for _ in range(self.n_rounds):
            p = _softmax(f)
            round_trees = []
            for c in range(n_classes):
                residual = onehot[:, c] - p[:, c]
                tree = _RegressionTree(self.max_depth, self.min_samples_leaf).fit(X, residual)
                gammas = []
                for leaf_idx in tree.leaf_samples:
                    r = residual[leaf_idx]
                    denom = np.abs(r) * (1 - np.abs(r))
                    gamma = ((n_classes - 1) / n_classes) * r.sum() / max(denom.sum(), 1e-12)
                    gammas.append(float(gamma))
                f[:, c] += self.lr * tree.predict(X, gammas)
                round_trees.append((tree, gammas))
            self._rounds.append(round_trees)
            p = _softmax(f)
            self.train_log_loss.append(
                float(-np.log(np.clip(p[np.arange(n), y_idx], 1e-15, None)).mean())
            )
        return self

    def _raw(self, X) -> np.ndarray:
        f = np.zeros((X.shape[0], self._n_classes))
        for round_trees in self._rounds:
            for c, (tree, gammas) in enumerate(round_trees):
                f[:, c] += self.lr * tree.predict(X, gammas)
        return f

    def predict_scores(self, X) -> np.ndarray:
        from .linear import _softmax

        return _softmax(self._raw(X))

    def predict_idx(self, X) -> np.ndarray:
        return np.argmax(self._raw(X), axis=1)
