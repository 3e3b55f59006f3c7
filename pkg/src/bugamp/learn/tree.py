"""CART decision trees and a bootstrap forest, weighted Gini throughout.

Split candidates are the midpoints between consecutive distinct values of
a feature, scanned with cumulative sums so each (node, feature) pass is a
single vectorized sweep.  Ties go to the first candidate in scan order
(features by index, thresholds ascending), which keeps refits bit-stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateData
from ..rng import derive_seed
from .linear import balanced_weights


@dataclass
class _Node:
    feature: int = -1          # -1 marks a leaf
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    prob: float = 0.0          # class-1 weighted frequency at this node


try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an optional speedup
    njit = None


def _split_scan(xs, ys, ws):
    """Scan sorted feature values for the minimum weighted child Gini.
    Returns (score, midpoint) or (inf, 0) for a constant feature."""
    n = len(xs)
    w_tot = 0.0
    w1_tot = 0.0
    for i in range(n):
        w_tot += ws[i]
        w1_tot += ws[i] * ys[i]
    best_score = np.inf
    best_mid = 0.0
    wl = 0.0
    w1l = 0.0
    for i in range(n - 1):
        wl += ws[i]
        w1l += ws[i] * ys[i]
        if xs[i] >= xs[i + 1]:
            continue
        wr = w_tot - wl
        w1r = w1_tot - w1l
        gini_l = 1.0 - (w1l / wl) ** 2 - ((wl - w1l) / wl) ** 2
        gini_r = 1.0 - (w1r / wr) ** 2 - ((wr - w1r) / wr) ** 2
        score = (wl * gini_l + wr * gini_r) / w_tot
        if score < best_score:
            best_score = score
            best_mid = (xs[i] + xs[i + 1]) / 2.0
    return best_score, best_mid


if njit is not None:
    _split_scan = njit(cache=True, fastmath=False)(_split_scan)


def best_split(Xf: np.ndarray, y: np.ndarray, w: np.ndarray
               ) -> tuple[float, float] | None:
    """Best threshold for one feature: (weighted child impurity, midpoint).
    None when the feature is constant on this node."""
    order = np.argsort(Xf)
    score, mid = _split_scan(np.ascontiguousarray(Xf[order]),
                             np.ascontiguousarray(y[order]),
                             np.ascontiguousarray(w[order]))
    if not np.isfinite(score):
        return None
    return float(score), float(mid)


class DecisionTree:
    """Binary CART classifier with Gini impurity and weighted counts."""

    def __init__(self, max_depth: int | None = None,
                 min_samples_split: int = 2, min_samples_leaf: int = 1,
                 max_features: int | str | None = None, seed: int = 0):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.seed = seed
        self.nodes: list[_Node] = []

    def _n_features_per_split(self, dim: int) -> int:
        mf = self.max_features
        if mf is None:
            return dim
        if mf == "sqrt":
            return max(1, int(math.sqrt(dim)))
        return min(int(mf), dim)

    def fit(self, X: np.ndarray, y: np.ndarray,
            sample_weight: np.ndarray | None = None) -> "DecisionTree":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, float)
        if len(np.unique(y)) > 1 and np.all(X == X[0]):
            raise DegenerateData("identical rows with mixed labels")
        rng = np.random.default_rng(self.seed)
        k = self._n_features_per_split(X.shape[1])
        self.nodes = []
        self._grow(X, y, w, np.arange(len(y)), 0, rng, k)
        return self

    def _grow(self, X, y, w, idx, depth, rng, k) -> int:
        node_id = len(self.nodes)
        wsub = w[idx]
        ysub = y[idx]
        w1 = float((wsub * ysub).sum())
        wt = float(wsub.sum())
        node = _Node(prob=w1 / wt)
        self.nodes.append(node)

        pure = w1 == 0.0 or w1 == wt
        too_deep = self.max_depth is not None and depth >= self.max_depth
        if pure or too_deep or len(idx) < self.min_samples_split:
            return node_id

        dim = X.shape[1]
        if k < dim:
            features = np.sort(rng.choice(dim, size=k, replace=False))
        else:
            features = np.arange(dim)
        best = None
        for f in features:
            found = best_split(X[idx, f], ysub, wsub)
            if found is None:
                continue
            score, thr = found
            if best is None or score < best[0]:
                best = (score, int(f), thr)
        if best is None:
            return node_id
        _, f, thr = best
        mask = X[idx, f] <= thr
        left_idx = idx[mask]
        right_idx = idx[~mask]
        if len(left_idx) < self.min_samples_leaf or len(right_idx) < self.min_samples_leaf:
            return node_id
        node.feature = f
        node.threshold = thr
        node.left = self._grow(X, y, w, left_idx, depth + 1, rng, k)
        node.right = self._grow(X, y, w, right_idx, depth + 1, rng, k)
        return node_id

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.empty(len(X))
        idx = np.arange(len(X))
        stack = [(0, idx)]
        while stack:
            node_id, rows = stack.pop()
            node = self.nodes[node_id]
            if node.feature < 0:
                out[rows] = node.prob
                continue
            mask = X[rows, node.feature] <= node.threshold
            stack.append((node.left, rows[mask]))
            stack.append((node.right, rows[~mask]))
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)

    @property
    def root(self) -> _Node:
        return self.nodes[0]


class RandomForest:
    """Bootstrap ensemble of CART trees with sqrt-feature subsampling;
    probability is the mean of the trees' leaf frequencies.  Per-tree seeds
    derive from (seed, tree index), so fits are order-independent."""

    def __init__(self, n_estimators: int = 100, max_depth: int | None = None,
                 min_samples_split: int = 2, min_samples_leaf: int = 1,
                 seed: int = 0):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.seed = seed
        self.trees: list[DecisionTree] = []

    def fit(self, X: np.ndarray, y: np.ndarray,
            sample_weight: np.ndarray | None = None) -> "RandomForest":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        n = len(y)
        w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, float)
        self.trees = []
        for i in range(self.n_estimators):
            tree_seed = derive_seed(self.seed, "tree", i)
            rng = np.random.default_rng(tree_seed)
            rows = rng.integers(0, n, size=n)
            tree = DecisionTree(max_depth=self.max_depth,
                                min_samples_split=self.min_samples_split,
                                min_samples_leaf=self.min_samples_leaf,
                                max_features="sqrt", seed=tree_seed)
            tree.fit(X[rows], y[rows], w[rows])
            self.trees.append(tree)
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        acc = np.zeros(len(X))
        for tree in self.trees:
            acc += tree.predict_proba(X)
        return acc / len(self.trees)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


def fit_balanced_tree(X, y, **kwargs) -> DecisionTree:
    """Tree with class-balanced sample weights, the pipeline default."""
    return DecisionTree(**kwargs).fit(X, y, balanced_weights(y))
