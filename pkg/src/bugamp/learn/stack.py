"""Stacked ensemble: four base classifiers feeding a logistic meta-learner.

The meta-learner trains on out-of-fold base probabilities concatenated
with the raw features (passthrough), over a stratified 5-fold split, so no
base model ever scores a row it trained on.  After the meta fit, the bases
refit on the full data for prediction time.
"""

from __future__ import annotations

import numpy as np

from ..errors import TooFewRows
from ..rng import derive_seed
from .linear import LogisticModel, balanced_weights
from .net import MLPModel
from .tree import DecisionTree, RandomForest

BASE_KINDS = ("lr", "dt", "rf", "mlp")

# growth limits keep refit cost bounded on noisy labels without touching
# the split semantics
TREE_LIMITS = dict(max_depth=16, min_samples_split=4, min_samples_leaf=2)
FOREST_LIMITS = dict(max_depth=12, min_samples_split=8, min_samples_leaf=2)


def make_base(kind: str, seed: int):
    if kind == "lr":
        return LogisticModel(max_iter=1000)
    if kind == "dt":
        return DecisionTree(seed=seed, **TREE_LIMITS)
    if kind == "rf":
        return RandomForest(n_estimators=100, seed=seed, **FOREST_LIMITS)
    if kind == "mlp":
        return MLPModel(max_iter=500, seed=seed)
    raise ValueError(f"unknown base learner {kind!r}")


def fit_base(kind: str, X: np.ndarray, y: np.ndarray, seed: int):
    """Fit one base learner; lr/dt/rf get balanced class weights, the
    perceptron trains unweighted."""
    model = make_base(kind, seed)
    if kind == "mlp":
        model.fit(X, y)
    else:
        model.fit(X, y, balanced_weights(y))
    return model


def stratified_folds(y: np.ndarray, folds: int, seed: int) -> np.ndarray:
    """Fold id per row: each class shuffled independently and dealt
    round-robin, so class ratios stay even across folds."""
    y = np.asarray(y)
    if len(y) < folds:
        raise TooFewRows(f"{len(y)} rows for {folds} folds")
    rng = np.random.default_rng(derive_seed(seed, "folds"))
    assignment = np.empty(len(y), dtype=int)
    for label in (0, 1):
        idx = np.nonzero(y == label)[0]
        rng.shuffle(idx)
        assignment[idx] = np.arange(len(idx)) % folds
    return assignment


def out_of_fold_probs(X: np.ndarray, y: np.ndarray, seed: int,
                      kinds=BASE_KINDS, folds: int = 5
                      ) -> tuple[np.ndarray, np.ndarray]:
    """Meta-feature matrix (n, len(kinds)): each row's base probabilities
    come from models that never saw that row's fold.  Also returns the
    fold assignment for hygiene audits."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    assignment = stratified_folds(y, folds, seed)
    Z = np.zeros((len(y), len(kinds)))
    for f in range(folds):
        holdout = assignment == f
        if not holdout.any():
            continue
        Xtr, ytr = X[~holdout], y[~holdout]
        for j, kind in enumerate(kinds):
            model = fit_base(kind, Xtr, ytr, derive_seed(seed, "oof", f, kind))
            Z[holdout, j] = model.predict_proba(X[holdout])
    return Z, assignment


class StackedModel:
    """Four base learners under a balanced logistic meta-learner."""

    def __init__(self, seed: int = 0, folds: int = 5, passthrough: bool = True,
                 kinds=BASE_KINDS):
        self.seed = seed
        self.folds = folds
        self.passthrough = passthrough
        self.kinds = kinds
        self.bases: list = []
        self.meta: LogisticModel | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "StackedModel":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        Z, _ = out_of_fold_probs(X, y, self.seed, self.kinds, self.folds)
        meta_X = np.hstack([Z, X]) if self.passthrough else Z
        self.meta = LogisticModel(max_iter=1000).fit(meta_X, y,
                                                     balanced_weights(y))
        self.bases = [fit_base(kind, X, y, derive_seed(self.seed, "full", kind))
                      for kind in self.kinds]
        return self

    def _meta_features(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        Z = np.column_stack([m.predict_proba(X) for m in self.bases])
        return np.hstack([Z, X]) if self.passthrough else Z

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.meta.predict_proba(self._meta_features(X))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


def fit_stacked(X: np.ndarray, y: np.ndarray, seed: int,
                passthrough: bool = True) -> StackedModel:
    return StackedModel(seed=seed, passthrough=passthrough).fit(X, y)
