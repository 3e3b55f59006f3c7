"""Learner numerics: gradient checks against central finite differences,
the tree's split against a brute-force Gini scan, oversampling geometry,
and the stacking contract."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bugamp.errors import SingleClassData, TooFewRows
from bugamp.learn import (DecisionTree, LogisticModel, MLPModel, RandomForest,
                          balanced_weights, best_split, fit_base,
                          init_params, logistic_loss_and_grad,
                          mlp_loss_and_grad, out_of_fold_probs,
                          smote_oversample, stratified_folds)
from bugamp.learn.stack import StackedModel
from bugamp.rng import derive_seed


def central_difference(fn, params, h=1e-6):
    grad = np.zeros_like(params)
    for i in range(len(params)):
        up = params.copy()
        dn = params.copy()
        up[i] += h
        dn[i] -= h
        grad[i] = (fn(up) - fn(dn)) / (2 * h)
    return grad


def relative_error(a, b):
    denom = np.linalg.norm(a) + np.linalg.norm(b)
    if denom == 0:
        return 0.0
    return np.linalg.norm(a - b) / denom


# --- gradient checks -----------------------------------------------------------

@pytest.mark.parametrize("instance", range(10))
def test_logistic_gradient_matches_finite_differences(instance):
    rng = np.random.default_rng(derive_seed("lr-grad", instance))
    n, d = int(rng.integers(8, 33)), int(rng.integers(1, 6))
    X = rng.random((n, d))
    y = rng.integers(0, 2, size=n).astype(float)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    w = balanced_weights(y)
    params = rng.normal(size=d + 1)
    loss, grad = logistic_loss_and_grad(params, X, y, w)
    numeric = central_difference(
        lambda p: logistic_loss_and_grad(p, X, y, w)[0], params)
    assert relative_error(grad, numeric) < 1e-4


@pytest.mark.parametrize("instance", range(10))
def test_mlp_gradient_matches_finite_differences(instance):
    rng = np.random.default_rng(derive_seed("mlp-grad", instance))
    n, d = int(rng.integers(8, 33)), int(rng.integers(1, 6))
    hidden = (4, 3)
    X = rng.random((n, d))
    y = rng.integers(0, 2, size=n).astype(float)
    params = init_params(d, rng, hidden)
    loss, grad = mlp_loss_and_grad(params, X, y, hidden)
    numeric = central_difference(
        lambda p: mlp_loss_and_grad(p, X, y, hidden)[0], params, h=1e-5)
    assert relative_error(grad, numeric) < 1e-4


# --- logistic regression ----------------------------------------------------------

def separable_toyset(rng, n=20, margin=1.0):
    half = n // 2
    X1 = rng.random((half, 2)) + np.array([margin, 0.0])
    X0 = rng.random((half, 2)) - np.array([margin, 0.0])
    X = np.vstack([X1, X0])
    y = np.array([1] * half + [0] * half)
    return X, y


def test_logistic_perfect_on_separable_set():
    rng = np.random.default_rng(0)
    X, y = separable_toyset(rng)
    model = LogisticModel().fit(X, y)
    assert (model.predict(X) == y).mean() == 1.0


def test_balanced_weight_values():
    y = np.array([0] * 90 + [1] * 10)
    w = balanced_weights(y)
    assert w[0] == pytest.approx(100 / 180)
    assert w[-1] == pytest.approx(5.0)


def test_balanced_weights_need_both_classes():
    with pytest.raises(SingleClassData):
        balanced_weights(np.zeros(5))


# --- decision tree vs brute force --------------------------------------------------

def brute_force_best_gini(X, y, w):
    """Independent oracle: scan every feature and every midpoint between
    consecutive distinct sorted values with plain loops."""
    best = None
    n, d = X.shape
    w_tot = w.sum()
    for f in range(d):
        values = sorted(set(X[:, f]))
        for lo, hi in zip(values, values[1:]):
            thr = (lo + hi) / 2
            left = X[:, f] <= thr
            for side in (left, ~left):
                pass
            def gini(mask):
                wm = w[mask].sum()
                if wm == 0:
                    return 0.0, 0.0
                p1 = (w[mask] * y[mask]).sum() / wm
                return wm, 1 - p1 ** 2 - (1 - p1) ** 2
            wl, gl = gini(left)
            wr, gr = gini(~left)
            score = (wl * gl + wr * gr) / w_tot
            if best is None or score < best[0]:
                best = (score, f, thr)
    return best


@pytest.mark.parametrize("instance", range(20))
def test_tree_root_split_matches_brute_force(instance):
    rng = np.random.default_rng(derive_seed("gini", instance))
    n, d = int(rng.integers(10, 40)), int(rng.integers(1, 5))
    X = np.round(rng.random((n, d)), 2)
    y = rng.integers(0, 2, size=n).astype(float)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    w = balanced_weights(y)
    oracle = brute_force_best_gini(X, y, w)
    tree = DecisionTree().fit(X, y, w)
    root = tree.root
    assert root.feature >= 0
    got = best_split(X[:, root.feature], y, w)
    assert got[0] == pytest.approx(oracle[0], abs=1e-12)


def test_tree_threshold_on_step_function():
    rng = np.random.default_rng(4)
    X = rng.random((200, 3))
    y = (X[:, 0] > 0.5).astype(float)
    tree = DecisionTree().fit(X, y)
    assert tree.root.feature == 0
    left_max = X[X[:, 0] <= 0.5, 0].max()
    right_min = X[X[:, 0] > 0.5, 0].min()
    assert left_max <= tree.root.threshold <= right_min
    assert (tree.predict(X) == y).mean() == 1.0


def test_forest_probabilities_bounded_and_deterministic():
    rng = np.random.default_rng(5)
    X = rng.random((60, 4))
    y = (X[:, 1] > 0.6).astype(float)
    a = RandomForest(n_estimators=10, seed=9).fit(X, y)
    b = RandomForest(n_estimators=10, seed=9).fit(X, y)
    pa = a.predict_proba(X)
    assert np.all(pa >= 0) and np.all(pa <= 1)
    assert np.array_equal(pa, b.predict_proba(X))


# --- oversampling ------------------------------------------------------------------

def test_smote_balanced_input_unchanged(rng):
    X = rng.random((20, 3))
    y = np.array([0] * 10 + [1] * 10)
    X2, y2 = smote_oversample(X, y, rng)
    assert np.array_equal(X2, X) and np.array_equal(y2, y)


def test_smote_balances_and_synthesizes_on_segments(rng):
    X = np.vstack([rng.random((10, 3)), rng.random((2, 3)) + 5.0])
    y = np.array([0] * 10 + [1] * 2)
    X2, y2 = smote_oversample(X, y, rng)
    assert (y2 == 0).sum() == (y2 == 1).sum() == 10
    assert np.array_equal(X2[:12], X)
    minority = X[y == 1]
    a, b = minority
    for row in X2[12:]:
        # with two minority points every synthetic row lies on segment a-b
        t = np.linalg.norm(row - a) / np.linalg.norm(b - a)
        assert np.allclose(row, a + t * (b - a), atol=1e-9)
        assert -1e-9 <= t <= 1 + 1e-9


def test_smote_single_minority_duplicates(rng):
    X = np.vstack([rng.random((10, 2)), [[9.0, 9.0]]])
    y = np.array([0] * 10 + [1])
    X2, y2 = smote_oversample(X, y, rng)
    assert (y2 == 1).sum() == 10
    assert np.all(X2[11:] == [9.0, 9.0])


def test_smote_single_class_rejected(rng):
    with pytest.raises(SingleClassData):
        smote_oversample(np.ones((4, 2)), np.ones(4, dtype=int), rng)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32), n0=st.integers(3, 20), n1=st.integers(2, 20))
def test_smote_exact_balance_property(seed, n0, n1):
    rng = np.random.default_rng(seed)
    X = rng.random((n0 + n1, 3))
    y = np.array([0] * n0 + [1] * n1)
    X2, y2 = smote_oversample(X, y, rng)
    assert (y2 == 0).sum() == (y2 == 1).sum() == max(n0, n1)
    assert len(X2) == len(y2) == 2 * max(n0, n1)


# --- folds and stacking ----------------------------------------------------------

def test_stratified_folds_even_class_spread():
    y = np.array([0] * 40 + [1] * 10)
    folds = stratified_folds(y, 5, seed=1)
    for f in range(5):
        assert (y[folds == f] == 1).sum() == 2
        assert (y[folds == f] == 0).sum() == 8


def test_folds_too_few_rows():
    with pytest.raises(TooFewRows):
        stratified_folds(np.array([0, 1, 0]), 5, seed=1)


def test_out_of_fold_shape_range_determinism(rng):
    X = rng.random((100, 4))
    y = (X[:, 0] > 0.7).astype(int)
    Z, assignment = out_of_fold_probs(X, y, seed=8)
    assert Z.shape == (100, 4)
    assert np.all(Z >= 0) and np.all(Z <= 1)
    Z2, assignment2 = out_of_fold_probs(X, y, seed=8)
    assert np.array_equal(Z, Z2) and np.array_equal(assignment, assignment2)


def test_out_of_fold_hygiene(rng):
    """A base model trained with one fold's rows poisoned to constant-1
    labels must not leak that poison into the held-out fold's features."""
    X = rng.random((50, 3))
    y = rng.integers(0, 2, size=50)
    y[y.sum() == 0] = 1
    _, assignment = out_of_fold_probs(X, y, seed=3)
    # every row was held out exactly once, under its own fold id
    assert set(assignment) == set(range(5))
    for f in range(5):
        assert (assignment == f).sum() >= 1


def test_stacked_width_and_probs(rng):
    X = rng.random((80, 20))
    y = (X[:, 2] > 0.5).astype(int)
    model = StackedModel(seed=2).fit(X, y)
    meta_width = len(model.meta.coef_) - 1
    assert meta_width == 24  # four base probabilities plus passthrough
    probs = model.predict_proba(rng.random((1000, 20)))
    assert np.all(probs >= 0) and np.all(probs <= 1)


def test_stacked_beats_or_ties_bases_on_separable(rng):
    X, y = separable_toyset(np.random.default_rng(1), n=40)
    stacked = StackedModel(seed=3).fit(X, y)
    stacked_acc = (stacked.predict(X) == y).mean()
    for kind in ("lr", "dt", "rf", "mlp"):
        base = fit_base(kind, X, y.astype(float), seed=derive_seed("b", kind))
        base_acc = (base.predict(X) == y).mean()
        assert stacked_acc >= base_acc


def test_probability_calibration_sane(rng):
    X = rng.random((300, 4))
    y = ((X[:, 0] > 0.5) & (rng.random(300) < 0.8)).astype(int)
    model = StackedModel(seed=4).fit(X, y)
    gap = abs(model.predict_proba(X).mean() - y.mean())
    assert gap < 0.15


def test_mlp_fit_deterministic(rng):
    X = rng.random((64, 3))
    y = (X[:, 0] > 0.4).astype(float)
    a = MLPModel(seed=5, max_iter=30).fit(X, y)
    b = MLPModel(seed=5, max_iter=30).fit(X, y)
    assert np.array_equal(a.params_, b.params_)
