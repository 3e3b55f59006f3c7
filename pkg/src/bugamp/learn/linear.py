"""Logistic regression fit by full-batch gradient descent.

Parameters pack as [weights..., bias].  The loss/gradient pair is exposed
as a pure function so the analytic gradient can be checked against finite
differences.
"""

from __future__ import annotations

import numpy as np

from ..errors import SingleClassData


def balanced_weights(y: np.ndarray) -> np.ndarray:
    """Per-sample weights n / (2 * class count), so both classes carry the
    same total weight."""
    y = np.asarray(y)
    n = len(y)
    n1 = int(y.sum())
    n0 = n - n1
    if n0 == 0 or n1 == 0:
        raise SingleClassData("both classes required for balanced weights")
    w = np.where(y == 1, n / (2.0 * n1), n / (2.0 * n0))
    return w


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss_and_grad(params: np.ndarray, X: np.ndarray, y: np.ndarray,
                           sample_weight: np.ndarray | None = None
                           ) -> tuple[float, np.ndarray]:
    """Weighted mean negative log-likelihood and its gradient with respect
    to [weights..., bias]."""
    w, b = params[:-1], params[-1]
    sw = np.ones(len(y)) if sample_weight is None else sample_weight
    z = X @ w + b
    # log(1 + exp(-z)) and friends, stably
    log_p = -np.logaddexp(0.0, -z)
    log_1mp = -np.logaddexp(0.0, z)
    total = sw.sum()
    loss = -float((sw * (y * log_p + (1 - y) * log_1mp)).sum() / total)
    residual = sw * (_sigmoid(z) - y) / total
    grad = np.concatenate([X.T @ residual, [residual.sum()]])
    return loss, grad


class LogisticModel:
    """Binary classifier, balanced class weighting by default."""

    def __init__(self, max_iter: int = 1000, lr: float = 4.0,
                 tol: float = 1e-5, balanced: bool = True):
        self.max_iter = max_iter
        self.lr = lr
        self.tol = tol
        self.balanced = balanced
        self.coef_: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: np.ndarray,
            sample_weight: np.ndarray | None = None) -> "LogisticModel":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if sample_weight is None and self.balanced:
            sample_weight = balanced_weights(y)
        params = np.zeros(X.shape[1] + 1)
        lr = self.lr
        loss, grad = logistic_loss_and_grad(params, X, y, sample_weight)
        for _ in range(self.max_iter):
            step = params - lr * grad
            new_loss, new_grad = logistic_loss_and_grad(step, X, y,
                                                        sample_weight)
            if new_loss <= loss:
                improved = loss - new_loss < self.tol
                params, loss, grad = step, new_loss, new_grad
                lr *= 1.2
                if improved:
                    break
            else:
                lr *= 0.5   # overshot: keep params, retry smaller
                if lr < 1e-8:
                    break
        self.coef_ = params
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        w, b = self.coef_[:-1], self.coef_[-1]
        return _sigmoid(X @ w + b)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)
