"""Two-hidden-layer perceptron (50, 20) with rectifier activations and a
logistic output, trained by mini-batch gradient descent.

The learning rate halves whenever training loss plateaus; training stops
early when the held-out validation loss stops improving.  Parameters pack
flat so the backprop gradient can be checked against finite differences.
"""

from __future__ import annotations

import numpy as np

HIDDEN = (50, 20)


def _layer_sizes(dim: int, hidden=HIDDEN) -> list[tuple[int, int]]:
    sizes = [dim, *hidden, 1]
    return [(sizes[i], sizes[i + 1]) for i in range(len(sizes) - 1)]


def init_params(dim: int, rng: np.random.Generator, hidden=HIDDEN) -> np.ndarray:
    """He-scaled random weights, zero biases, packed flat."""
    parts = []
    for fan_in, fan_out in _layer_sizes(dim, hidden):
        parts.append(rng.normal(0.0, np.sqrt(2.0 / fan_in),
                                size=fan_in * fan_out))
        parts.append(np.zeros(fan_out))
    return np.concatenate(parts)


def _unpack(params: np.ndarray, dim: int, hidden=HIDDEN):
    mats = []
    pos = 0
    for fan_in, fan_out in _layer_sizes(dim, hidden):
        W = params[pos:pos + fan_in * fan_out].reshape(fan_in, fan_out)
        pos += fan_in * fan_out
        b = params[pos:pos + fan_out]
        pos += fan_out
        mats.append((W, b))
    return mats


def mlp_loss_and_grad(params: np.ndarray, X: np.ndarray, y: np.ndarray,
                      hidden=HIDDEN) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy and its gradient by backprop."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    layers = _unpack(params, X.shape[1], hidden)
    n = len(X)

    acts = [X]
    pre = []
    a = X
    for i, (W, b) in enumerate(layers):
        z = a @ W + b
        pre.append(z)
        a = np.maximum(z, 0.0) if i < len(layers) - 1 else z
        acts.append(a)
    z_out = pre[-1][:, 0]
    # stable sigmoid cross-entropy
    loss = float(np.mean(np.logaddexp(0.0, z_out) - y * z_out))
    p = np.empty_like(z_out)
    posm = z_out >= 0
    p[posm] = 1.0 / (1.0 + np.exp(-z_out[posm]))
    ez = np.exp(z_out[~posm])
    p[~posm] = ez / (1.0 + ez)

    delta = ((p - y) / n)[:, None]
    grads = []
    for i in range(len(layers) - 1, -1, -1):
        W, _ = layers[i]
        gW = acts[i].T @ delta
        gb = delta.sum(axis=0)
        grads.append((gW, gb))
        if i > 0:
            delta = (delta @ W.T) * (pre[i - 1] > 0.0)
    grads.reverse()
    return loss, np.concatenate([np.concatenate([gW.ravel(), gb])
                                 for gW, gb in grads])


def _forward(layers, X):
    acts = [X]
    pre = []
    a = X
    last = len(layers) - 1
    for i, (W, b) in enumerate(layers):
        z = a @ W + b
        pre.append(z)
        a = np.maximum(z, 0.0) if i < last else z
        acts.append(a)
    return acts, pre


def _bce_loss(layers, X, y) -> float:
    _, pre = _forward(layers, X)
    z = pre[-1][:, 0]
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def _sgd_step(layers, X, y, lr) -> None:
    """One mini-batch update, applied in place to the layer views."""
    acts, pre = _forward(layers, X)
    z = pre[-1][:, 0]
    p = np.empty_like(z)
    posm = z >= 0
    p[posm] = 1.0 / (1.0 + np.exp(-z[posm]))
    ez = np.exp(z[~posm])
    p[~posm] = ez / (1.0 + ez)
    delta = ((p - y) / len(y))[:, None]
    for i in range(len(layers) - 1, -1, -1):
        W, b = layers[i]
        gW = acts[i].T @ delta
        gb = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ W.T) * (pre[i - 1] > 0.0)
        W -= lr * gW
        b -= lr * gb


class MLPModel:
    """dim -> 50 -> 20 -> 1 classifier."""

    def __init__(self, max_iter: int = 500, batch_size: int = 32,
                 lr: float = 0.1, validation_fraction: float = 0.1,
                 patience: int = 10, seed: int = 0, hidden=HIDDEN):
        self.max_iter = max_iter
        self.batch_size = batch_size
        self.lr = lr
        self.validation_fraction = validation_fraction
        self.patience = patience
        self.seed = seed
        self.hidden = hidden
        self.params_: np.ndarray | None = None
        self.dim_: int = 0

    def fit(self, X: np.ndarray, y: np.ndarray) -> "MLPModel":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        n, dim = X.shape
        self.dim_ = dim
        rng = np.random.default_rng(self.seed)
        params = init_params(dim, rng, self.hidden)

        n_val = max(1, int(round(n * self.validation_fraction))) if n >= 10 else 0
        perm = rng.permutation(n)
        val_idx, train_idx = perm[:n_val], perm[n_val:]
        if len(train_idx) == 0:
            train_idx = perm
            val_idx = perm[:0]
        Xt, yt = X[train_idx], y[train_idx]
        Xv, yv = X[val_idx], y[val_idx]

        lr = self.lr
        best_val = np.inf
        best_params = params.copy()
        val_stall = 0
        best_train = np.inf
        train_stall = 0
        tol = 1e-4
        layers = _unpack(params, dim, self.hidden)  # views into params

        for _ in range(self.max_iter):
            order = rng.permutation(len(Xt))
            for start in range(0, len(Xt), self.batch_size):
                batch = order[start:start + self.batch_size]
                _sgd_step(layers, Xt[batch], yt[batch], lr)

            train_loss = _bce_loss(layers, Xt, yt)
            if train_loss < best_train - tol:
                best_train = train_loss
                train_stall = 0
            else:
                train_stall += 1
                if train_stall >= self.patience:
                    lr /= 2.0
                    train_stall = 0
                    if lr < 1e-3:
                        break

            if len(Xv):
                val_loss = _bce_loss(layers, Xv, yv)
                if val_loss < best_val - tol:
                    best_val = val_loss
                    best_params = params.copy()
                    val_stall = 0
                else:
                    val_stall += 1
                    if val_stall >= self.patience:
                        break
            else:
                best_params = params

        self.params_ = best_params if len(Xv) else params
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        a = X
        layers = _unpack(self.params_, self.dim_, self.hidden)
        for i, (W, b) in enumerate(layers):
            z = a @ W + b
            a = np.maximum(z, 0.0) if i < len(layers) - 1 else z
        z = a[:, 0]
        out = np.empty_like(z)
        posm = z >= 0
        out[posm] = 1.0 / (1.0 + np.exp(-z[posm]))
        ez = np.exp(z[~posm])
        out[~posm] = ez / (1.0 + ez)
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)
