"""Minority oversampling: synthetic points on segments between minority
neighbors, until the classes balance exactly."""

from __future__ import annotations

import numpy as np

from ..errors import SingleClassData

DEFAULT_NEIGHBORS = 5


def smote_oversample(X: np.ndarray, y: np.ndarray, rng: np.random.Generator,
                     neighbors: int = DEFAULT_NEIGHBORS
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Append synthetic minority rows x + lambda * (x_nn - x), lambda
    uniform on [0, 1], with x_nn one of x's nearest minority neighbors,
    until class counts are equal.  Originals are preserved in place.  A
    single-sample minority duplicates itself."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    n1 = int((y == 1).sum())
    n0 = len(y) - n1
    if n0 == 0 or n1 == 0:
        raise SingleClassData("oversampling needs both classes")
    if n0 == n1:
        return X.copy(), y.copy()

    minority_label = 1 if n1 < n0 else 0
    minority = X[y == minority_label]
    deficit = abs(n0 - n1)
    m = len(minority)

    if m == 1:
        synth = np.repeat(minority, deficit, axis=0)
    else:
        diffs = minority[:, None, :] - minority[None, :, :]
        dist = np.sqrt((diffs ** 2).sum(axis=2))
        np.fill_diagonal(dist, np.inf)
        k = min(neighbors, m - 1)
        nn_idx = np.argsort(dist, axis=1, kind="mergesort")[:, :k]
        rows = []
        for _ in range(deficit):
            i = int(rng.integers(0, m))
            j = int(nn_idx[i][int(rng.integers(0, k))])
            lam = rng.random()
            rows.append(minority[i] + lam * (minority[j] - minority[i]))
        synth = np.asarray(rows)

    X_out = np.vstack([X, synth])
    y_out = np.concatenate([y, np.full(deficit, minority_label)])
    return X_out, y_out
