"""Input validation helpers shared by the estimator-style classes."""

from __future__ import annotations

import numpy as np

from .exceptions import LengthMismatch, ShapeMismatch


def check_matrix(X) -> np.ndarray:
    """Coerce to a finite 2-D float64 array."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D feature matrix, got ndim={X.ndim}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ShapeMismatch(f"feature matrix must be non-empty, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise ShapeMismatch("feature matrix contains NaN or inf")
    return X


def check_labels(y, n: int | None = None) -> np.ndarray:
    """Coerce to a 1-D int64 array of 0/1 labels."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ShapeMismatch(f"expected a 1-D label vector, got ndim={y.ndim}")
    vals = np.unique(y)
    if not np.isin(vals, (0, 1)).all():
        raise ShapeMismatch(f"labels must be 0/1, got values {vals!r}")
    if n is not None and y.shape[0] != n:
        raise LengthMismatch(f"{y.shape[0]} labels for {n} rows")
    return y.astype(np.int64)


def check_X_y(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = check_matrix(X)
    y = check_labels(y, n=X.shape[0])
    return X, y
