"""Min-max normalization to [0, 1] with fit/apply separation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_matrix
from .datasets import Dataset
from .exceptions import DimensionMismatch


@dataclass(frozen=True)
class NormalizationParams:
    """Per-feature minimum and maximum captured at fit time."""

    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.minimum, dtype=np.float64)
        hi = np.asarray(self.maximum, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise DimensionMismatch(f"bad param shapes {lo.shape} vs {hi.shape}")
        if (lo > hi).any():
            raise ValueError("minimum exceeds maximum")
        object.__setattr__(self, "minimum", lo)
        object.__setattr__(self, "maximum", hi)


def fit_minmax(data) -> NormalizationParams:
    """Columnwise minimum and maximum of a feature matrix or Dataset."""
    X = data.features if isinstance(data, Dataset) else check_matrix(data)
    return NormalizationParams(minimum=X.min(axis=0), maximum=X.max(axis=0))


def transform_minmax(params: NormalizationParams, X) -> np.ndarray:
    """Scale columns to (x - min) / (max - min); constant columns map to 0.

    Values outside the fitted range are not clamped, so unseen data may
    fall outside [0, 1].
    """
    X = check_matrix(X)
    if X.shape[1] != params.minimum.shape[0]:
        raise DimensionMismatch(
            f"matrix has {X.shape[1]} columns, params have {params.minimum.shape[0]}"
        )
    span = params.maximum - params.minimum
    safe = np.where(span == 0.0, 1.0, span)
    out = (X - params.minimum) / safe
    out[:, span == 0.0] = 0.0
    return out


def apply_minmax(params: NormalizationParams, ds: Dataset) -> Dataset:
    """Normalized copy of a Dataset; labels and metadata unchanged."""
    return Dataset(
        name=ds.name,
        features=transform_minmax(params, ds.features),
        labels=ds.labels,
        attribute_names=ds.attribute_names,
        source_encoding=dict(ds.source_encoding),
    )


class MinMaxNormalizer(BaseEstimator):
    """Estimator-style wrapper around fit_minmax/transform_minmax."""

    def fit(self, X, y=None):
        self.params_ = fit_minmax(X)
        return self

    def transform(self, X):
        return transform_minmax(self.params_, X)

    def fit_transform(self, X, y=None):
        return self.fit(X).transform(X)
