import numpy as np
import pytest

from imbkit import (
    Dataset,
    MinMaxNormalizer,
    NormalizationParams,
    apply_minmax,
    fit_minmax,
    transform_minmax,
)
from imbkit.exceptions import DimensionMismatch


def test_fit_single_column():
    params = fit_minmax(np.array([[2.0], [4.0], [6.0]]))
    assert params.minimum.tolist() == [2.0]
    assert params.maximum.tolist() == [6.0]


def test_fit_constant_column():
    params = fit_minmax(np.array([[5.0], [5.0], [5.0]]))
    assert params.minimum.tolist() == [5.0] == params.maximum.tolist()


def test_fit_matches_columnwise_scan(rng):
    X = rng.normal(size=(40, 6))
    params = fit_minmax(X)
    for j in range(6):
        lo = min(X[i, j] for i in range(40))
        hi = max(X[i, j] for i in range(40))
        assert params.minimum[j] == lo and params.maximum[j] == hi


def test_transform_basic():
    X = np.array([[2.0], [4.0], [6.0]])
    out = transform_minmax(fit_minmax(X), X)
    assert out.ravel().tolist() == [0.0, 0.5, 1.0]


def test_constant_column_maps_to_zero():
    X = np.array([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]])
    out = transform_minmax(fit_minmax(X), X)
    assert (out[:, 0] == 0.0).all()


def test_out_of_range_not_clamped():
    params = fit_minmax(np.array([[2.0], [6.0]]))
    out = transform_minmax(params, np.array([[0.0]]))
    assert out[0, 0] == -0.5


def test_fitted_data_lands_in_unit_interval(rng):
    X = rng.normal(size=(30, 5)) * 10
    out = transform_minmax(fit_minmax(X), X)
    assert out.min() >= 0.0 and out.max() <= 1.0


def test_refit_on_normalized_is_idempotent(rng):
    X = rng.normal(size=(25, 4))
    once = transform_minmax(fit_minmax(X), X)
    twice = transform_minmax(fit_minmax(once), once)
    np.testing.assert_allclose(twice, once, atol=1e-15)


def test_order_preserving(rng):
    X = rng.normal(size=(50, 3))
    out = transform_minmax(fit_minmax(X), X)
    for j in range(3):
        order = np.argsort(X[:, j], kind="stable")
        assert (np.diff(out[order, j]) >= 0).all()


def test_dimension_mismatch():
    params = fit_minmax(np.array([[1.0, 2.0], [3.0, 4.0]]))
    with pytest.raises(DimensionMismatch):
        transform_minmax(params, np.array([[1.0]]))


def test_bad_params():
    with pytest.raises(ValueError):
        NormalizationParams(minimum=np.array([2.0]), maximum=np.array([1.0]))


def test_apply_to_dataset_keeps_labels(iris0):
    out = apply_minmax(fit_minmax(iris0), iris0)
    np.testing.assert_array_equal(out.labels, iris0.labels)
    assert out.features.min() >= 0.0 and out.features.max() <= 1.0
    assert out.attribute_names == iris0.attribute_names


def test_estimator_wrapper(rng):
    X = rng.normal(size=(20, 3))
    normalizer = MinMaxNormalizer().fit(X)
    np.testing.assert_array_equal(normalizer.transform(X), transform_minmax(fit_minmax(X), X))
    assert normalizer.get_params() == {}
