import math

import numpy as np
import pytest

from imbkit.exceptions import LengthMismatch
from imbkit.nn import bce_loss, bce_per_sample, focal_loss, focal_per_sample

H = 1e-4


def numeric_logit_grad(fn, logits):
    g = np.zeros_like(logits)
    for i in range(len(logits)):
        z = logits.copy()
        z[i] += H
        hi = fn(z)
        z[i] -= 2 * H
        lo = fn(z)
        g[i] = (hi - lo) / (2 * H)
    return g


class TestBCE:
    def test_logit_zero_is_ln2(self):
        loss, _ = bce_loss(np.array([0.0]), np.array([1]))
        assert loss == pytest.approx(math.log(2), abs=1e-12)

    def test_saturated_correct(self):
        loss, _ = bce_loss(np.array([20.0]), np.array([1]))
        assert loss <= 1e-8

    def test_extreme_logits_stay_finite(self):
        loss, grad = bce_loss(np.array([1000.0, -1000.0]), np.array([0, 1]))
        assert np.isfinite(loss) and np.isfinite(grad).all()

    def test_gradient_matches_finite_differences(self, rng):
        for _ in range(10):
            logits = rng.normal(size=8) * 3
            labels = rng.integers(0, 2, size=8)
            _, grad = bce_loss(logits, labels)
            num = numeric_logit_grad(lambda z: bce_loss(z, labels)[0], logits)
            assert np.abs(grad - num).max() / max(np.abs(num).max(), 1e-8) <= 1e-5

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            bce_loss(np.array([0.0, 1.0]), np.array([1]))


class TestFocal:
    def test_hand_value_at_logit_zero(self):
        # alpha * (1/2)^gamma... at p_t = 0.5: 0.25 * 0.25 * ln 2
        loss, _ = focal_loss(np.array([0.0]), np.array([1]), alpha=0.25, gamma=2.0)
        assert loss == pytest.approx(0.25 * 0.25 * math.log(2), abs=1e-9)

    def test_gamma_zero_reduces_to_weighted_bce(self, rng):
        for _ in range(10):
            logits = rng.normal(size=12) * 4
            labels = rng.integers(0, 2, size=12)
            focal = focal_per_sample(logits, labels, alpha=0.25, gamma=0.0)
            bce = bce_per_sample(logits, labels)
            alpha_t = np.where(labels == 1, 0.25, 0.75)
            np.testing.assert_allclose(focal, alpha_t * bce, atol=1e-12, rtol=0)

    def test_saturated_correct_prediction_is_zero(self):
        loss, _ = focal_loss(np.array([40.0]), np.array([1]))
        assert loss <= 1e-15

    def test_non_negative(self, rng):
        logits = rng.normal(size=200) * 10
        labels = rng.integers(0, 2, size=200)
        assert (focal_per_sample(logits, labels) >= 0.0).all()

    def test_strictly_decreasing_in_pt(self):
        # y = 1, so p_t = sigmoid(logit): increasing logit sweeps p_t upward
        logits = np.linspace(-8, 8, 400)
        losses = focal_per_sample(logits, np.ones_like(logits))
        assert (np.diff(losses) < 0).all()

    def test_gradient_matches_finite_differences(self, rng):
        for gamma in (0.0, 0.5, 1.0, 2.0, 5.0):
            logits = rng.normal(size=10) * 3
            labels = rng.integers(0, 2, size=10)
            _, grad = focal_loss(logits, labels, alpha=0.25, gamma=gamma)
            num = numeric_logit_grad(
                lambda z: focal_loss(z, labels, alpha=0.25, gamma=gamma)[0], logits
            )
            assert np.abs(grad - num).max() / max(np.abs(num).max(), 1e-8) <= 1e-5

    def test_negative_gamma_rejected(self):
        with pytest.raises(ValueError):
            focal_loss(np.array([0.0]), np.array([1]), gamma=-1.0)
