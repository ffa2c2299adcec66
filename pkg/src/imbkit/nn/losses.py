"""Binary cross-entropy and focal loss on logits, in numerically stable form.

Both return the batch-mean loss and its analytic gradient with respect to
the logits (the 1/n factor is folded into the gradient). Probabilities are
never materialized on the log side; everything goes through softplus.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import LengthMismatch


def _softplus(x):
    # log(1 + e^x) without overflow
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def _sigmoid(x):
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _check(logits, labels):
    z = np.asarray(logits, dtype=np.float64).reshape(-1)
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if z.shape != y.shape:
        raise LengthMismatch(f"{z.shape[0]} logits for {y.shape[0]} labels")
    return z, y


def bce_loss(logits, labels):
    """Mean binary cross-entropy from logits; returns (loss, dloss/dlogits)."""
    z, y = _check(logits, labels)
    per_sample = _softplus(z) - y * z
    n = z.shape[0]
    grad = (_sigmoid(z) - y) / n
    return float(per_sample.mean()), grad.reshape(np.shape(logits))


def focal_loss(logits, labels, alpha=0.25, gamma=2.0):
    """Mean focal loss from logits; returns (loss, dloss/dlogits).

    Per sample: -alpha_t * (1 - p_t)^gamma * log(p_t), where p_t is the
    probability assigned to the true class and alpha_t is ``alpha`` for
    positives and ``1 - alpha`` for negatives. gamma = 0 reduces exactly to
    alpha_t-weighted cross-entropy.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    z, y = _check(logits, labels)
    sign = 2.0 * y - 1.0
    s = sign * z                      # logit of the true class
    alpha_t = np.where(y == 1.0, alpha, 1.0 - alpha)
    one_minus_pt = _sigmoid(-s)
    neg_log_pt = _softplus(-s)
    modulator = one_minus_pt**gamma if gamma != 0 else np.ones_like(s)
    per_sample = alpha_t * modulator * neg_log_pt

    pt = _sigmoid(s)
    # d/ds of the per-sample loss; chain through s = sign * z
    dds = -alpha_t * modulator * (gamma * pt * neg_log_pt + one_minus_pt)
    n = z.shape[0]
    grad = (dds * sign) / n
    return float(per_sample.mean()), grad.reshape(np.shape(logits))


def focal_per_sample(logits, labels, alpha=0.25, gamma=2.0):
    """Per-sample focal losses (no reduction); used by identity checks."""
    z, y = _check(logits, labels)
    s = (2.0 * y - 1.0) * z
    alpha_t = np.where(y == 1.0, alpha, 1.0 - alpha)
    modulator = _sigmoid(-s) ** gamma if gamma != 0 else np.ones_like(s)
    return alpha_t * modulator * _softplus(-s)


def bce_per_sample(logits, labels):
    """Per-sample binary cross-entropy (no reduction)."""
    z, y = _check(logits, labels)
    return _softplus(z) - y * z
