"""Adam with bias correction, operating on named parameter dictionaries."""

from __future__ import annotations

import numpy as np


class Adam:
    def __init__(self, learning_rate=0.001, beta1=0.9, beta2=0.999, epsilon=1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.t = 0
        self.m: list[dict] = []
        self.v: list[dict] = []

    def step(self, params: list[dict], grads: list[dict]):
        """In-place update of every parameter array from its gradient.

        ``params``/``grads`` are parallel lists of {name: array} dicts, one
        per layer. Moment state is created lazily on the first call.
        """
        if not self.m:
            self.m = [{k: np.zeros_like(p) for k, p in layer.items()} for layer in params]
            self.v = [{k: np.zeros_like(p) for k, p in layer.items()} for layer in params]
        self.t += 1
        b1c = 1.0 - self.beta1**self.t
        b2c = 1.0 - self.beta2**self.t
        for layer_p, layer_g, m, v in zip(params, grads, self.m, self.v):
            for name, p in layer_p.items():
                g = layer_g[name]
                m[name] = self.beta1 * m[name] + (1.0 - self.beta1) * g
                v[name] = self.beta2 * v[name] + (1.0 - self.beta2) * g * g
                m_hat = m[name] / b1c
                v_hat = v[name] / b2c
                p -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.epsilon)
