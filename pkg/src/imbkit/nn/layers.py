"""Layers for the from-scratch networks. Forward caches what backward needs."""

from __future__ import annotations

import numpy as np

from ..exceptions import ShapeMismatch, StaleCache


class Layer:
    """Base layer: parameterless, with a train-mode cache."""

    def __init__(self):
        self._cache = None

    def params(self) -> dict:
        return {}

    def grads(self) -> dict:
        return {}

    def init_params(self, rng):
        pass

    def forward(self, x, train, rng=None):
        raise NotImplementedError

    def backward(self, dout):
        raise NotImplementedError

    def _take_cache(self):
        if self._cache is None:
            raise StaleCache(f"{type(self).__name__}.backward without train forward")
        cache, self._cache = self._cache, None
        return cache


class Dense(Layer):
    def __init__(self, in_features, out_features):
        super().__init__()
        self.in_features = in_features
        self.out_features = out_features
        self.w = np.zeros((out_features, in_features))
        self.b = np.zeros(out_features)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)

    def params(self):
        return {"w": self.w, "b": self.b}

    def grads(self):
        return {"w": self.dw, "b": self.db}

    def init_params(self, rng):
        # uniform bias init (not zero) keeps narrow ReLU stacks from starting
        # dead on the all-non-negative inputs min-max scaling produces
        bound = np.sqrt(1.0 / self.in_features)
        self.w = rng.uniform(-bound, bound, size=self.w.shape)
        self.b = rng.uniform(-bound, bound, size=self.b.shape)

    def forward(self, x, train, rng=None):
        if x.shape[1] != self.in_features:
            raise ShapeMismatch(f"Dense expected width {self.in_features}, got {x.shape[1]}")
        if train:
            self._cache = x
        return x @ self.w.T + self.b

    def backward(self, dout):
        x = self._take_cache()
        self.dw = dout.T @ x
        self.db = dout.sum(axis=0)
        return dout @ self.w


class ReLU(Layer):
    def forward(self, x, train, rng=None):
        if train:
            self._cache = x > 0
        return np.maximum(x, 0.0)

    def backward(self, dout):
        mask = self._take_cache()
        return dout * mask


class BatchNorm1d(Layer):
    """Per-feature normalization over the batch; running stats for eval mode.

    Uses the biased batch variance both for normalization and for the
    running-average update (momentum 0.1 by default).
    """

    def __init__(self, num_features, epsilon=1e-5, momentum=0.1):
        super().__init__()
        self.num_features = num_features
        self.epsilon = epsilon
        self.momentum = momentum
        self.gamma = np.ones(num_features)
        self.beta = np.zeros(num_features)
        self.dgamma = np.zeros_like(self.gamma)
        self.dbeta = np.zeros_like(self.beta)
        self.running_mean = np.zeros(num_features)
        self.running_var = np.ones(num_features)

    def params(self):
        return {"gamma": self.gamma, "beta": self.beta}

    def grads(self):
        return {"gamma": self.dgamma, "beta": self.dbeta}

    def init_params(self, rng):
        self.gamma = np.ones(self.num_features)
        self.beta = np.zeros(self.num_features)
        self.running_mean = np.zeros(self.num_features)
        self.running_var = np.ones(self.num_features)

    def forward(self, x, train, rng=None):
        if x.shape[1] != self.num_features:
            raise ShapeMismatch(
                f"BatchNorm1d expected width {self.num_features}, got {x.shape[1]}"
            )
        if train:
            mu = x.mean(axis=0)
            var = x.var(axis=0)
            inv_std = 1.0 / np.sqrt(var + self.epsilon)
            xhat = (x - mu) * inv_std
            self.running_mean = (1 - self.momentum) * self.running_mean + self.momentum * mu
            self.running_var = (1 - self.momentum) * self.running_var + self.momentum * var
            self._cache = (xhat, inv_std)
        else:
            inv_std = 1.0 / np.sqrt(self.running_var + self.epsilon)
            xhat = (x - self.running_mean) * inv_std
        return self.gamma * xhat + self.beta

    def backward(self, dout):
        xhat, inv_std = self._take_cache()
        self.dgamma = (dout * xhat).sum(axis=0)
        self.dbeta = dout.sum(axis=0)
        dxhat = dout * self.gamma
        return inv_std * (
            dxhat - dxhat.mean(axis=0) - xhat * (dxhat * xhat).mean(axis=0)
        )


class Dropout(Layer):
    """Inverted dropout: scales by 1/keep at train time, identity in eval."""

    def __init__(self, rate):
        super().__init__()
        self.rate = rate

    def forward(self, x, train, rng=None):
        if not train or self.rate == 0.0:
            if train:
                self._cache = np.ones_like(x)
            return x
        keep = 1.0 - self.rate
        mask = (rng.uniform(size=x.shape) >= self.rate) / keep
        self._cache = mask
        return x * mask

    def backward(self, dout):
        mask = self._take_cache()
        return dout * mask


class Conv1d(Layer):
    """1-D convolution, no padding: out length = (L - kernel) // stride + 1."""

    def __init__(self, in_channels, out_channels, kernel_size, stride=1):
        super().__init__()
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.stride = stride
        self.w = np.zeros((out_channels, in_channels, kernel_size))
        self.b = np.zeros(out_channels)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)

    def params(self):
        return {"w": self.w, "b": self.b}

    def grads(self):
        return {"w": self.dw, "b": self.db}

    def init_params(self, rng):
        bound = np.sqrt(1.0 / (self.in_channels * self.kernel_size))
        self.w = rng.uniform(-bound, bound, size=self.w.shape)
        self.b = rng.uniform(-bound, bound, size=self.b.shape)

    def _columns(self, x):
        n, c, length = x.shape
        l_out = (length - self.kernel_size) // self.stride + 1
        if l_out < 1:
            raise ShapeMismatch(
                f"Conv1d kernel {self.kernel_size} does not fit length {length}"
            )
        cols = np.empty((n, l_out, c, self.kernel_size), dtype=x.dtype)
        for t in range(l_out):
            start = t * self.stride
            cols[:, t] = x[:, :, start:start + self.kernel_size]
        return cols, l_out

    def forward(self, x, train, rng=None):
        if x.ndim != 3 or x.shape[1] != self.in_channels:
            raise ShapeMismatch(
                f"Conv1d expected (n, {self.in_channels}, L), got {x.shape}"
            )
        cols, l_out = self._columns(x)
        out = np.einsum("nlck,ock->nol", cols, self.w) + self.b[None, :, None]
        if train:
            self._cache = (cols, x.shape)
        return out

    def backward(self, dout):
        cols, x_shape = self._take_cache()
        self.db = dout.sum(axis=(0, 2))
        self.dw = np.einsum("nol,nlck->ock", dout, cols)
        dcols = np.einsum("nol,ock->nlck", dout, self.w)
        dx = np.zeros(x_shape)
        for t in range(dcols.shape[1]):
            start = t * self.stride
            dx[:, :, start:start + self.kernel_size] += dcols[:, t]
        return dx


class Flatten(Layer):
    def forward(self, x, train, rng=None):
        if train:
            self._cache = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dout):
        shape = self._take_cache()
        return dout.reshape(shape)


class SequenceInput(Layer):
    """Adapts (n, d) feature rows to (n, 1, d') sequences, zero-padding to d' >= pad_to."""

    def __init__(self, width, pad_to=4):
        super().__init__()
        self.width = width
        self.padded = max(width, pad_to)

    def forward(self, x, train, rng=None):
        if x.shape[1] != self.width:
            raise ShapeMismatch(f"expected width {self.width}, got {x.shape[1]}")
        out = np.zeros((x.shape[0], 1, self.padded), dtype=x.dtype)
        out[:, 0, : self.width] = x
        if train:
            self._cache = True
        return out

    def backward(self, dout):
        self._take_cache()
        return dout[:, 0, : self.width]
