"""Network assembly, training loop, and estimator-style classifier wrappers.

Two fixed topologies are provided. The dense network is
Dense(d, 64) / ReLU / BatchNorm / Dense(64, 64) / ReLU / BatchNorm /
Dropout(0.3) / Dense(64, 1). The convolutional network reshapes each row to
a 1-channel sequence (zero-padded to length >= 4), applies
Conv1d(1, 16, k=3) / ReLU / Conv1d(16, 4, k=2) / ReLU, flattens to
4 * (d' - 3) values, and finishes with Dense(flatten, 50) / ReLU /
Dense(50, 1). A single output neuron is read through a sigmoid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .._validation import check_X_y, check_matrix
from ..exceptions import NonFiniteLoss, ShapeMismatch
from .layers import (
    BatchNorm1d,
    Conv1d,
    Dense,
    Dropout,
    Flatten,
    ReLU,
    SequenceInput,
)
from .losses import _sigmoid, bce_loss, focal_loss
from .optim import Adam

STATE_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.001
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    epochs: int = 2000
    loss: str = "focal"          # "focal" | "bce"
    focal_alpha: float = 0.25
    focal_gamma: float = 2.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.focal_gamma < 0:
            raise ValueError("focal_gamma must be >= 0")
        if not 0 < self.focal_alpha <= 1:
            raise ValueError("focal_alpha must be in (0, 1]")
        if self.loss not in ("focal", "bce"):
            raise ValueError(f"loss must be 'focal' or 'bce', got {self.loss!r}")


@dataclass(frozen=True)
class ModelSpec:
    """Layer plan for one of the two fixed topologies."""

    kind: str                      # "dnn" | "cnn"
    input_width: int
    layers: tuple[tuple, ...] = field(default=())

    @property
    def padded_width(self) -> int:
        return max(self.input_width, 4)


def dnn_spec(input_width: int) -> ModelSpec:
    return ModelSpec(
        kind="dnn",
        input_width=input_width,
        layers=(
            ("dense", input_width, 64),
            ("relu",),
            ("batchnorm", 64),
            ("dense", 64, 64),
            ("relu",),
            ("batchnorm", 64),
            ("dropout", 0.3),
            ("dense", 64, 1),
        ),
    )


def cnn_spec(input_width: int) -> ModelSpec:
    padded = max(input_width, 4)
    flat = 4 * (padded - 3)
    return ModelSpec(
        kind="cnn",
        input_width=input_width,
        layers=(
            ("input1d", input_width, 4),
            ("conv1d", 1, 16, 3, 1),
            ("relu",),
            ("conv1d", 16, 4, 2, 1),
            ("relu",),
            ("flatten",),
            ("dense", flat, 50),
            ("relu",),
            ("dense", 50, 1),
        ),
    )


def model_spec(kind: str, input_width: int) -> ModelSpec:
    kind = kind.lower()
    if kind == "dnn":
        return dnn_spec(input_width)
    if kind == "cnn":
        return cnn_spec(input_width)
    raise ValueError(f"unknown model kind {kind!r}")


def _build_layer(desc):
    tag = desc[0]
    if tag == "dense":
        return Dense(desc[1], desc[2])
    if tag == "relu":
        return ReLU()
    if tag == "batchnorm":
        return BatchNorm1d(desc[1])
    if tag == "dropout":
        return Dropout(desc[1])
    if tag == "conv1d":
        return Conv1d(desc[1], desc[2], desc[3], desc[4])
    if tag == "flatten":
        return Flatten()
    if tag == "input1d":
        return SequenceInput(desc[1], desc[2])
    raise ValueError(f"unknown layer descriptor {desc!r}")


class Network:
    """A stack of layers plus the RNG that drives dropout masks.

    Weights and biases are drawn Uniform(-sqrt(1/fan_in), +sqrt(1/fan_in))
    per layer in declaration order; batchnorm starts at identity with zero
    running mean and unit running variance; everything is deterministic for
    a given seed.
    """

    def __init__(self, spec: ModelSpec, seed: int = 0):
        self.spec = spec
        self.seed = seed
        self.layers = [_build_layer(d) for d in spec.layers]
        self.rng = np.random.default_rng(seed)
        for layer in self.layers:
            layer.init_params(self.rng)

    def forward(self, x, train: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.spec.input_width:
            raise ShapeMismatch(
                f"expected (n, {self.spec.input_width}) input, got {x.shape}"
            )
        for layer in self.layers:
            x = layer.forward(x, train, rng=self.rng)
        return x

    def backward(self, dlogits) -> list[dict]:
        d = np.asarray(dlogits, dtype=np.float64)
        for layer in reversed(self.layers):
            d = layer.backward(d)
        return self.grads()

    def params(self) -> list[dict]:
        return [layer.params() for layer in self.layers]

    def grads(self) -> list[dict]:
        return [layer.grads() for layer in self.layers]

    def predict_proba(self, x) -> np.ndarray:
        """Eval-mode sigmoid probabilities of the positive class, shape (n,)."""
        logits = self.forward(x, train=False).reshape(-1)
        return _sigmoid(logits)

    # --- serialization ---

    def to_state(self) -> dict:
        state = {
            "version": STATE_VERSION,
            "kind": self.spec.kind,
            "input_width": self.spec.input_width,
            "layers": [list(d) for d in self.spec.layers],
            "seed": self.seed,
            "params": [
                {k: v.tolist() for k, v in layer.params().items()}
                for layer in self.layers
            ],
            "running": [
                {
                    "mean": layer.running_mean.tolist(),
                    "var": layer.running_var.tolist(),
                }
                if isinstance(layer, BatchNorm1d)
                else None
                for layer in self.layers
            ],
        }
        return state

    @classmethod
    def from_state(cls, state: dict) -> "Network":
        if state.get("version") != STATE_VERSION:
            raise ValueError(f"unsupported model state version {state.get('version')!r}")
        spec = ModelSpec(
            kind=state["kind"],
            input_width=state["input_width"],
            layers=tuple(tuple(d) for d in state["layers"]),
        )
        net = cls(spec, seed=state["seed"])
        for layer, saved, running in zip(net.layers, state["params"], state["running"]):
            for name, current in layer.params().items():
                current[...] = np.asarray(saved[name], dtype=np.float64)
            if running is not None:
                layer.running_mean = np.asarray(running["mean"], dtype=np.float64)
                layer.running_var = np.asarray(running["var"], dtype=np.float64)
        return net

    def save(self, path: str):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_state(), fh)

    @classmethod
    def load(cls, path: str) -> "Network":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_state(json.load(fh))


def train(
    spec: ModelSpec,
    X,
    y,
    cfg: TrainConfig | None = None,
    seed: int = 0,
) -> tuple[Network, list[float]]:
    """Full-batch training loop; returns the network and per-epoch losses.

    Raises NonFiniteLoss (with the epoch index) if training diverges.
    """
    cfg = cfg or TrainConfig()
    X, y = check_X_y(X, y)
    net = Network(spec, seed=seed)
    opt = Adam(cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon)
    history: list[float] = []
    for epoch in range(cfg.epochs):
        logits = net.forward(X, train=True)
        if cfg.loss == "focal":
            loss, dlogits = focal_loss(logits, y, cfg.focal_alpha, cfg.focal_gamma)
        else:
            loss, dlogits = bce_loss(logits, y)
        if not np.isfinite(loss):
            raise NonFiniteLoss(epoch)
        grads = net.backward(dlogits)
        opt.step(net.params(), grads)
        history.append(loss)
    return net, history


class _NetClassifier(BaseEstimator):
    """Shared estimator wrapper: fit/predict/predict_proba over a Network."""

    _kind = ""

    def __init__(
        self,
        epochs: int = 2000,
        learning_rate: float = 0.001,
        loss: str = "focal",
        focal_alpha: float = 0.25,
        focal_gamma: float = 2.0,
        seed: int = 0,
    ):
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.loss = loss
        self.focal_alpha = focal_alpha
        self.focal_gamma = focal_gamma
        self.seed = seed

    def _train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            loss=self.loss,
            focal_alpha=self.focal_alpha,
            focal_gamma=self.focal_gamma,
        )

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        spec = model_spec(self._kind, X.shape[1])
        self.network_, self.loss_history_ = train(
            spec, X, y, self._train_config(), seed=self.seed
        )
        return self

    def predict_proba(self, X) -> np.ndarray:
        """P(y = 1) per row, shape (n,)."""
        return self.network_.predict_proba(check_matrix(X))

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)


class DNNClassifier(_NetClassifier):
    """Dense network trained full-batch with Adam and focal/BCE loss."""

    _kind = "dnn"


class CNNClassifier(_NetClassifier):
    """1-D convolutional network trained full-batch with Adam and focal/BCE loss."""

    _kind = "cnn"
