from .layers import BatchNorm1d, Conv1d, Dense, Dropout, Flatten, ReLU, SequenceInput
from .losses import bce_loss, bce_per_sample, focal_loss, focal_per_sample
from .models import (
    CNNClassifier,
    DNNClassifier,
    ModelSpec,
    Network,
    TrainConfig,
    cnn_spec,
    dnn_spec,
    model_spec,
    train,
)
from .optim import Adam

__all__ = [
    "Adam",
    "BatchNorm1d",
    "CNNClassifier",
    "Conv1d",
    "DNNClassifier",
    "Dense",
    "Dropout",
    "Flatten",
    "ModelSpec",
    "Network",
    "ReLU",
    "SequenceInput",
    "TrainConfig",
    "bce_loss",
    "bce_per_sample",
    "cnn_spec",
    "dnn_spec",
    "focal_loss",
    "focal_per_sample",
    "model_spec",
    "train",
]
