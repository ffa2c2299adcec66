"""Class-imbalance toolkit: resamplers, normalization, from-scratch DNN/CNN
classifiers with focal loss, an eight-metric evaluation suite, and a
repeated-run benchmark harness for KEEL-style datasets."""

from . import exceptions
from .bench import (
    AggregateReport,
    ExperimentConfig,
    RunResult,
    aggregate,
    derive_seed,
    emit_report,
    report_from_json,
    report_to_json,
    run_experiment,
)
from .datasets import (
    Dataset,
    SplitPair,
    imbalance_ratio,
    load_dataset,
    parse_csv,
    parse_keel,
    serialize_csv,
    serialize_keel,
    stratified_split,
)
from .metrics import (
    ConfusionMatrix,
    MetricsReport,
    auc,
    compute_metrics,
    confusion,
    kappa_band,
    roc_auc,
    roc_curve,
)
from .neighbors import NeighborList, euclidean, k_nearest, mean_distance_to
from .nn import CNNClassifier, DNNClassifier, Network, TrainConfig, train
from .preprocessing import (
    MinMaxNormalizer,
    NormalizationParams,
    apply_minmax,
    fit_minmax,
    transform_minmax,
)
from .resampling import (
    KINDS,
    SMOTE,
    IdentitySampler,
    NearMiss,
    OneSidedSelection,
    RandomOverSampler,
    RandomUnderSampler,
    ResampleResult,
    SamplerConfig,
    TomekLinks,
    find_tomek_links,
    make_sampler,
    resample,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateReport",
    "CNNClassifier",
    "ConfusionMatrix",
    "DNNClassifier",
    "Dataset",
    "ExperimentConfig",
    "IdentitySampler",
    "KINDS",
    "MetricsReport",
    "MinMaxNormalizer",
    "NearMiss",
    "NeighborList",
    "Network",
    "NormalizationParams",
    "OneSidedSelection",
    "RandomOverSampler",
    "RandomUnderSampler",
    "ResampleResult",
    "RunResult",
    "SMOTE",
    "SamplerConfig",
    "SplitPair",
    "TomekLinks",
    "TrainConfig",
    "aggregate",
    "apply_minmax",
    "auc",
    "compute_metrics",
    "confusion",
    "derive_seed",
    "emit_report",
    "euclidean",
    "exceptions",
    "find_tomek_links",
    "fit_minmax",
    "imbalance_ratio",
    "k_nearest",
    "kappa_band",
    "load_dataset",
    "make_sampler",
    "mean_distance_to",
    "parse_csv",
    "parse_keel",
    "report_from_json",
    "report_to_json",
    "resample",
    "roc_auc",
    "roc_curve",
    "run_experiment",
    "serialize_csv",
    "serialize_keel",
    "stratified_split",
    "train",
    "transform_minmax",
]
