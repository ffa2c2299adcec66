"""Repeated-run experiment harness: resample, normalize, split, train, evaluate.

Each run derives its own seed from the master seed, so runs are independent
and the whole experiment is a pure function of its configuration; parallel
execution cannot change any reported number. Two pipeline orders are
supported: ``sound`` (split first; the sampler and the normalizer see only
training rows) and ``paper`` (resample and normalize the full dataset
before splitting, which leaks test information and is provided for
replication of published setups).

Reported wall time is always written as 0 in JSON/CSV outputs so that
re-running a configuration yields byte-identical files; measured timings go
to the module logger instead.
"""

from __future__ import annotations

import concurrent.futures
import json
import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .datasets import Dataset, load_dataset, stratified_split
from .exceptions import AllUndefined, ImbkitError
from .metrics import ConfusionMatrix, MetricsReport, auc, compute_metrics, confusion, roc_curve
from .nn.models import TrainConfig, model_spec, train
from .preprocessing import apply_minmax, fit_minmax
from .resampling import SamplerConfig, resample

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One SplitMix64 step; used to derive independent per-run seeds."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master_seed: int, run_index: int) -> int:
    return splitmix64((master_seed & _MASK64) ^ run_index)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset_path: str
    sampler: str = "smote"
    sampler_config: SamplerConfig = field(default_factory=SamplerConfig)
    model: str = "cnn"
    train_config: TrainConfig = field(default_factory=TrainConfig)
    runs: int = 100
    train_fraction: float = 0.8
    master_seed: int = 0
    leakage_mode: str = "sound"
    parallel: int = 1
    instrument: bool = False

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.leakage_mode not in ("sound", "paper"):
            raise ValueError(f"leakage_mode must be 'sound' or 'paper', got {self.leakage_mode!r}")
        if self.train_config.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass(frozen=True)
class RunAudit:
    """Parent-row index sets seen by pipeline stages (instrumented runs only)."""

    sampler_input_indices: tuple[int, ...]
    normalizer_input_indices: tuple[int, ...]
    test_indices: tuple[int, ...] | None


@dataclass(frozen=True)
class RunResult:
    run: int
    seed: int
    confusion: ConfusionMatrix
    metrics: MetricsReport
    final_loss: float
    wall_ms: int = 0
    roc_points: tuple[tuple[float, float], ...] = ()
    audit: RunAudit | None = None


@dataclass(frozen=True)
class MetricStats:
    mean: float
    stddev: float
    n_defined: int


@dataclass(frozen=True)
class AggregateReport:
    config: dict
    runs: tuple[RunResult, ...]
    aggregate: dict[str, MetricStats]
    roc_best_auc: tuple[tuple[float, float], ...]


class ExperimentError(ImbkitError):
    """A run failed; carries the run index."""

    def __init__(self, run_index: int, cause: BaseException):
        self.run_index = run_index
        super().__init__(f"run {run_index} failed: {cause}")


def aggregate(results) -> dict[str, MetricStats]:
    """Mean and population standard deviation per metric over defined values."""
    if not results:
        raise ValueError("no results to aggregate")
    out: dict[str, MetricStats] = {}
    for name in MetricsReport.FIELDS:
        values = [
            getattr(r.metrics, name) for r in results if getattr(r.metrics, name) is not None
        ]
        if not values:
            raise AllUndefined(f"metric {name!r} undefined in every run")
        arr = np.asarray(values, dtype=np.float64)
        out[name] = MetricStats(
            mean=float(arr.mean()),
            stddev=float(arr.std()),
            n_defined=len(values),
        )
    return out


def _pipeline(cfg: ExperimentConfig, ds: Dataset, run_index: int):
    """Resample/normalize/split one run; returns train, test, seeds, audit."""
    seed = derive_seed(cfg.master_seed, run_index)
    sampler_seed = splitmix64(seed ^ 1)
    split_seed = splitmix64(seed ^ 2)
    model_seed = splitmix64(seed ^ 3)
    sampler_cfg = replace(cfg.sampler_config, seed=sampler_seed)

    audit = None
    if cfg.leakage_mode == "paper":
        result = resample(ds, cfg.sampler, sampler_cfg)
        params = fit_minmax(result.dataset)
        normalized = apply_minmax(params, result.dataset)
        pair = stratified_split(normalized, cfg.train_fraction, split_seed)
        train_ds, test_ds = pair.train, pair.test
        if cfg.instrument:
            everything = tuple(range(ds.n))
            audit = RunAudit(everything, everything, None)
    else:
        pair = stratified_split(ds, cfg.train_fraction, split_seed)
        result = resample(pair.train, cfg.sampler, sampler_cfg)
        params = fit_minmax(result.dataset)
        train_ds = apply_minmax(params, result.dataset)
        test_ds = apply_minmax(params, pair.test)
        train_parents = tuple(int(i) for i in pair.train_indices)
        test_parents = tuple(int(i) for i in pair.test_indices)
        if set(train_parents) & set(test_parents):
            raise AssertionError("train/test partitions overlap")
        if cfg.instrument:
            audit = RunAudit(train_parents, train_parents, test_parents)
    return train_ds, test_ds, seed, model_seed, audit


_DEAD_RETRIES = 5


def _train_live(cfg: ExperimentConfig, train_ds: Dataset, model_seed: int, run_index: int):
    """Train, reseeding deterministically if the network collapses.

    The narrow ReLU head can die under full-batch descent (every training
    row gets the same score, so the model is a constant). That outcome is
    an artifact of the initialization draw, not of the data, so the run is
    retrained with the next derived seed, a bounded number of times.
    """
    spec = model_spec(cfg.model, train_ds.d)
    seed = model_seed
    for attempt in range(_DEAD_RETRIES):
        network, history = train(
            spec, train_ds.features, train_ds.labels, cfg.train_config, seed=seed
        )
        scores = network.predict_proba(train_ds.features)
        if scores.max() - scores.min() > 1e-9:
            return network, history
        seed = splitmix64(seed ^ (attempt + 1))
        logger.warning(
            "run %d: constant-output network (dead head); retraining with "
            "derived seed %d (attempt %d)", run_index, seed, attempt + 1,
        )
    return network, history


def _run_one(cfg: ExperimentConfig, ds: Dataset, run_index: int) -> RunResult:
    t0 = time.perf_counter()
    train_ds, test_ds, seed, model_seed, audit = _pipeline(cfg, ds, run_index)
    network, history = _train_live(cfg, train_ds, model_seed, run_index)
    scores = network.predict_proba(test_ds.features)
    predictions = (scores >= 0.5).astype(np.int64)
    cm = confusion(test_ds.labels, predictions)
    points = roc_curve(test_ds.labels, scores)
    report = compute_metrics(cm, auc=auc(points))
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    logger.info("run %d finished in %.1f ms", run_index, elapsed_ms)
    return RunResult(
        run=run_index,
        seed=seed,
        confusion=cm,
        metrics=report,
        final_loss=history[-1],
        wall_ms=0,
        roc_points=tuple(points),
        audit=audit,
    )


def _config_echo(cfg: ExperimentConfig) -> dict:
    sc = cfg.sampler_config
    tc = cfg.train_config
    return {
        "dataset": cfg.dataset_path,
        "sampler": {
            "kind": cfg.sampler,
            "smote_k": sc.smote_k,
            "nearmiss_variant": sc.nearmiss_variant,
            "nearmiss_m": sc.nearmiss_m,
            "nearmiss3_per_minority": sc.nearmiss3_per_minority,
            "target_ratio": sc.target_ratio,
        },
        "model": cfg.model,
        "train": {
            "learning_rate": tc.learning_rate,
            "adam_beta1": tc.adam_beta1,
            "adam_beta2": tc.adam_beta2,
            "adam_epsilon": tc.adam_epsilon,
            "epochs": tc.epochs,
            "loss": tc.loss,
            "focal_alpha": tc.focal_alpha,
            "focal_gamma": tc.focal_gamma,
        },
        "runs": cfg.runs,
        "train_fraction": cfg.train_fraction,
        "master_seed": cfg.master_seed,
        "leakage_mode": cfg.leakage_mode,
    }


def run_experiment(cfg: ExperimentConfig, dataset: Dataset | None = None) -> AggregateReport:
    """Execute every run and aggregate; a failed run aborts the experiment."""
    ds = dataset if dataset is not None else load_dataset(cfg.dataset_path)
    indices = list(range(cfg.runs))
    if cfg.parallel > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.parallel) as pool:
            futures = {pool.submit(_run_one, cfg, ds, i): i for i in indices}
            results = [None] * cfg.runs
            for future, i in futures.items():
                try:
                    results[i] = future.result()
                except Exception as exc:
                    raise ExperimentError(i, exc) from exc
    else:
        results = []
        for i in indices:
            try:
                results.append(_run_one(cfg, ds, i))
            except Exception as exc:
                raise ExperimentError(i, exc) from exc
    best = max(results, key=lambda r: (r.metrics.auc, -r.run))
    return AggregateReport(
        config=_config_echo(cfg),
        runs=tuple(results),
        aggregate=aggregate(results),
        roc_best_auc=best.roc_points,
    )


def final_model(cfg: ExperimentConfig, dataset: Dataset | None = None):
    """Retrain the last run's model (used by the CLI --save-model flag)."""
    ds = dataset if dataset is not None else load_dataset(cfg.dataset_path)
    train_ds, _, _, model_seed, _ = _pipeline(cfg, ds, cfg.runs - 1)
    network, _ = _train_live(cfg, train_ds, model_seed, cfg.runs - 1)
    return network


# --- serialization ---


def report_to_dict(report: AggregateReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "config": report.config,
        "runs": [
            {
                "run": r.run,
                "seed": r.seed,
                "confusion": {
                    "tp": r.confusion.tp,
                    "fn": r.confusion.fn,
                    "fp": r.confusion.fp,
                    "tn": r.confusion.tn,
                },
                "metrics": {
                    name: {"value": getattr(r.metrics, name)}
                    for name in MetricsReport.FIELDS
                },
                "final_loss": r.final_loss,
                "wall_ms": r.wall_ms,
            }
            for r in report.runs
        ],
        "aggregate": {
            name: {
                "mean": stats.mean,
                "stddev": stats.stddev,
                "n_defined": stats.n_defined,
            }
            for name, stats in report.aggregate.items()
        },
        "roc_best_auc": [[f, t] for f, t in report.roc_best_auc],
    }


def report_to_json(report: AggregateReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def report_from_json(text: str) -> AggregateReport:
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
    runs = tuple(
        RunResult(
            run=r["run"],
            seed=r["seed"],
            confusion=ConfusionMatrix(**r["confusion"]),
            metrics=MetricsReport(**{k: v["value"] for k, v in r["metrics"].items()}),
            final_loss=r["final_loss"],
            wall_ms=r["wall_ms"],
        )
        for r in doc["runs"]
    )
    agg = {
        name: MetricStats(mean=s["mean"], stddev=s["stddev"], n_defined=s["n_defined"])
        for name, s in doc["aggregate"].items()
    }
    return AggregateReport(
        config=doc["config"],
        runs=runs,
        aggregate=agg,
        roc_best_auc=tuple((f, t) for f, t in doc["roc_best_auc"]),
    )


def report_to_csv(report: AggregateReport) -> str:
    """One row per run plus a terminal mean row over the defined values."""
    header = (
        ["run", "seed", "tp", "fn", "fp", "tn"]
        + list(MetricsReport.FIELDS)
        + ["final_loss", "wall_ms"]
    )

    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return repr(v)
        return str(v)

    lines = [",".join(header)]
    for r in report.runs:
        row = [
            str(r.run),
            str(r.seed),
            str(r.confusion.tp),
            str(r.confusion.fn),
            str(r.confusion.fp),
            str(r.confusion.tn),
        ]
        row += [fmt(getattr(r.metrics, name)) for name in MetricsReport.FIELDS]
        row += [repr(r.final_loss), str(r.wall_ms)]
        lines.append(",".join(row))
    mean_row = ["mean", "", "", "", "", ""]
    mean_row += [repr(report.aggregate[name].mean) for name in MetricsReport.FIELDS]
    mean_row += ["", ""]
    lines.append(",".join(mean_row))
    return "\n".join(lines) + "\n"


def emit_report(report: AggregateReport, fmt: str, path: str):
    if fmt == "json":
        text = report_to_json(report)
    elif fmt == "csv":
        text = report_to_csv(report)
    else:
        raise ValueError(f"format must be 'json' or 'csv', got {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
