"""Command-line surface: inspect, resample, metrics, run, matrix.

Exit codes: 0 success, 1 flag/validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv as _csv
import glob
import io
import json
import logging
import os
import sys

from .bench import (
    ExperimentConfig,
    MetricStats,
    emit_report,
    final_model,
    run_experiment,
)
from .datasets import imbalance_ratio, load_dataset, serialize_csv, serialize_keel
from .exceptions import ImbkitError
from .metrics import (
    MetricsReport,
    auc,
    compute_metrics,
    confusion,
    kappa_band,
    roc_curve,
)
from .nn.models import TrainConfig
from .resampling import KINDS, SamplerConfig, resample

logger = logging.getLogger(__name__)


class _ExitOne(argparse.ArgumentParser):
    """argparse variant whose usage errors exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _master_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("IMB_SEED")
    return int(env) if env else 0


def _add_run_flags(p: argparse.ArgumentParser):
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=None, help="master seed (IMB_SEED fallback)")
    p.add_argument("--leakage-mode", choices=("sound", "paper"), default="sound")
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--learning-rate", type=float, default=0.001)
    p.add_argument("--loss", choices=("focal", "bce"), default="focal")
    p.add_argument("--focal-alpha", type=float, default=0.25)
    p.add_argument("--focal-gamma", type=float, default=2.0)
    p.add_argument("--smote-k", type=int, default=5)
    p.add_argument("--nearmiss-m", type=int, default=3)
    p.add_argument("--nearmiss3-per-minority", type=int, default=3)
    p.add_argument("--target-ratio", type=float, default=1.0)


def _sampler_config(args, seed: int) -> SamplerConfig:
    return SamplerConfig(
        smote_k=args.smote_k,
        nearmiss_m=args.nearmiss_m,
        nearmiss3_per_minority=args.nearmiss3_per_minority,
        target_ratio=args.target_ratio,
        seed=seed,
    )


def _experiment_config(args, dataset_path: str, sampler: str, model: str) -> ExperimentConfig:
    seed = _master_seed(args.seed)
    return ExperimentConfig(
        dataset_path=dataset_path,
        sampler=sampler,
        sampler_config=_sampler_config(args, seed),
        model=model,
        train_config=TrainConfig(
            learning_rate=args.learning_rate,
            epochs=args.epochs,
            loss=args.loss,
            focal_alpha=args.focal_alpha,
            focal_gamma=args.focal_gamma,
        ),
        runs=args.runs,
        train_fraction=args.train_fraction,
        master_seed=seed,
        leakage_mode=args.leakage_mode,
        parallel=args.parallel,
    )


def cmd_inspect(args) -> int:
    ds = load_dataset(args.path, label_column=args.label_column)
    print(f"{'name':<16} {'attributes':>10} {'samples':>8} {'minority':>9} "
          f"{'majority':>9} {'ratio':>6}")
    print(f"{ds.name:<16} {ds.d:>10} {ds.n:>8} {ds.minority_count:>9} "
          f"{ds.majority_count:>9} {imbalance_ratio(ds):>6.2f}")
    return 0


def cmd_resample(args) -> int:
    ds = load_dataset(args.dataset, label_column=args.label_column)
    cfg = SamplerConfig(
        smote_k=args.smote_k,
        nearmiss_m=args.nearmiss_m,
        nearmiss3_per_minority=args.nearmiss3_per_minority,
        target_ratio=args.target_ratio,
        seed=_master_seed(args.seed),
    )
    result = resample(ds, args.sampler, cfg)
    text = serialize_keel(result.dataset) if args.format == "keel" else serialize_csv(result.dataset)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    sidecar = args.provenance or args.out + ".provenance.json"
    with open(sidecar, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "kind": result.kind,
                "removed_indices": list(result.removed_indices),
                "synthetic_lineage": [
                    [b, nb, lam] for b, nb, lam in result.synthetic_lineage
                ],
                "duplicated_indices": list(result.duplicated_indices),
            },
            fh,
            indent=2,
        )
        fh.write("\n")
    out_ds = result.dataset
    print(
        f"{ds.name}: {ds.n} rows -> {out_ds.n} rows "
        f"({out_ds.minority_count} minority / {out_ds.majority_count} majority), "
        f"wrote {args.out} and {sidecar}"
    )
    return 0


def cmd_metrics(args) -> int:
    with open(args.scores, "r", encoding="utf-8") as fh:
        text = fh.read()
    labels, scores = [], []
    for row in _csv.reader(io.StringIO(text)):
        if not row or not any(c.strip() for c in row):
            continue
        try:
            label, score = float(row[0]), float(row[1])
        except ValueError:
            continue  # header row
        labels.append(int(label))
        scores.append(score)
    if not labels:
        raise ImbkitError(f"no (label, score) rows found in {args.scores}")
    predictions = [1 if s >= 0.5 else 0 for s in scores]
    cm = confusion(labels, predictions)
    points = roc_curve(labels, scores)
    report = compute_metrics(cm, auc=auc(points))
    doc = {
        "confusion": {"tp": cm.tp, "fn": cm.fn, "fp": cm.fp, "tn": cm.tn},
        "metrics": report.as_dict(),
        "kappa_band": kappa_band(report.kappa) if report.kappa is not None else None,
    }
    print(json.dumps(doc, indent=2))
    if args.roc_out:
        with open(args.roc_out, "w", encoding="utf-8") as fh:
            fh.write("fpr,tpr\n")
            for f, t in points:
                fh.write(f"{f!r},{t!r}\n")
    return 0


def cmd_run(args) -> int:
    cfg = _experiment_config(args, args.dataset, args.sampler, args.model)
    report = run_experiment(cfg)
    means = " ".join(
        f"{name}={report.aggregate[name].mean:.4f}" for name in MetricsReport.FIELDS
    )
    print(f"{os.path.basename(args.dataset)} {args.sampler}+{args.model} "
          f"runs={args.runs} | {means}")
    if args.report:
        emit_report(report, args.format, args.report)
    if args.save_model:
        final_model(cfg).save(args.save_model)
    return 0


def cmd_matrix(args) -> int:
    paths = sorted(glob.glob(args.datasets))
    if not paths:
        print(f"no datasets match {args.datasets!r}", file=sys.stderr)
        return 1
    samplers = [s.strip() for s in args.samplers.split(",") if s.strip()]
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    os.makedirs(args.outdir, exist_ok=True)

    cells: dict[tuple[str, str], list] = {(s, m): [] for s in samplers for m in models}
    failures: dict[tuple[str, str], int] = {(s, m): 0 for s in samplers for m in models}
    any_ok = False
    for path in paths:
        stem = os.path.splitext(os.path.basename(path))[0]
        for sampler in samplers:
            for model in models:
                cfg = _experiment_config(args, path, sampler, model)
                try:
                    report = run_experiment(cfg)
                except Exception as exc:
                    failures[(sampler, model)] += 1
                    print(f"cell {stem}/{sampler}/{model} failed: {exc}", file=sys.stderr)
                    continue
                any_ok = True
                out = os.path.join(args.outdir, f"{stem}_{sampler}_{model}.json")
                emit_report(report, "json", out)
                cells[(sampler, model)].append(report.aggregate)

    summary_rows = []
    for (sampler, model), aggs in cells.items():
        if not aggs:
            summary_rows.append((f"{sampler}+{model}", 0, None, failures[(sampler, model)]))
            continue
        means = {
            name: sum(a[name].mean for a in aggs) / len(aggs)
            for name in MetricsReport.FIELDS
        }
        summary_rows.append((f"{sampler}+{model}", len(aggs), means, failures[(sampler, model)]))

    best_acc = max(
        (row[2]["accuracy"] for row in summary_rows if row[2] is not None),
        default=None,
    )
    summary_path = os.path.join(args.outdir, "summary.csv")
    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write("combo,n_datasets," + ",".join(MetricsReport.FIELDS) + ",n_failed,best\n")
        for combo, n_ds, means, n_failed in summary_rows:
            if means is None:
                cells_txt = "," * (len(MetricsReport.FIELDS) - 1)
                flag = ""
            else:
                cells_txt = ",".join(repr(means[name]) for name in MetricsReport.FIELDS)
                flag = "*" if means["accuracy"] == best_acc else ""
            fh.write(f"{combo},{n_ds},{cells_txt},{n_failed},{flag}\n")
    print(f"wrote {summary_path} ({len(summary_rows)} combos over {len(paths)} datasets)")
    return 0 if any_ok else 2


def build_parser() -> argparse.ArgumentParser:
    parser = _ExitOne(prog="imbkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ExitOne)

    p = sub.add_parser("inspect", help="print dataset descriptors")
    p.add_argument("path")
    p.add_argument("--label-column", default=None)
    p.set_defaults(fn=cmd_inspect)

    p = sub.add_parser("resample", help="apply one sampler and write the result")
    p.add_argument("--dataset", required=True)
    p.add_argument("--label-column", default=None)
    p.add_argument("--sampler", required=True, choices=KINDS)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--target-ratio", type=float, default=1.0)
    p.add_argument("--smote-k", type=int, default=5)
    p.add_argument("--nearmiss-m", type=int, default=3)
    p.add_argument("--nearmiss3-per-minority", type=int, default=3)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("keel", "csv"), default="keel")
    p.add_argument("--provenance", default=None)
    p.set_defaults(fn=cmd_resample)

    p = sub.add_parser("metrics", help="report metrics for a (label, score) CSV")
    p.add_argument("--scores", required=True)
    p.add_argument("--roc-out", default=None)
    p.set_defaults(fn=cmd_metrics)

    p = sub.add_parser("run", help="run one (dataset, sampler, model) experiment")
    p.add_argument("--dataset", required=True)
    p.add_argument("--sampler", choices=KINDS, default="smote")
    p.add_argument("--model", choices=("dnn", "cnn"), default="cnn")
    _add_run_flags(p)
    p.add_argument("--report", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--save-model", default=None)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("matrix", help="run a dataset x sampler x model grid")
    p.add_argument("--datasets", required=True, help="glob of dataset files")
    p.add_argument("--samplers", required=True, help="comma-separated sampler kinds")
    p.add_argument("--models", required=True, help="comma-separated model kinds")
    _add_run_flags(p)
    p.add_argument("--outdir", required=True)
    p.set_defaults(fn=cmd_matrix)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
    except ValueError as exc:
        print(f"imbkit: error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.fn(args)
    except FileNotFoundError as exc:
        print(f"imbkit: error: cannot open {exc.filename!r}", file=sys.stderr)
        return 1
    except ImbkitError as exc:
        print(f"imbkit: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"imbkit: error: {exc}", file=sys.stderr)
        return 2


def _validate(args):
    if getattr(args, "runs", None) is not None and args.runs < 1:
        raise ValueError("--runs must be >= 1")
    if getattr(args, "epochs", None) is not None and args.epochs < 1:
        raise ValueError("--epochs must be >= 1")
    if getattr(args, "train_fraction", None) is not None and not 0 < args.train_fraction < 1:
        raise ValueError("--train-fraction must be in (0, 1)")
    if getattr(args, "parallel", None) is not None and args.parallel < 1:
        raise ValueError("--parallel must be >= 1")
    if getattr(args, "target_ratio", None) is not None and args.target_ratio <= 0:
        raise ValueError("--target-ratio must be > 0")


if __name__ == "__main__":
    sys.exit(main())
