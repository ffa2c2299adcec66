"""KEEL ``.dat`` / CSV parsing, dataset descriptors, and stratified splits.

The canonical in-memory form is :class:`Dataset`: a float64 feature matrix
with 0/1 labels where label 1 is always the minority (positive) class and
label 0 the majority (negative) class.
"""

from __future__ import annotations

import csv as _csv
import io
import math
import os
import re
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DegenerateSplit,
    EmptyData,
    MalformedHeader,
    NonBinaryClass,
    NonNumericValue,
    UnknownLabelColumn,
)

_NUMERIC_TYPES = {"real", "integer", "numeric"}


@dataclass(frozen=True)
class Dataset:
    """Immutable binary-classification dataset.

    Attributes
    ----------
    name : str
        Relation name (KEEL ``@relation``) or file stem.
    features : np.ndarray of shape (n, d)
        Finite float64 feature matrix.
    labels : np.ndarray of shape (n,)
        0/1 labels; 1 is the positive/minority class.
    attribute_names : tuple of str
        One name per feature column (one-hot columns are ``attr=value``).
    source_encoding : dict
        Nominal attribute name -> declared values it was expanded over.
    """

    name: str
    features: np.ndarray
    labels: np.ndarray
    attribute_names: tuple[str, ...]
    source_encoding: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        feats = np.array(self.features, dtype=np.float64, order="C", copy=True)
        labs = np.array(self.labels, dtype=np.int64, copy=True)
        if feats.ndim != 2:
            raise ValueError(f"features must be 2-D, got ndim={feats.ndim}")
        n, d = feats.shape
        if n < 2 or d < 1:
            raise ValueError(f"dataset needs n >= 2 and d >= 1, got {feats.shape}")
        if not np.isfinite(feats).all():
            raise NonNumericValue("features contain NaN or inf")
        if labs.shape != (n,):
            raise ValueError(f"{labs.shape} labels for {n} rows")
        if not np.isin(labs, (0, 1)).all():
            raise ValueError("labels must be 0/1")
        if not (labs == 0).any() or not (labs == 1).any():
            raise ValueError("both classes must be present")
        if len(self.attribute_names) != d:
            raise ValueError(f"{len(self.attribute_names)} attribute names for d={d}")
        feats.flags.writeable = False
        labs.flags.writeable = False
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)
        object.__setattr__(self, "attribute_names", tuple(self.attribute_names))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def minority_count(self) -> int:
        return int((self.labels == 1).sum())

    @property
    def majority_count(self) -> int:
        return int((self.labels == 0).sum())

    def take(self, indices, name: str | None = None) -> "Dataset":
        """Row subset (keeps attribute metadata)."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            name=self.name if name is None else name,
            features=self.features[idx],
            labels=self.labels[idx],
            attribute_names=self.attribute_names,
            source_encoding=dict(self.source_encoding),
        )


@dataclass(frozen=True)
class SplitPair:
    """A stratified train/test partition of a parent dataset."""

    train: Dataset
    test: Dataset
    train_fraction: float
    seed: int
    train_indices: np.ndarray
    test_indices: np.ndarray


def imbalance_ratio(ds: Dataset) -> float:
    """Majority count divided by minority count."""
    return ds.majority_count / ds.minority_count


def _to_float(cell: str, where: str) -> float:
    cell = cell.strip()
    if cell in ("", "?"):
        raise NonNumericValue(f"missing value at {where}")
    try:
        value = float(cell)
    except ValueError:
        raise NonNumericValue(f"cannot parse {cell!r} at {where}") from None
    if not math.isfinite(value):
        raise NonNumericValue(f"non-finite value {cell!r} at {where}")
    return value


def _canonical_labels(raw: list[str], declared_order: list[str] | None):
    """Map the two observed class values to 0/1 with the rarer value as 1.

    Ties go to the value seen first in the attribute declaration (or, when
    no declaration exists, first in the data).
    """
    observed: list[str] = []
    for v in raw:
        if v not in observed:
            observed.append(v)
    if len(observed) != 2:
        raise NonBinaryClass(
            f"class attribute has {len(observed)} observed values: {observed!r}"
        )
    counts = {v: raw.count(v) for v in observed}
    a, b = observed
    if counts[a] < counts[b]:
        positive = a
    elif counts[b] < counts[a]:
        positive = b
    else:
        order = declared_order if declared_order else observed
        positive = next(v for v in order if v in observed)
    return np.array([1 if v == positive else 0 for v in raw], dtype=np.int64)


def parse_keel(text: str, name: str | None = None) -> Dataset:
    """Parse a KEEL ``.dat`` file into a canonical :class:`Dataset`.

    Numeric attributes become columns directly; nominal non-class
    attributes are one-hot expanded over their declared values. The class
    attribute is the one named by ``@outputs`` (the last attribute when
    absent) and its rarer value maps to label 1.
    """
    relation = None
    attributes: list[tuple[str, list[str] | None]] = []  # (name, nominal values)
    outputs: list[str] = []
    data_lines: list[str] = []
    in_data = False

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("%"):
            continue
        if in_data:
            data_lines.append(line)
            continue
        lower = line.lower()
        if lower.startswith("@relation"):
            relation = line[len("@relation"):].strip() or None
        elif lower.startswith("@attribute"):
            body = line[len("@attribute"):].strip()
            m = re.match(r"^('[^']*'|\"[^\"]*\"|\S+)\s*(.*)$", body)
            if not m:
                raise MalformedHeader(f"unparseable @attribute line {lineno}: {line!r}")
            attr_name = m.group(1).strip("'\"")
            spec = m.group(2).strip()
            if spec.startswith("{"):
                end = spec.find("}")
                if end < 0:
                    raise MalformedHeader(f"unclosed nominal set on line {lineno}")
                values = [v.strip().strip("'\"") for v in spec[1:end].split(",")]
                attributes.append((attr_name, values))
            else:
                kind = spec.split("[")[0].strip().lower()
                if kind and kind not in _NUMERIC_TYPES:
                    raise MalformedHeader(
                        f"unknown attribute type {kind!r} on line {lineno}"
                    )
                attributes.append((attr_name, None))  # numeric; range ignored
        elif lower.startswith("@inputs"):
            pass  # informative only; the class column comes from @outputs
        elif lower.startswith("@outputs") or lower.startswith("@output"):
            rest = line.split(None, 1)[1] if len(line.split(None, 1)) > 1 else ""
            outputs = [v.strip() for v in rest.split(",") if v.strip()]
        elif lower.startswith("@data"):
            in_data = True
        else:
            raise MalformedHeader(f"unrecognized header line {lineno}: {line!r}")

    if relation is None:
        raise MalformedHeader("missing @relation")
    if not attributes:
        raise MalformedHeader("missing @attribute declarations")
    if not in_data:
        raise MalformedHeader("missing @data")
    if not data_lines:
        raise EmptyData("no data rows")

    attr_names = [a for a, _ in attributes]
    if outputs:
        if len(outputs) != 1 or outputs[0] not in attr_names:
            raise MalformedHeader(f"@outputs must name one attribute, got {outputs!r}")
        class_idx = attr_names.index(outputs[0])
    else:
        class_idx = len(attributes) - 1

    rows = []
    for i, line in enumerate(data_lines, start=1):
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != len(attributes):
            raise NonNumericValue(
                f"data row {i} has {len(cells)} cells, expected {len(attributes)}"
            )
        rows.append(cells)

    columns: list[np.ndarray] = []
    out_names: list[str] = []
    encoding: dict[str, tuple[str, ...]] = {}
    for j, (attr_name, nominal) in enumerate(attributes):
        if j == class_idx:
            continue
        col = [r[j] for r in rows]
        if nominal is None:
            columns.append(
                np.array(
                    [_to_float(c, f"row {i + 1}, column {attr_name!r}")
                     for i, c in enumerate(col)]
                )
            )
            out_names.append(attr_name)
        else:
            for i, c in enumerate(col):
                if c not in nominal:
                    raise NonNumericValue(
                        f"value {c!r} not among declared categories of "
                        f"{attr_name!r} (row {i + 1})"
                    )
            for value in nominal:
                columns.append(np.array([1.0 if c == value else 0.0 for c in col]))
                out_names.append(f"{attr_name}={value}")
            encoding[attr_name] = tuple(nominal)

    class_declared = attributes[class_idx][1]
    class_cells = [r[class_idx] for r in rows]
    if class_declared is not None:
        for i, c in enumerate(class_cells):
            if c not in class_declared:
                raise NonNumericValue(
                    f"class value {c!r} not among declared values (row {i + 1})"
                )
    labels = _canonical_labels(class_cells, class_declared)
    features = np.column_stack(columns)
    return Dataset(
        name=name or relation,
        features=features,
        labels=labels,
        attribute_names=tuple(out_names),
        source_encoding=encoding,
    )


def parse_csv(text: str, label_column: str | int, name: str = "csv") -> Dataset:
    """Parse an RFC-4180-style CSV (header row required) into a Dataset.

    ``label_column`` is a header name or a 0-based column index; every
    other cell must be numeric. Canonicalization matches :func:`parse_keel`
    (rarer class value -> label 1).
    """
    reader = _csv.reader(io.StringIO(text))
    table = [row for row in reader if row and any(c.strip() for c in row)]
    if not table:
        raise EmptyData("empty CSV")
    header = [c.strip() for c in table[0]]
    rows = [[c.strip() for c in r] for r in table[1:]]
    if not rows:
        raise EmptyData("CSV has a header but no data rows")

    if isinstance(label_column, str):
        if label_column not in header:
            raise UnknownLabelColumn(f"no column named {label_column!r} in {header!r}")
        label_idx = header.index(label_column)
    else:
        label_idx = int(label_column)
        if not 0 <= label_idx < len(header):
            raise UnknownLabelColumn(
                f"column index {label_idx} out of range for {len(header)} columns"
            )

    width = len(header)
    for i, r in enumerate(rows, start=1):
        if len(r) != width:
            raise NonNumericValue(f"data row {i} has {len(r)} cells, expected {width}")

    feature_idx = [j for j in range(width) if j != label_idx]
    features = np.array(
        [
            [_to_float(r[j], f"row {i + 1}, column {header[j]!r}") for j in feature_idx]
            for i, r in enumerate(rows)
        ]
    )
    labels = _canonical_labels([r[label_idx] for r in rows], None)
    return Dataset(
        name=name,
        features=features,
        labels=labels,
        attribute_names=tuple(header[j] for j in feature_idx),
        source_encoding={},
    )


def serialize_keel(ds: Dataset) -> str:
    """Write a Dataset back out as KEEL text (canonical numeric form).

    The class attribute is declared ``{positive, negative}`` so that
    re-parsing restores the same labels even for balanced data (ties map
    the first declared value to 1). Floats are written with ``repr`` and
    round-trip exactly.
    """
    lines = [f"@relation {ds.name}"]
    for attr in ds.attribute_names:
        lines.append(f"@attribute {attr} real")
    lines.append("@attribute class {positive, negative}")
    lines.append(f"@inputs {', '.join(ds.attribute_names)}")
    lines.append("@outputs class")
    lines.append("@data")
    for row, label in zip(ds.features, ds.labels):
        cells = [repr(float(v)) for v in row]
        cells.append("positive" if label == 1 else "negative")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def serialize_csv(ds: Dataset) -> str:
    """Write a Dataset as CSV with a header row and positive/negative labels."""
    out = io.StringIO()
    writer = _csv.writer(out, lineterminator="\n")
    writer.writerow(list(ds.attribute_names) + ["class"])
    for row, label in zip(ds.features, ds.labels):
        writer.writerow(
            [repr(float(v)) for v in row] + ["positive" if label == 1 else "negative"]
        )
    return out.getvalue()


def load_dataset(path: str, label_column: str | int | None = None) -> Dataset:
    """Load a dataset from disk, sniffing KEEL vs CSV from the contents."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stem = os.path.splitext(os.path.basename(path))[0]
    head = text.lstrip()[:1]
    if head == "@":
        return parse_keel(text, name=stem)
    if label_column is None:
        first = text.splitlines()[0] if text.splitlines() else ""
        ncols = len(first.split(","))
        label_column = ncols - 1
    return parse_csv(text, label_column=label_column, name=stem)


def stratified_split(ds: Dataset, train_fraction: float, seed: int) -> SplitPair:
    """Per-class shuffle, then per-class proportional cut.

    Train takes ``floor(train_fraction * n_class)`` rows from each class;
    the remainder goes to test. Deterministic for a given
    ``(ds, train_fraction, seed)``. Row order within each side follows the
    parent dataset.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    idx0 = np.flatnonzero(ds.labels == 0)
    idx1 = np.flatnonzero(ds.labels == 1)
    perm0 = rng.permutation(idx0)
    perm1 = rng.permutation(idx1)
    n_tr0 = math.floor(train_fraction * len(idx0))
    n_tr1 = math.floor(train_fraction * len(idx1))
    if min(n_tr0, n_tr1) < 1 or len(idx0) - n_tr0 < 1 or len(idx1) - n_tr1 < 1:
        raise DegenerateSplit(
            f"fraction {train_fraction} on class counts "
            f"({len(idx0)}, {len(idx1)}) leaves a partition without a class"
        )
    train_idx = np.sort(np.concatenate([perm0[:n_tr0], perm1[:n_tr1]]))
    test_idx = np.sort(np.concatenate([perm0[n_tr0:], perm1[n_tr1:]]))
    return SplitPair(
        train=ds.take(train_idx),
        test=ds.take(test_idx),
        train_fraction=train_fraction,
        seed=seed,
        train_indices=train_idx,
        test_indices=test_idx,
    )
