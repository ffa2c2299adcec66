"""The six resamplers: ROS, RUS, SMOTE, Tomek links, OSS, and NearMiss 1-3.

All samplers follow the estimator idiom: construct with hyperparameters,
call ``fit_resample(X, y)``, read provenance from fitted attributes
(``removed_indices_``, ``lineage_``, ``duplicated_indices_``). Label 1 is
the minority/positive class and label 0 the majority/negative class; target
sizes are computed from that convention.

Randomized samplers draw from ``numpy.random.default_rng(seed)`` with a
fixed draw protocol (documented per class) so results are reproducible and
independently checkable.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_X_y
from .datasets import Dataset
from .exceptions import DegenerateOutput, InsufficientCandidates, TooFewMinority
from .neighbors import k_nearest, mean_distance_to

logger = logging.getLogger(__name__)

KINDS = ("ros", "rus", "smote", "tl", "oss", "nearmiss1", "nearmiss2", "nearmiss3", "none")


@dataclass(frozen=True)
class SamplerConfig:
    """Knobs shared by the CLI and benchmark harness."""

    smote_k: int = 5
    nearmiss_variant: int = 1
    nearmiss_m: int = 3
    nearmiss3_per_minority: int = 3
    target_ratio: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.smote_k < 1:
            raise ValueError("smote_k must be >= 1")
        if self.target_ratio <= 0:
            raise ValueError("target_ratio must be > 0")


@dataclass(frozen=True)
class ResampleResult:
    """A resampled dataset plus provenance back into the input rows."""

    dataset: Dataset
    kind: str
    removed_indices: tuple[int, ...] = ()
    synthetic_lineage: tuple[tuple[int, int, float], ...] = ()
    duplicated_indices: tuple[int, ...] = ()

    def __post_init__(self):
        nonempty = [
            name
            for name, v in (
                ("removed_indices", self.removed_indices),
                ("synthetic_lineage", self.synthetic_lineage),
                ("duplicated_indices", self.duplicated_indices),
            )
            if len(v)
        ]
        allowed = {
            "ros": "duplicated_indices",
            "smote": "synthetic_lineage",
            "rus": "removed_indices",
            "tl": "removed_indices",
            "oss": "removed_indices",
            "nearmiss1": "removed_indices",
            "nearmiss2": "removed_indices",
            "nearmiss3": "removed_indices",
            "none": None,
        }[self.kind]
        if any(name != allowed for name in nonempty):
            raise ValueError(f"provenance {nonempty} inconsistent with kind {self.kind!r}")


def _class_indices(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.flatnonzero(y == 0), np.flatnonzero(y == 1)


def _keep_to_removed(n: int, keep_mask: np.ndarray) -> np.ndarray:
    return np.flatnonzero(~keep_mask)


class _Sampler(BaseEstimator):
    """Shared fit_resample shell; subclasses implement _fit_resample."""

    kind = "none"

    def fit_resample(self, X, y):
        X, y = check_X_y(X, y)
        return self._fit_resample(X, y)

    def _check_both_classes(self, keep_mask: np.ndarray, y: np.ndarray):
        kept = y[keep_mask]
        if not (kept == 0).any() or not (kept == 1).any():
            raise DegenerateOutput(
                f"{type(self).__name__} would remove every row of one class"
            )


class IdentitySampler(_Sampler):
    """Pass-through used for the no-resampling baseline."""

    kind = "none"

    def _fit_resample(self, X, y):
        return X.copy(), y.copy()


class RandomOverSampler(_Sampler):
    """Duplicate random minority rows until minority = round(majority * target_ratio).

    Draw protocol: ``picks = rng.integers(0, n_minority, size=n_new)``,
    mapped through the ascending minority index list; duplicates are
    appended after the originals in draw order.
    """

    kind = "ros"

    def __init__(self, target_ratio: float = 1.0, seed: int = 0):
        self.target_ratio = target_ratio
        self.seed = seed

    def _fit_resample(self, X, y):
        maj, mino = _class_indices(y)
        target = int(round(len(maj) * self.target_ratio))
        n_new = max(0, target - len(mino))
        rng = np.random.default_rng(self.seed)
        if n_new:
            picks = mino[rng.integers(0, len(mino), size=n_new)]
        else:
            picks = np.empty(0, dtype=np.int64)
        self.duplicated_indices_ = picks
        X_res = np.vstack([X, X[picks]]) if n_new else X.copy()
        y_res = np.concatenate([y, np.ones(n_new, dtype=y.dtype)])
        return X_res, y_res


class RandomUnderSampler(_Sampler):
    """Delete random majority rows until majority = round(minority / target_ratio).

    Draw protocol: the removed set is the first ``n_remove`` entries of
    ``rng.permutation(majority_indices)``. Survivors keep input order.
    """

    kind = "rus"

    def __init__(self, target_ratio: float = 1.0, seed: int = 0):
        self.target_ratio = target_ratio
        self.seed = seed

    def _fit_resample(self, X, y):
        maj, mino = _class_indices(y)
        target = int(round(len(mino) / self.target_ratio))
        if target < 1:
            raise DegenerateOutput(f"target majority count {target} < 1")
        n_remove = max(0, len(maj) - target)
        rng = np.random.default_rng(self.seed)
        removed = np.sort(rng.permutation(maj)[:n_remove])
        self.removed_indices_ = removed
        keep = np.ones(len(y), dtype=bool)
        keep[removed] = False
        self._check_both_classes(keep, y)
        self.kept_indices_ = np.flatnonzero(keep)
        return X[keep], y[keep]


class SMOTE(_Sampler):
    """Synthetic minority oversampling by interpolation between neighbors.

    Generates ``round(majority * target_ratio) - minority`` synthetic rows.
    Draw protocol per synthetic row: ``b = rng.integers(0, n_minority)``
    picks the base from the ascending minority index list, ``j =
    rng.integers(0, k)`` picks among its k nearest minority neighbors
    (distance ties broken by ascending row index), ``lam = rng.uniform()``
    sets the interpolation coefficient. k is clamped to ``n_minority - 1``
    with a logged warning when the class is tiny.
    """

    kind = "smote"

    def __init__(self, k: int = 5, target_ratio: float = 1.0, seed: int = 0):
        self.k = k
        self.target_ratio = target_ratio
        self.seed = seed

    def _fit_resample(self, X, y):
        maj, mino = _class_indices(y)
        if len(mino) < 2:
            raise TooFewMinority(f"SMOTE needs >= 2 minority rows, got {len(mino)}")
        k = self.k
        if k > len(mino) - 1:
            logger.warning(
                "SMOTE k=%d clamped to %d (minority size %d)", k, len(mino) - 1, len(mino)
            )
            k = len(mino) - 1
        n_new = int(round(len(maj) * self.target_ratio)) - len(mino)
        if n_new <= 0:
            self.lineage_ = ()
            return X.copy(), y.copy()

        rng = np.random.default_rng(self.seed)
        minority_set = mino.tolist()
        neighbor_cache: dict[int, np.ndarray] = {}
        lineage = []
        new_rows = np.empty((n_new, X.shape[1]), dtype=X.dtype)
        for s in range(n_new):
            base = int(mino[rng.integers(0, len(mino))])
            if base not in neighbor_cache:
                neighbor_cache[base] = k_nearest(X, base, k, restrict_to=minority_set).indices
            neighbor = int(neighbor_cache[base][rng.integers(0, k)])
            lam = float(rng.uniform())
            new_rows[s] = X[base] + lam * (X[neighbor] - X[base])
            lineage.append((base, neighbor, lam))
        self.lineage_ = tuple(lineage)
        X_res = np.vstack([X, new_rows])
        y_res = np.concatenate([y, np.ones(n_new, dtype=y.dtype)])
        return X_res, y_res


def find_tomek_links(X, y) -> list[tuple[int, int]]:
    """All cross-class mutual nearest-neighbor pairs, sorted by (min, max) index.

    A pair (i, j) is a link when j is i's single nearest neighbor among all
    other rows, i is j's, and their labels differ. Distance ties are broken
    by ascending row index.
    """
    X, y = check_X_y(X, y)
    n = len(y)
    nn1 = np.empty(n, dtype=np.int64)
    for i in range(n):
        nn1[i] = k_nearest(X, i, 1).indices[0]
    links = set()
    for i in range(n):
        j = int(nn1[i])
        if nn1[j] == i and y[i] != y[j]:
            links.add((min(i, j), max(i, j)))
    return sorted(links)


class TomekLinks(_Sampler):
    """Remove the majority member of every Tomek link (one pass, not iterated)."""

    kind = "tl"

    def __init__(self):
        pass

    def _fit_resample(self, X, y):
        links = find_tomek_links(X, y)
        self.links_ = tuple(links)
        removed = sorted(i if y[i] == 0 else j for i, j in links)
        self.removed_indices_ = np.asarray(removed, dtype=np.int64)
        keep = np.ones(len(y), dtype=bool)
        keep[self.removed_indices_] = False
        self._check_both_classes(keep, y)
        self.kept_indices_ = np.flatnonzero(keep)
        return X[keep], y[keep]


class OneSidedSelection(_Sampler):
    """Condensed-nearest-neighbor reduction of the majority class plus Tomek cleanup.

    Step 1 keeps every minority row and one random majority row
    (``seed_row = majority_indices[rng.integers(0, n_majority)]``), then
    scans the remaining majority rows in ascending index order, adding each
    row whose 1-NN label within the retained set disagrees with its own.
    Step 2 removes majority members of Tomek links computed within the
    retained set. Minority rows always survive.
    """

    kind = "oss"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def _fit_resample(self, X, y):
        maj, mino = _class_indices(y)
        rng = np.random.default_rng(self.seed)
        seed_row = int(maj[rng.integers(0, len(maj))])
        self.seed_index_ = seed_row

        retained = sorted(mino.tolist() + [seed_row])
        for i in maj:
            i = int(i)
            if i == seed_row:
                continue
            pool = np.asarray(retained, dtype=np.int64)
            nn = k_nearest(X, i, 1, restrict_to=pool).indices[0]
            if y[nn] != y[i]:
                retained = sorted(retained + [i])

        sub = np.asarray(retained, dtype=np.int64)
        links = find_tomek_links(X[sub], y[sub])
        drop = set()
        for a, b in links:
            local = a if y[sub[a]] == 0 else b
            drop.add(int(sub[local]))
        final = [i for i in retained if i not in drop]

        keep = np.zeros(len(y), dtype=bool)
        keep[final] = True
        self._check_both_classes(keep, y)
        self.removed_indices_ = np.flatnonzero(~keep)
        self.kept_indices_ = np.flatnonzero(keep)
        return X[keep], y[keep]


class NearMiss(_Sampler):
    """Distance-rank undersampling of the majority class (variants 1-3).

    Variants 1/2 keep the ``round(minority / target_ratio)`` majority rows
    with the smallest mean distance to their m nearest (variant 1) or m
    farthest (variant 2) minority rows, ranking ties broken by ascending
    index. Variant 3 keeps, for every minority row, its ``per_minority``
    nearest majority rows (the union; the target count is ignored).
    """

    kind = "nearmiss1"

    def __init__(
        self,
        variant: int = 1,
        m: int = 3,
        per_minority: int = 3,
        target_ratio: float = 1.0,
    ):
        self.variant = variant
        self.m = m
        self.per_minority = per_minority
        self.target_ratio = target_ratio

    def _fit_resample(self, X, y):
        if self.variant not in (1, 2, 3):
            raise ValueError(f"variant must be 1, 2, or 3, got {self.variant}")
        self.kind = f"nearmiss{self.variant}"
        maj, mino = _class_indices(y)

        if self.variant in (1, 2):
            if len(mino) < self.m:
                raise InsufficientCandidates(
                    f"NearMiss-{self.variant} needs >= m={self.m} minority rows, "
                    f"got {len(mino)}"
                )
            target = int(round(len(mino) / self.target_ratio))
            if target < 1:
                raise DegenerateOutput(f"target majority count {target} < 1")
            target = min(target, len(maj))
            mode = "nearest" if self.variant == 1 else "farthest"
            scores = np.array(
                [mean_distance_to(X, int(i), mino, self.m, mode) for i in maj]
            )
            kept_maj = maj[np.lexsort((maj, scores))[:target]]
        else:
            marked: set[int] = set()
            for r in mino:
                nn = k_nearest(X, int(r), self.per_minority, restrict_to=maj)
                marked.update(int(i) for i in nn.indices)
            kept_maj = np.asarray(sorted(marked), dtype=np.int64)

        keep = np.zeros(len(y), dtype=bool)
        keep[mino] = True
        keep[kept_maj] = True
        self._check_both_classes(keep, y)
        self.removed_indices_ = np.flatnonzero(~keep)
        self.kept_indices_ = np.flatnonzero(keep)
        return X[keep], y[keep]


def make_sampler(kind: str, cfg: SamplerConfig) -> _Sampler:
    """Build the sampler an experiment asks for by kind name."""
    kind = kind.lower()
    if kind == "ros":
        return RandomOverSampler(target_ratio=cfg.target_ratio, seed=cfg.seed)
    if kind == "rus":
        return RandomUnderSampler(target_ratio=cfg.target_ratio, seed=cfg.seed)
    if kind == "smote":
        return SMOTE(k=cfg.smote_k, target_ratio=cfg.target_ratio, seed=cfg.seed)
    if kind == "tl":
        return TomekLinks()
    if kind == "oss":
        return OneSidedSelection(seed=cfg.seed)
    if kind in ("nearmiss1", "nearmiss2", "nearmiss3"):
        return NearMiss(
            variant=int(kind[-1]),
            m=cfg.nearmiss_m,
            per_minority=cfg.nearmiss3_per_minority,
            target_ratio=cfg.target_ratio,
        )
    if kind == "none":
        return IdentitySampler()
    raise ValueError(f"unknown sampler kind {kind!r}; expected one of {KINDS}")


def resample(ds: Dataset, kind: str, cfg: SamplerConfig | None = None) -> ResampleResult:
    """Apply a sampler to a Dataset and package provenance."""
    cfg = cfg or SamplerConfig()
    sampler = make_sampler(kind, cfg)
    X_res, y_res = sampler.fit_resample(ds.features, ds.labels)
    out = Dataset(
        name=ds.name,
        features=X_res,
        labels=y_res,
        attribute_names=ds.attribute_names,
        source_encoding=dict(ds.source_encoding),
    )
    return ResampleResult(
        dataset=out,
        kind=sampler.kind,
        removed_indices=tuple(int(i) for i in getattr(sampler, "removed_indices_", ())),
        synthetic_lineage=tuple(getattr(sampler, "lineage_", ())),
        duplicated_indices=tuple(int(i) for i in getattr(sampler, "duplicated_indices_", ())),
    )
