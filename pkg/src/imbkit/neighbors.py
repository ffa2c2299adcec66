"""Exact Euclidean k-nearest-neighbor queries with deterministic tie-breaking.

Every sampler that needs neighborhood structure goes through this module so
that tie handling (ascending row index) is identical everywhere. Search is a
plain linear scan per query; the dataset sizes this package targets make an
index structure unnecessary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InsufficientCandidates, LengthMismatch


@dataclass(frozen=True)
class NeighborList:
    """k nearest neighbors of one row, ordered by (distance, index) ascending."""

    query_index: int
    indices: np.ndarray
    distances: np.ndarray


def euclidean(a, b) -> float:
    """Euclidean distance between two equal-length vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise LengthMismatch(f"vector shapes differ: {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.sqrt(np.dot(diff, diff)))


def _distances_to(points: np.ndarray, query: int, candidates: np.ndarray) -> np.ndarray:
    diff = points[candidates] - points[query]
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def k_nearest(
    points: np.ndarray,
    query: int,
    k: int,
    restrict_to=None,
) -> NeighborList:
    """Exact k nearest rows to ``points[query]``.

    Parameters
    ----------
    points : np.ndarray of shape (n, d)
    query : int
        Row index of the query point; always excluded from the candidates.
    k : int
    restrict_to : optional iterable of row indices
        Candidate pool (minus the query row). Defaults to all rows.

    Ties in distance are broken by ascending row index.
    """
    points = np.asarray(points, dtype=np.float64)
    if restrict_to is None:
        candidates = np.arange(points.shape[0])
    else:
        candidates = np.asarray(sorted(set(int(i) for i in restrict_to)), dtype=np.int64)
    candidates = candidates[candidates != query]
    if not 1 <= k <= len(candidates):
        raise InsufficientCandidates(
            f"k={k} with {len(candidates)} candidates for query row {query}"
        )
    dist = _distances_to(points, query, candidates)
    order = np.lexsort((candidates, dist))[:k]
    return NeighborList(
        query_index=int(query),
        indices=candidates[order],
        distances=dist[order],
    )


def mean_distance_to(
    points: np.ndarray,
    query: int,
    targets,
    m: int,
    mode: str = "nearest",
) -> float:
    """Mean of the m smallest or largest distances from ``query`` to ``targets``."""
    if mode not in ("nearest", "farthest"):
        raise ValueError(f"mode must be 'nearest' or 'farthest', got {mode!r}")
    points = np.asarray(points, dtype=np.float64)
    targets = np.asarray(sorted(set(int(i) for i in targets)), dtype=np.int64)
    targets = targets[targets != query]
    if not 1 <= m <= len(targets):
        raise InsufficientCandidates(
            f"m={m} with {len(targets)} target rows for query row {query}"
        )
    dist = _distances_to(points, query, targets)
    if mode == "nearest":
        order = np.lexsort((targets, dist))
    else:
        order = np.lexsort((targets, -dist))
    return float(np.mean(dist[order[:m]]))
