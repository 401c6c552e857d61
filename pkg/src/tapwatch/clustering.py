"""Deterministic bisecting k-means.

No randomness anywhere: 2-means splits start from fixed seed points (the
farthest-point pair, plus one mean split per feature axis), and every tie
goes to the lowest index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import FeatureMatrix
from .errors import IndivisibleClusterError

MAX_ITER = 300


def sse(points, center) -> float:
    """Sum of squared Euclidean distances from ``points`` to ``center``."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    center = np.asarray(center, dtype=float).ravel()
    if points.shape[1] != center.shape[0]:
        raise ValueError(f"dimension mismatch: points have {points.shape[1]} columns, center has {center.shape[0]}")
    diff = points - center
    return float(np.einsum("ij,ij->", diff, diff))


def _sq_dist(points: np.ndarray, center: np.ndarray) -> np.ndarray:
    diff = points - center
    return np.einsum("ij,ij->i", diff, diff)


def n_distinct_rows(points: np.ndarray) -> int:
    return len(np.unique(np.asarray(points, dtype=float), axis=0))


def _lloyd(x: np.ndarray, centers: np.ndarray, max_iter: int) -> tuple[np.ndarray, np.ndarray]:
    assign = None
    for _ in range(max_iter):
        # ties go to group 0
        new = (_sq_dist(x, centers[1]) < _sq_dist(x, centers[0])).astype(int)
        for g in (0, 1):
            if not np.any(new == g):
                other = centers[1 - g]
                far = int(np.argmax(np.where(new == 1 - g, _sq_dist(x, other), -1.0)))
                new[far] = g
        if assign is not None and np.array_equal(new, assign):
            break
        assign = new
        centers = np.vstack([x[assign == 0].mean(axis=0), x[assign == 1].mean(axis=0)])
    return assign, centers


def two_means(points, max_iter: int = MAX_ITER) -> tuple[np.ndarray, np.ndarray]:
    """Split ``points`` into two groups with Lloyd iterations.

    Seeds are the row farthest from the centroid and the row farthest from
    that one.  Returns ``(assignments, centers)`` where assignments are 0/1
    per row and centers is a 2 x d array of group means.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("two_means needs a 2-D array with at least 2 rows")
    centroid = x.mean(axis=0)
    c1 = x[int(np.argmax(_sq_dist(x, centroid)))]
    d1 = _sq_dist(x, c1)
    if d1.max() == 0.0:
        raise IndivisibleClusterError("all rows are identical")
    c2 = x[int(np.argmax(d1))]
    return _lloyd(x, np.vstack([c1, c2]), max_iter)


def _split_sse(x: np.ndarray, assign: np.ndarray) -> float:
    return sse(x[assign == 0], x[assign == 0].mean(axis=0)) + sse(x[assign == 1], x[assign == 1].mean(axis=0))


def best_two_means(points, max_iter: int = MAX_ITER) -> tuple[np.ndarray, np.ndarray]:
    """Lowest-SSE split over a fixed list of deterministic starts.

    The first start is the farthest-point pair of :func:`two_means`; then
    one start per non-constant column, splitting the rows at that column's
    mean.  Equal SSE keeps the earlier start.  A single farthest-point start
    is easily captured by an outlier on a pure-noise column.
    """
    x = np.asarray(points, dtype=float)
    best = two_means(x, max_iter)
    best_sse = _split_sse(x, best[0])
    mean = x.mean(axis=0)
    for j in range(x.shape[1]):
        above = x[:, j] > mean[j]
        if above.all() or not above.any():
            continue
        start = np.vstack([x[~above].mean(axis=0), x[above].mean(axis=0)])
        cand = _lloyd(x, start, max_iter)
        cand_sse = _split_sse(x, cand[0])
        if cand_sse < best_sse:
            best, best_sse = cand, cand_sse
    return best


@dataclass
class SplitStep:
    cluster: int
    sse: float
    size: int
    new_cluster: int


@dataclass
class ClusteringResult:
    k: int
    assignments: np.ndarray
    centers: np.ndarray
    cluster_sse: np.ndarray
    split_trace: list[SplitStep] = field(default_factory=list)

    @property
    def total_sse(self) -> float:
        return float(np.sum(self.cluster_sse))


def bisect_kmeans(matrix: FeatureMatrix | np.ndarray, k: int, max_iter: int = MAX_ITER,
                  multi_start: bool = True) -> ClusteringResult:
    """Bisecting k-means down to exactly ``k`` clusters.

    The split cluster keeps its index for the first half and the second half
    is appended, so cluster indices follow creation order.  At each step the
    divisible cluster with the largest SSE is split; equal SSE goes to the
    lower index.  ``multi_start=False`` restricts every split to the single
    farthest-point start.
    """
    splitter = best_two_means if multi_start else two_means
    x = matrix.values if isinstance(matrix, FeatureMatrix) else np.asarray(matrix, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("expected a non-empty 2-D matrix")
    if k < 1:
        raise ValueError("k must be >= 1")
    distinct = n_distinct_rows(x)
    if k > distinct:
        raise ValueError(f"k={k} exceeds the number of distinct rows ({distinct})")

    members = [np.arange(x.shape[0])]
    scores = [sse(x, x.mean(axis=0))]
    divisible = [distinct >= 2]
    trace: list[SplitStep] = []

    while len(members) < k:
        candidates = [i for i in range(len(members)) if divisible[i]]
        # k <= distinct rows guarantees a divisible cluster exists
        target = max(candidates, key=lambda i: (scores[i], -i))
        rows = members[target]
        sub, _ = splitter(x[rows], max_iter=max_iter)
        trace.append(SplitStep(target, scores[target], len(rows), len(members)))
        halves = [rows[sub == 0], rows[sub == 1]]
        members[target] = halves[0]
        members.append(halves[1])
        scores[target] = sse(x[halves[0]], x[halves[0]].mean(axis=0))
        scores.append(sse(x[halves[1]], x[halves[1]].mean(axis=0)))
        divisible[target] = n_distinct_rows(x[halves[0]]) >= 2
        divisible.append(n_distinct_rows(x[halves[1]]) >= 2)

    assignments = np.empty(x.shape[0], dtype=int)
    for j, rows in enumerate(members):
        assignments[rows] = j
    centers = np.vstack([x[rows].mean(axis=0) for rows in members])
    return ClusteringResult(k, assignments, centers, np.array(scores), trace)
