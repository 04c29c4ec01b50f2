"""Geometric kernels and completion metrics over ``(N, 3)`` point arrays.

All functions are pure: inputs are never modified and no state is shared between calls.

>>> import numpy as np
>>> a = np.array([[0.0, 0.0, 0.0]])
>>> b = np.array([[2.0, 0.0, 0.0]])
>>> chamfer_l1(a, b)
2.0
>>> chamfer_l2(a, b)
8.0
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

DEFAULT_FSCORE_THRESHOLD = 0.001

# Rows of ``a`` compared against all of ``b`` at once when scanning for neighbours.
_CHUNK_SIZE = 1024


@dataclass(frozen=True)
class MetricReport:
    """Completion metrics for one (predicted, ground truth) pair."""

    cd_l1: float
    cd_l2: float
    fscore: float
    threshold_d: float


def as_point_cloud(points: np.ndarray, name: str = "points") -> np.ndarray:
    """Validate and return ``points`` as a float64 ``(N, 3)`` array.

    :param points: Array-like of 3D coordinates.
    :param name: Argument name used in error messages.

    :raises ValueError: Wrong shape, no points, or a non-finite coordinate.

    :return: Float64 view or copy of the input.
    """
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"{name} invalid shape ({arr.shape}). Must be (N, 3).")
    if arr.shape[0] < 1:
        raise ValueError(f"{name} invalid size (0). Must contain at least one point.")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite coordinates.")
    return arr


def _nearest_sq_dists(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Squared distance from every point of ``src`` to its nearest neighbour in ``dst``."""
    out = np.empty(src.shape[0], dtype=np.float64)
    for start in range(0, src.shape[0], _CHUNK_SIZE):
        block = src[start : start + _CHUNK_SIZE]
        diff = block[:, None, :] - dst[None, :, :]
        out[start : start + _CHUNK_SIZE] = np.min(np.sum(diff * diff, axis=-1), axis=1)
    return out


def nn_brute(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Exact nearest-neighbour distances in both directions by an exhaustive pairwise scan.

    Used as the reference every metric in this module is checked against.

    :param a: First cloud, shape (N_a, 3).
    :param b: Second cloud, shape (N_b, 3).

    :return: Pair of (distance from each point of ``a`` to ``b``, distance from each point of ``b`` to ``a``).
    """
    a = as_point_cloud(a, "a")
    b = as_point_cloud(b, "b")
    dists = np.sqrt(np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=-1))
    return dists.min(axis=1), dists.min(axis=0)


def chamfer_l1(a: np.ndarray, b: np.ndarray) -> float:
    """Average of the two directional mean nearest-neighbour Euclidean distances.

    Each directional term is averaged over its own cloud, which reduces to the usual
    ``1/(2N)`` form when both clouds hold ``N`` points.
    """
    a = as_point_cloud(a, "a")
    b = as_point_cloud(b, "b")
    d_ab = np.sqrt(_nearest_sq_dists(a, b))
    d_ba = np.sqrt(_nearest_sq_dists(b, a))
    return float(0.5 * d_ab.mean() + 0.5 * d_ba.mean())


def chamfer_l2(a: np.ndarray, b: np.ndarray) -> float:
    """Sum of the two directional mean nearest-neighbour squared distances."""
    a = as_point_cloud(a, "a")
    b = as_point_cloud(b, "b")
    return float(_nearest_sq_dists(a, b).mean() + _nearest_sq_dists(b, a).mean())


def fscore(a: np.ndarray, b: np.ndarray, d: float = DEFAULT_FSCORE_THRESHOLD) -> float:
    """F-score at threshold ``d``.

    The directional terms are the fractions of points whose nearest-neighbour squared
    distance lies strictly below ``d``; they are combined by their harmonic mean.

    :raises ValueError: ``d`` is not positive.

    :return: Score in [0, 1]; 0 when neither direction has a point within the threshold.
    """
    if not d > 0:
        raise ValueError(f"fscore invalid threshold ({d}). Must be > 0.")
    a = as_point_cloud(a, "a")
    b = as_point_cloud(b, "b")
    precision = float(np.mean(_nearest_sq_dists(a, b) < d))
    recall = float(np.mean(_nearest_sq_dists(b, a) < d))
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def metric_report(pred: np.ndarray, gt: np.ndarray, d: float = DEFAULT_FSCORE_THRESHOLD) -> MetricReport:
    """Bundle every completion metric for ``pred`` against ``gt``."""
    return MetricReport(
        cd_l1=chamfer_l1(pred, gt),
        cd_l2=chamfer_l2(pred, gt),
        fscore=fscore(pred, gt, d),
        threshold_d=d,
    )


def fps(points: np.ndarray, k: int, start_index: int = 0) -> np.ndarray:
    """Greedy farthest point sampling.

    Each pick maximises the minimum distance to the points already selected; ties go to
    the lowest index. Selected points are never picked twice, so duplicated coordinates
    are exhausted in index order.

    :param points: Cloud of shape (N, 3).
    :param k: Number of indices to select, in [1, N].
    :param start_index: Index of the first pick.

    :raises ValueError: ``k`` or ``start_index`` out of range.

    :return: Integer array of ``k`` selected indices in selection order.
    """
    points = as_point_cloud(points)
    n = points.shape[0]
    if k < 1 or k > n:
        raise ValueError(f"fps invalid k ({k}). Must be in [1, {n}].")
    if start_index < 0 or start_index >= n:
        raise ValueError(f"fps invalid start_index ({start_index}). Must be in [0, {n}).")

    selected = np.empty(k, dtype=np.int64)
    min_sq = np.full(n, np.inf)
    current = start_index
    for i in range(k):
        selected[i] = current
        diff = points - points[current]
        min_sq = np.minimum(min_sq, np.sum(diff * diff, axis=1))
        min_sq[selected[: i + 1]] = -np.inf
        current = int(np.argmax(min_sq))
    return selected


def ball_query(points: np.ndarray, centers: Sequence[int], radius: float, max_k: int) -> np.ndarray:
    """Gather up to ``max_k`` neighbours within ``radius`` of each center point.

    The center itself is always the first member; remaining members follow in index
    order. Clusters with fewer than ``max_k`` members are padded by repeating the center.

    :param points: Cloud of shape (N, 3).
    :param centers: Indices into ``points``.
    :param radius: Inclusive query radius.
    :param max_k: Cluster width.

    :raises ValueError: Non-positive radius or width, or an invalid center index.

    :return: Integer array of shape (len(centers), max_k).
    """
    points = as_point_cloud(points)
    if not radius > 0:
        raise ValueError(f"ball_query invalid radius ({radius}). Must be > 0.")
    if max_k < 1:
        raise ValueError(f"ball_query invalid max_k ({max_k}). Must be >= 1.")
    n = points.shape[0]
    groups = np.empty((len(centers), max_k), dtype=np.int64)
    radius_sq = radius * radius
    for row, center in enumerate(centers):
        center = int(center)
        if center < 0 or center >= n:
            raise ValueError(f"ball_query invalid center index ({center}). Must be in [0, {n}).")
        diff = points - points[center]
        within = np.flatnonzero(np.sum(diff * diff, axis=1) <= radius_sq)
        members: List[int] = [center] + [int(i) for i in within if i != center]
        members = members[:max_k]
        groups[row, : len(members)] = members
        groups[row, len(members) :] = center
    return groups
