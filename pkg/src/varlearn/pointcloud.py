"""Point samples, scaled metrics, single-linkage clustering and spanning trees.

Every estimator in the package consumes a :class:`PointCloud` and, for the
scale-dependent ones, a :class:`DistanceMatrix` whose entries live in
``[0, 1]``.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import pdist, squareform

from .errors import DegenerateSampleError, InvalidInputError

__all__ = [
    "Ambient",
    "Metric",
    "PointCloud",
    "DistanceMatrix",
    "Clustering",
    "distance_matrix",
    "single_linkage_clusters",
    "minimum_spanning_tree",
    "read_csv",
    "write_csv",
]


class Ambient(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    PROJECTIVE = "projective"


class Metric(str, enum.Enum):
    SCALED_EUCLIDEAN = "scaled_euclidean"
    SCALED_FUBINI_STUDY = "scaled_fubini_study"
    ELLIPSOID_WEIGHTED = "ellipsoid_weighted"


@dataclass(frozen=True)
class PointCloud:
    """An ordered sample of ``m`` points in ``R^n`` or ``P^(n-1)``.

    Points are stored row-wise as a read-only ``(m, n)`` float array.
    """

    points: np.ndarray
    ambient: Ambient = Ambient.EUCLIDEAN

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidInputError(
                f"points must form a non-empty (m, n) array, got shape {pts.shape}"
            )
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("points contain NaN or infinite coordinates")
        ambient = Ambient(self.ambient)
        if ambient is Ambient.PROJECTIVE:
            zero = np.flatnonzero(~pts.any(axis=1))
            if zero.size:
                raise InvalidInputError(
                    f"zero vector at row {int(zero[0])} has no projective meaning"
                )
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "ambient", ambient)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def projective(self) -> bool:
        return self.ambient is Ambient.PROJECTIVE

    def subset(self, index: Sequence[int] | np.ndarray) -> "PointCloud":
        return PointCloud(self.points[np.asarray(index, dtype=int)], self.ambient)

    def __len__(self) -> int:
        return self.m


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric matrix of pairwise distances with zero diagonal."""

    entries: np.ndarray
    metric: Metric = Metric.SCALED_EUCLIDEAN

    def __post_init__(self):
        d = np.array(self.entries, dtype=float, copy=True)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InvalidInputError(f"distance matrix must be square, got {d.shape}")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise InvalidInputError("distances must be finite and nonnegative")
        if not np.allclose(d, d.T, rtol=0, atol=1e-12):
            raise InvalidInputError("distance matrix is not symmetric")
        d = 0.5 * (d + d.T)
        np.fill_diagonal(d, 0.0)
        d.setflags(write=False)
        object.__setattr__(self, "entries", d)
        object.__setattr__(self, "metric", Metric(self.metric))

    @property
    def m(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class Clustering:
    """Assignment of point indices to contiguous cluster ids ``0..l-1``."""

    assignment: np.ndarray
    sizes: np.ndarray = field(init=False)

    def __post_init__(self):
        labels = np.asarray(self.assignment, dtype=int)
        labels.setflags(write=False)
        object.__setattr__(self, "assignment", labels)
        sizes = np.bincount(labels) if labels.size else np.zeros(0, dtype=int)
        sizes.setflags(write=False)
        object.__setattr__(self, "sizes", sizes)

    @property
    def n_clusters(self) -> int:
        return int(self.sizes.size)

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == cluster)

    def groups(self) -> list[np.ndarray]:
        return [self.members(c) for c in range(self.n_clusters)]


def _unit_rows(points: np.ndarray) -> np.ndarray:
    return points / np.linalg.norm(points, axis=1, keepdims=True)


def fubini_study_angles(points: np.ndarray) -> np.ndarray:
    """Unscaled pairwise angles between the lines spanned by the rows."""
    unit = _unit_rows(np.asarray(points, dtype=float))
    # The angle between lines is 2*arcsin(min(|u-v|, |u+v|)/2); this avoids the
    # cancellation arccos suffers near 1 and its argument never exceeds 1.
    minus = squareform(pdist(unit))
    plus = np.sqrt(np.maximum(0.0, 4.0 - minus**2))
    chord = np.minimum(minus, plus)
    return 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))


def distance_matrix(cloud: PointCloud) -> DistanceMatrix:
    """Scaled Euclidean or scaled Fubini-Study distances of ``cloud``.

    Distances are divided by their maximum so that the largest entry is 1.

    Raises:
        InvalidInputError: fewer than two points.
        DegenerateSampleError: all points coincide (as points or as lines).
    """
    if cloud.m < 2:
        raise InvalidInputError("a distance matrix needs at least two points")
    if cloud.projective:
        raw = fubini_study_angles(cloud.points)
        metric = Metric.SCALED_FUBINI_STUDY
    else:
        raw = squareform(pdist(cloud.points))
        metric = Metric.SCALED_EUCLIDEAN
    top = raw.max()
    if top <= 0.0:
        raise DegenerateSampleError("all sample points coincide; diameter is zero")
    return DistanceMatrix(np.clip(raw / top, 0.0, 1.0), metric)


def single_linkage_clusters(dist: DistanceMatrix, eps: float) -> Clustering:
    """Connected components of the graph joining pairs at distance ``<= eps``."""
    adjacency = dist.entries <= eps
    np.fill_diagonal(adjacency, False)
    _, labels = connected_components(csr_matrix(adjacency), directed=False)
    # relabel so ids follow first appearance
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty_like(order)
    remap[order] = np.arange(order.size)
    return Clustering(remap[labels])


def minimum_spanning_tree(
    dist: DistanceMatrix, members: Iterable[int] | None = None
) -> list[tuple[int, int, float]]:
    """Prim's algorithm on the dense submatrix induced by ``members``.

    Returns ``len(members) - 1`` edges ``(i, j, weight)`` with ``i < j`` in
    original point indices, listed in the order Prim adds them. Ties are broken
    toward the smallest vertex index, then the smallest parent index.
    """
    idx = np.arange(dist.m) if members is None else np.asarray(list(members), dtype=int)
    if idx.size == 0:
        raise InvalidInputError("minimum spanning tree needs at least one member")
    sub = dist.entries[np.ix_(idx, idx)]
    k = idx.size
    in_tree = np.zeros(k, dtype=bool)
    in_tree[0] = True
    key = sub[0].copy()
    parent = np.zeros(k, dtype=int)
    edges: list[tuple[int, int, float]] = []
    for _ in range(k - 1):
        masked = np.where(in_tree, np.inf, key)
        v = int(np.argmin(masked))
        p = int(parent[v])
        a, b = sorted((int(idx[p]), int(idx[v])))
        edges.append((a, b, float(sub[p, v])))
        in_tree[v] = True
        better = (~in_tree) & (sub[v] < key)
        key[better] = sub[v][better]
        parent[better] = v
    return edges


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_csv(
    path: str | Path,
    *,
    columns_are_points: bool = False,
    ambient: Ambient | str = Ambient.EUCLIDEAN,
) -> PointCloud:
    """Load a point cloud from CSV, one point per row unless transposed.

    A first row containing any non-numeric field is treated as a header.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise InvalidInputError(f"{path}: no data rows")
    if not all(_is_number(c.strip()) for c in rows[0]):
        rows = rows[1:]
    try:
        data = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise InvalidInputError(f"{path}: non-numeric entry ({exc})") from None
    if data.ndim != 2:
        raise InvalidInputError(f"{path}: ragged rows")
    if columns_are_points:
        data = data.T
    return PointCloud(data, Ambient(ambient))


def write_csv(cloud: PointCloud | np.ndarray, path: str | Path, header: bool = False) -> None:
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if header:
            writer.writerow([f"x{j + 1}" for j in range(pts.shape[1])])
        for row in pts:
            writer.writerow([repr(float(v)) for v in row])
