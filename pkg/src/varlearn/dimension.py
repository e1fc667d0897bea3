"""Intrinsic dimension estimates at a locality scale and dimension diagrams.

All estimators take a :class:`PointCloud` and a scale ``eps`` in ``(0, 1]``
measured in scaled distance units. They return a float in ``[0, n]`` or
``None`` when the estimate is undefined at that scale.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .errors import InvalidInputError, VarLearnWarning
from .pointcloud import (
    DistanceMatrix,
    PointCloud,
    distance_matrix,
    fubini_study_angles,
    minimum_spanning_tree,
    single_linkage_clusters,
)

__all__ = [
    "ESTIMATORS",
    "DimensionDiagram",
    "pca_dimension",
    "npca_dimension",
    "box_counting_dimension",
    "box_counts",
    "phcurve_dimension",
    "correlation_dimension",
    "mle_dimension",
    "anova_beta",
    "anova_betas",
    "anova_local_dimension",
    "anova_dimension",
    "dimension_diagram",
]

_EPS = np.finfo(float).eps


def _clip(value: float | None, n: int) -> float | None:
    if value is None or not math.isfinite(value):
        return None
    return float(min(max(value, 0.0), n))


def _weighted_mean(values: Sequence[float], weights: Sequence[float]) -> float | None:
    if not values:
        return None
    w = np.asarray(weights, dtype=float)
    return float(np.dot(values, w) / w.sum())


def _distances(cloud: PointCloud, dist: DistanceMatrix | None) -> DistanceMatrix:
    return distance_matrix(cloud) if dist is None else dist


# -- PCA ------------------------------------------------------------------------

def pca_dimension(points, strategy: str | float = "gap") -> int:
    """PCA dimension of a point set.

    Args:
        points: ``(m, n)`` array or :class:`PointCloud`.
        strategy: ``"gap"`` for the largest ``log10`` gap between consecutive
            singular values of the centred matrix, or a number ``tau`` to count
            singular values ``>= tau``.
    """
    pts = points.points if isinstance(points, PointCloud) else np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] < 2:
        return 0
    sigma = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False)
    return pca_rank_from_singular_values(sigma, strategy, max(pts.shape))


def pca_rank_from_singular_values(sigma, strategy: str | float = "gap", size: int | None = None) -> int:
    sigma = np.asarray(sigma, dtype=float)
    if strategy != "gap":
        return int(np.count_nonzero(sigma >= float(strategy)))
    if sigma.size == 0 or sigma[0] <= 0:
        return 0
    if sigma.size == 1:
        return 1
    floor = _EPS * sigma[0] * (size or sigma.size)
    logs = np.log10(np.maximum(sigma, floor))
    gaps = logs[:-1] - logs[1:]
    if gaps.max() <= 0:
        return int(sigma.size)
    return int(np.argmax(gaps)) + 1


def _projective_affine(cloud: PointCloud, seed) -> tuple[np.ndarray, np.ndarray]:
    """Rescale points so that a random unit functional takes the value 1."""
    rng = np.random.default_rng(seed)
    l = rng.standard_normal(cloud.n)
    l /= np.linalg.norm(l)
    unit = cloud.points / np.linalg.norm(cloud.points, axis=1, keepdims=True)
    vals = unit @ l
    ok = np.abs(vals) >= 1e-12
    if not ok.all():
        warnings.warn(
            f"{int((~ok).sum())} points lie on the hyperplane l(u)=0 and were excluded",
            VarLearnWarning,
            stacklevel=3,
        )
    return unit[ok] / vals[ok, None], ok


def npca_dimension(cloud: PointCloud, eps: float, *, dist: DistanceMatrix | None = None, seed=0) -> float | None:
    """Cluster-size weighted mean of local PCA dimensions.

    Singleton clusters count as 0-dimensional with weight 1.
    """
    if cloud.m == 1:
        return 0.0
    dist = _distances(cloud, dist)
    clusters = single_linkage_clusters(dist, eps)
    if cloud.projective:
        coords, ok = _projective_affine(cloud, seed)
        index_map = np.full(cloud.m, -1)
        index_map[ok] = np.arange(ok.sum())
    else:
        coords, index_map = cloud.points, np.arange(cloud.m)
    values, weights = [], []
    for members in clusters.groups():
        rows = index_map[members]
        rows = rows[rows >= 0]
        if rows.size == 0:
            continue
        values.append(float(pca_dimension(coords[rows])) if rows.size > 1 else 0.0)
        weights.append(rows.size)
    return _clip(_weighted_mean(values, weights), cloud.n)


# -- box counting ---------------------------------------------------------------------

def _box_coordinates(cloud: PointCloud, dist: DistanceMatrix | None) -> tuple[np.ndarray, float]:
    """Coordinates in which boxes are equal-sized, and their diameter."""
    if not cloud.projective:
        pts = cloud.points
        diam = float(pdist(pts).max()) if cloud.m > 1 else 0.0
        return pts, diam
    unit = cloud.points / np.linalg.norm(cloud.points, axis=1, keepdims=True)
    chart = int(np.argmax(np.abs(unit).mean(axis=0)))
    lead = unit[:, chart]
    ok = np.abs(lead) >= 1e-12
    if not ok.all():
        warnings.warn(f"{int((~ok).sum())} points lie at infinity of the chart and were excluded", VarLearnWarning, stacklevel=3)
    affine = np.delete(unit[ok] / lead[ok, None], chart, axis=1)
    # arctan turns an affine coordinate into the angle it subtends, so equal
    # intervals in these coordinates are equal in Fubini-Study angle
    coords = np.arctan(affine)
    diam = float(fubini_study_angles(unit[ok]).max()) if ok.sum() > 1 else 0.0
    return coords, diam


def box_counts(cloud: PointCloud, eps: float, *, dist: DistanceMatrix | None = None) -> tuple[int, int]:
    """Number of occupied boxes ``nu`` and subdivision count ``R(eps)``.

    Coordinates are measured in units of the sample diameter, so ``R(eps)``
    is ``floor(lambda / eps) + 1`` with ``lambda`` the largest side of the
    bounding box relative to the diameter.
    """
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    coords, diam = _box_coordinates(cloud, dist)
    if coords.shape[0] <= 1 or diam == 0.0:
        return min(coords.shape[0], 1), 1
    lo, hi = coords.min(axis=0), coords.max(axis=0)
    width = hi - lo
    lam = float(width.max()) / diam
    R = int(math.floor(lam / eps + 1e-12)) + 1
    safe = np.where(width > 0, width, 1.0)
    q = np.floor(R * (coords - lo) / safe + 1e-9).astype(np.int64)
    q = np.clip(q, 0, R - 1)
    q[:, width == 0] = 0  # degenerate coordinate: a single slab
    nu = np.unique(q, axis=0).shape[0]
    return int(nu), R


def box_counting_dimension(cloud: PointCloud, eps: float, *, dist: DistanceMatrix | None = None) -> float | None:
    if cloud.m == 1:
        return 0.0
    nu, R = box_counts(cloud, eps, dist=dist)
    if R == 1:
        return None
    return _clip(math.log(nu) / math.log(R), cloud.n)


# -- persistent homology curve ----------------------------------------------------------

def phcurve_dimension(cloud: PointCloud, eps: float, *, dist: DistanceMatrix | None = None) -> float | None:
    """Weighted mean over clusters of ``|log m_i / log(mean MST edge)|``."""
    if cloud.m == 1:
        return 0.0
    dist = _distances(cloud, dist)
    values, weights = [], []
    for members in single_linkage_clusters(dist, eps).groups():
        if members.size == 1:
            values.append(0.0)
            weights.append(1)
            continue
        edges = minimum_spanning_tree(dist, members)
        mean_len = float(np.mean([w for _, _, w in edges]))
        if mean_len >= 1.0 or mean_len <= 0.0:
            # log(1) = 0 in the denominator, or coincident points
            continue
        local = abs(math.log(members.size) / math.log(mean_len))
        values.append(min(local, cloud.n))
        weights.append(members.size)
    return _clip(_weighted_mean(values, weights), cloud.n)


# -- correlation -----------------------------------------------------------------------

def _pair_distances(dist: DistanceMatrix) -> np.ndarray:
    iu = np.triu_indices(dist.m, 1)
    return np.sort(dist.entries[iu])


def correlation_sum(pairs: np.ndarray, eps: float) -> float:
    """Fraction of (sorted) pair distances strictly below ``eps``."""
    return np.searchsorted(pairs, eps, side="left") / pairs.size


def correlation_dimension(
    cloud: PointCloud, eps: float, h: float, *, dist: DistanceMatrix | None = None, _pairs=None
) -> float | None:
    if not (eps > 0 and h > 0 and eps + h <= 1 + 1e-12):
        raise InvalidInputError("need eps > 0, h > 0 and eps + h <= 1")
    if cloud.m == 1:
        return None
    pairs = _pair_distances(_distances(cloud, dist)) if _pairs is None else _pairs
    c1, c2 = correlation_sum(pairs, eps), correlation_sum(pairs, eps + h)
    if c1 == 0:
        return None
    if cloud.projective:
        denom = abs(math.log(math.sin(eps)) - math.log(math.sin(eps + h)))
    else:
        denom = abs(math.log(eps) - math.log(eps + h))
    return _clip(abs(math.log(c1) - math.log(c2)) / denom, cloud.n)


# -- MLE -------------------------------------------------------------------------------

def mle_local(neighbor_distances: np.ndarray, eps: float, projective: bool = False) -> float:
    """Levina-Bickel estimate from the distances of the ``k`` neighbours within ``eps``.

    Returns ``inf`` when every neighbour sits exactly at ``eps``.
    """
    t = np.asarray(neighbor_distances, dtype=float)
    if projective:
        with np.errstate(divide="ignore"):
            logs = np.log(math.sin(eps)) - np.log(np.sin(t))
    else:
        with np.errstate(divide="ignore"):
            logs = math.log(eps) - np.log(t)
    mean = logs.mean()
    if mean <= 0:
        return math.inf
    return float(1.0 / mean)


def mle_dimension(cloud: PointCloud, eps: float, *, dist: DistanceMatrix | None = None) -> float | None:
    """Neighbourhood-size weighted mean of Levina-Bickel local estimates.

    A point's weight is its neighbour count plus one (the point itself).
    """
    if cloud.m == 1:
        return None
    d = _distances(cloud, dist).entries
    values, weights = [], []
    infinite = 0
    for i in range(cloud.m):
        row = np.delete(d[i], i)
        t = row[row <= eps]
        if t.size == 0:
            continue
        local = mle_local(t, eps, cloud.projective)
        if not math.isfinite(local):
            infinite += 1
            continue
        values.append(min(local, cloud.n))
        weights.append(t.size + 1)
    if infinite:
        warnings.warn(f"{infinite} points have all neighbours at distance eps; excluded", VarLearnWarning, stacklevel=2)
    return _clip(_weighted_mean(values, weights), cloud.n)


# -- ANOVA -----------------------------------------------------------------------------

def anova_beta(d: int) -> float:
    """Variance of the angle between two independent uniform points on ``S^(d-1)``."""
    if int(d) != d or d < 1:
        raise InvalidInputError("d must be a positive integer")
    d = int(d)
    if d % 2 == 1:
        s = (d - 1) // 2
        return math.pi**2 / 4 - 2 * sum(1.0 / (2 * j + 1) ** 2 for j in range(s))
    s = (d - 2) // 2
    return math.pi**2 / 12 - 2 * sum(1.0 / (2 * j) ** 2 for j in range(1, s + 1))


@lru_cache(maxsize=32)
def _beta_table(dmax: int) -> np.ndarray:
    return np.array([anova_beta(d) for d in range(1, dmax + 1)])


def anova_betas(dmax: int) -> np.ndarray:
    """``beta_1 .. beta_dmax`` as an array."""
    return _beta_table(int(dmax)).copy()


def anova_local_dimension(S: float, dmax: int = 30) -> int:
    """Index ``d`` minimising ``|beta_d - S|``; ties go to the smaller ``d``."""
    diffs = np.abs(_beta_table(int(dmax)) - S)
    return int(np.argmin(diffs)) + 1  # argmin returns the first minimiser


def _angle_statistic(directions: np.ndarray) -> float | None:
    norms = np.linalg.norm(directions, axis=1)
    directions = directions[norms > 1e-15]
    k = directions.shape[0]
    if k < 2:
        return None
    unit = directions / np.linalg.norm(directions, axis=1, keepdims=True)
    gram = np.clip(unit @ unit.T, -1.0, 1.0)
    iu = np.triu_indices(k, 1)
    theta = np.arccos(gram[iu])
    return float(np.mean((theta - math.pi / 2) ** 2))


def anova_dimension(
    cloud: PointCloud, eps: float, *, dist: DistanceMatrix | None = None, dmax: int | None = None
) -> float | None:
    """Neighbourhood-size weighted mean of local ANOVA estimates."""
    if cloud.m < 3:
        return None
    dmax = max(cloud.n, 30) if dmax is None else dmax
    d = _distances(cloud, dist).entries
    pts = cloud.points
    if cloud.projective:
        pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    values, weights = [], []
    for i in range(cloud.m):
        nbr = np.flatnonzero(d[i] <= eps)
        nbr = nbr[nbr != i]
        if nbr.size < 2:
            continue
        if cloud.projective:
            u = pts[i]
            v = pts[nbr] * np.sign(pts[nbr] @ u + 0.0)[:, None]
            directions = v - np.outer(v @ u, u)
        else:
            directions = pts[nbr] - pts[i]
        S = _angle_statistic(directions)
        if S is None:
            continue
        values.append(float(anova_local_dimension(S, dmax)))
        weights.append(nbr.size + 1)
    return _clip(_weighted_mean(values, weights), cloud.n)


# -- diagrams --------------------------------------------------------------------------

ESTIMATORS: tuple[str, ...] = ("NPCA", "BoxCounting", "PHCurve", "CorrSum", "MLE", "ANOVA")


@dataclass
class DimensionDiagram:
    """Dimension estimates as functions of the scale on a common grid."""

    grid: np.ndarray
    curves: dict[str, list[float | None]] = field(default_factory=dict)
    n: int | None = None

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        if self.grid.ndim != 1 or np.any(np.diff(self.grid) <= 0):
            raise InvalidInputError("grid must be strictly increasing")
        for name, curve in self.curves.items():
            if len(curve) != self.grid.size:
                raise InvalidInputError(f"curve {name!r} length differs from grid length")

    def to_json(self) -> dict:
        return {
            "grid": [float(g) for g in self.grid],
            "curves": {k: [None if v is None else float(v) for v in c] for k, c in self.curves.items()},
            **({"n": self.n} if self.n is not None else {}),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, obj: Mapping) -> "DimensionDiagram":
        return cls(np.asarray(obj["grid"], dtype=float), {k: list(v) for k, v in obj["curves"].items()}, obj.get("n"))

    def band_median(self, lo: float, hi: float) -> dict[str, float | None]:
        """Per-estimator median over grid points in ``[lo, hi]``, ignoring missing values."""
        mask = (self.grid >= lo - 1e-12) & (self.grid <= hi + 1e-12)
        out = {}
        for name, curve in self.curves.items():
            vals = [v for v, keep in zip(curve, mask) if keep and v is not None]
            out[name] = float(np.median(vals)) if vals else None
        return out


def _resolve(estimators: Iterable[str] | None) -> list[str]:
    if estimators is None:
        return list(ESTIMATORS)
    lookup = {e.lower(): e for e in ESTIMATORS}
    out = []
    for name in estimators:
        key = lookup.get(str(name).lower())
        if key is None:
            raise InvalidInputError(f"unknown estimator {name!r}; valid names: {', '.join(ESTIMATORS)}")
        if key not in out:
            out.append(key)
    return out


def dimension_diagram(
    cloud: PointCloud,
    estimators: Iterable[str] | None = None,
    grid_size: int = 25,
    *,
    grid: Sequence[float] | None = None,
    seed=0,
) -> DimensionDiagram:
    """Evaluate the requested estimators on ``eps_j = j / grid_size``.

    A custom increasing ``grid`` may be supplied instead. The correlation
    estimate uses ``h`` equal to the smallest grid spacing and is missing
    where ``eps + h > 1``.
    """
    names = _resolve(estimators)
    if grid is None:
        if grid_size < 2:
            raise InvalidInputError("grid_size must be at least 2")
        eps_grid = np.arange(1, grid_size + 1) / grid_size
    else:
        eps_grid = np.asarray(grid, dtype=float)
        if eps_grid.size < 2:
            raise InvalidInputError("grid needs at least two scales")
    h = float(np.min(np.diff(eps_grid)))
    dist = distance_matrix(cloud)
    pairs = _pair_distances(dist)
    fns: dict[str, Callable[[float], float | None]] = {
        "NPCA": lambda e: npca_dimension(cloud, e, dist=dist, seed=seed),
        "BoxCounting": lambda e: box_counting_dimension(cloud, e, dist=dist),
        "PHCurve": lambda e: phcurve_dimension(cloud, e, dist=dist),
        "CorrSum": lambda e: None if e + h > 1 + 1e-12 else correlation_dimension(cloud, e, h, dist=dist, _pairs=pairs),
        "MLE": lambda e: mle_dimension(cloud, e, dist=dist),
        "ANOVA": lambda e: anova_dimension(cloud, e, dist=dist),
    }
    curves = {name: [fns[name](float(e)) for e in eps_grid] for name in names}
    return DimensionDiagram(eps_grid, curves, cloud.n)
