"""Input checks shared by the estimator wrappers and the command line."""
from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils.validation import check_array

from .errors import InvalidInputError
from .pointcloud import Ambient, DistanceMatrix, Metric, PointCloud, distance_matrix
from .polynomials import Polynomial, PolynomialSet


def check_points(X, *, projective: bool = False, min_samples: int = 1) -> PointCloud:
    """Coerce an array-like or ``PointCloud`` to a ``PointCloud``."""
    if isinstance(X, PointCloud):
        cloud = X
        if projective and not cloud.projective:
            cloud = PointCloud(cloud.points, Ambient.PROJECTIVE)
    else:
        try:
            arr = check_array(X, dtype=np.float64, ensure_min_samples=min_samples)
        except ValueError as exc:
            raise InvalidInputError(str(exc)) from None
        cloud = PointCloud(arr, Ambient.PROJECTIVE if projective else Ambient.EUCLIDEAN)
    if cloud.m < min_samples:
        raise InvalidInputError(f"need at least {min_samples} points, got {cloud.m}")
    return cloud


def check_distances(X, metric: str = "euclidean") -> DistanceMatrix:
    """Distance matrix from points, or from a square matrix when ``metric='precomputed'``."""
    if isinstance(X, DistanceMatrix):
        return X
    if metric == "precomputed":
        try:
            arr = check_array(X, dtype=np.float64)
        except ValueError as exc:
            raise InvalidInputError(str(exc)) from None
        return DistanceMatrix(arr, Metric.SCALED_EUCLIDEAN)
    if metric not in ("euclidean", "fubini_study"):
        raise InvalidInputError(f"unknown metric {metric!r}")
    return distance_matrix(check_points(X, projective=metric == "fubini_study", min_samples=2))


def check_scalar(value, name: str, *, lo=None, hi=None, lo_open=False, integer=False):
    kind = numbers.Integral if integer else numbers.Real
    if isinstance(value, bool) or not isinstance(value, kind):
        raise InvalidInputError(f"{name} must be {'an integer' if integer else 'a real number'}, got {value!r}")
    if lo is not None and (value < lo or (lo_open and value == lo)):
        raise InvalidInputError(f"{name} must be {'>' if lo_open else '>='} {lo}, got {value}")
    if hi is not None and value > hi:
        raise InvalidInputError(f"{name} must be <= {hi}, got {value}")
    return value


def check_equations(F) -> PolynomialSet:
    if isinstance(F, PolynomialSet):
        out = F
    elif isinstance(F, Polynomial):
        out = PolynomialSet([F], F.nvars)
    else:
        polys = list(F)
        if not polys:
            raise InvalidInputError("need at least one polynomial")
        out = PolynomialSet(polys, polys[0].nvars)
    if len(out) == 0:
        raise InvalidInputError("need at least one polynomial")
    return out
