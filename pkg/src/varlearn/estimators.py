"""scikit-learn style wrappers around the functional API.

Hyperparameters are stored verbatim in ``__init__`` and validated in
``fit``; fitted state carries a trailing underscore.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import dimension as _dim
from ._validation import check_distances, check_equations, check_points, check_scalar
from .equations import find_equations
from .errors import InvalidInputError
from .pointcloud import distance_matrix
from .topology import vietoris_rips_barcode
from .varietygeom import corank_dimension, ellipsoid_distance_matrix, empirical_reach, tangent_spaces

__all__ = ["IntrinsicDimension", "EquationFinder", "TangentSpaces", "EllipsoidDistance", "RipsPersistence"]


class IntrinsicDimension(BaseEstimator):
    """One of the six scale-dependent dimension estimates at a fixed ``eps``.

    >>> est = IntrinsicDimension("MLE", eps=0.3).fit(X)   # doctest: +SKIP
    >>> est.dimension_                                     # doctest: +SKIP
    """

    def __init__(self, estimator="MLE", eps=0.3, h=0.04, projective=False, seed=0):
        self.estimator = estimator
        self.eps = eps
        self.h = h
        self.projective = projective
        self.seed = seed

    def fit(self, X, y=None):
        (name,) = _dim._resolve([self.estimator])
        check_scalar(self.eps, "eps", lo=0, hi=1, lo_open=True)
        cloud = check_points(X, projective=self.projective, min_samples=2)
        dist = distance_matrix(cloud)
        eps = float(self.eps)
        if name == "NPCA":
            value = _dim.npca_dimension(cloud, eps, dist=dist, seed=self.seed)
        elif name == "BoxCounting":
            value = _dim.box_counting_dimension(cloud, eps, dist=dist)
        elif name == "PHCurve":
            value = _dim.phcurve_dimension(cloud, eps, dist=dist)
        elif name == "CorrSum":
            value = _dim.correlation_dimension(cloud, eps, float(self.h), dist=dist)
        elif name == "MLE":
            value = _dim.mle_dimension(cloud, eps, dist=dist)
        else:
            value = _dim.anova_dimension(cloud, eps, dist=dist)
        self.estimator_name_ = name
        self.dimension_ = value
        self.n_features_in_ = cloud.n
        return self

    def diagram(self, X, grid_size=25):
        """Dimension diagram of ``X`` for this estimator alone."""
        cloud = check_points(X, projective=self.projective, min_samples=2)
        return _dim.dimension_diagram(cloud, [self.estimator], grid_size, seed=self.seed)


class EquationFinder(TransformerMixin, BaseEstimator):
    """Learn polynomials vanishing on a sample; ``transform`` evaluates them."""

    def __init__(self, degree=2, homogeneous=False, method="svd", tol=None, projective=False):
        self.degree = degree
        self.homogeneous = homogeneous
        self.method = method
        self.tol = tol
        self.projective = projective

    def fit(self, X, y=None):
        check_scalar(self.degree, "degree", lo=1, integer=True)
        cloud = check_points(X, projective=self.projective, min_samples=2)
        result = find_equations(cloud, self.degree, self.homogeneous, self.method, self.tol, return_details=True)
        self.kernel_ = result
        self.equations_ = result.polynomials
        self.n_equations_ = len(result.polynomials)
        self.n_features_in_ = cloud.n
        return self

    def transform(self, X):
        """Residuals ``f_i(x)``, one column per learned equation."""
        check_is_fitted(self, "equations_")
        cloud = check_points(X, projective=self.projective)
        if cloud.n != self.n_features_in_:
            raise InvalidInputError(f"expected {self.n_features_in_} coordinates, got {cloud.n}")
        if self.n_equations_ == 0:
            return np.zeros((cloud.m, 0))
        return self.equations_.evaluate(cloud.points)


class TangentSpaces(BaseEstimator):
    """Jacobian-kernel tangent spaces for given equations.

    ``predict`` returns the per-point corank, i.e. the local dimension.
    """

    def __init__(self, equations=None, tol=None):
        self.equations = equations
        self.tol = tol

    def fit(self, X, y=None):
        if self.equations is None:
            raise InvalidInputError("TangentSpaces needs equations")
        F = check_equations(self.equations)
        cloud = check_points(X)
        self.tangents_ = tangent_spaces(F, cloud, self.tol)
        self.dimension_ = corank_dimension(F, cloud, self.tol)
        self.reach_ = empirical_reach(cloud, tangents=self.tangents_) if cloud.m > 1 else float("inf")
        return self

    def predict(self, X):
        F = check_equations(self.equations)
        return np.array([t.corank for t in tangent_spaces(F, check_points(X), self.tol)])


class EllipsoidDistance(TransformerMixin, BaseEstimator):
    """Ellipsoid-weighted distance matrix of a sample on a known variety."""

    def __init__(self, equations=None, lam=0.01, tol=None):
        self.equations = equations
        self.lam = lam
        self.tol = tol

    def fit(self, X, y=None):
        if self.equations is None:
            raise InvalidInputError("EllipsoidDistance needs equations")
        check_scalar(self.lam, "lam", lo=0, hi=1, lo_open=True)
        self.equations_ = check_equations(self.equations)
        return self

    def transform(self, X):
        check_is_fitted(self, "equations_")
        cloud = check_points(X, min_samples=2)
        return ellipsoid_distance_matrix(cloud, self.equations_, float(self.lam), self.tol).entries


class RipsPersistence(BaseEstimator):
    """Vietoris-Rips barcode of points or of a precomputed distance matrix."""

    def __init__(self, max_dim=1, max_scale=1.0, metric="euclidean", scale="radius"):
        self.max_dim = max_dim
        self.max_scale = max_scale
        self.metric = metric
        self.scale = scale

    def fit(self, X, y=None):
        check_scalar(self.max_dim, "max_dim", lo=0, integer=True)
        check_scalar(self.max_scale, "max_scale", lo=0, hi=1, lo_open=True)
        D = check_distances(X, self.metric)
        self.barcode_ = vietoris_rips_barcode(D, self.max_dim, float(self.max_scale), scale=self.scale)
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).barcode_
