import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from varlearn import (
    EllipsoidDistance,
    EquationFinder,
    InvalidInputError,
    IntrinsicDimension,
    RipsPersistence,
    TangentSpaces,
    distance_matrix,
    mle_dimension,
    parse_polynomial,
    sample_segre,
)
from varlearn._validation import check_scalar

from conftest import circle_points

CIRCLE = [parse_polynomial("x1^2 + x2^2 - 1")]


def test_params_round_trip():
    est = IntrinsicDimension("ANOVA", eps=0.2)
    assert est.get_params() == {"estimator": "ANOVA", "eps": 0.2, "h": 0.04, "projective": False, "seed": 0}
    twin = clone(est).set_params(eps=0.5)
    assert twin.eps == 0.5 and est.eps == 0.2


def test_intrinsic_dimension_matches_function(so3_900):
    X = so3_900.points[:300]
    est = IntrinsicDimension("mle", eps=0.4).fit(X)
    assert est.estimator_name_ == "MLE" and est.n_features_in_ == 9
    assert est.dimension_ == mle_dimension(so3_900.subset(np.arange(300)), 0.4)
    diag = est.diagram(X, grid_size=5)
    assert list(diag.curves) == ["MLE"]


def test_intrinsic_dimension_validation():
    X = circle_points(20).points
    with pytest.raises(InvalidInputError):
        IntrinsicDimension("Hausdorff").fit(X)
    with pytest.raises(InvalidInputError):
        IntrinsicDimension(eps=0.0).fit(X)
    with pytest.raises(InvalidInputError):
        IntrinsicDimension().fit(np.array([[1.0, np.nan], [0.0, 1.0]]))


def test_equation_finder_transform():
    X = circle_points(40).points
    est = EquationFinder(degree=2).fit(X)
    assert est.n_equations_ == 1
    np.testing.assert_allclose(est.transform(X), 0, atol=1e-10)
    off = est.transform(2 * X)
    assert np.all(np.abs(off) > 1e-3)
    with pytest.raises(InvalidInputError):
        est.transform(np.ones((3, 3)))
    with pytest.raises(NotFittedError):
        EquationFinder().transform(X)


def test_equation_finder_segre():
    est = EquationFinder(degree=2, homogeneous=True).fit(sample_segre(100, 2, 3, seed=1).points)
    assert est.n_equations_ == 3 and est.kernel_.dimension == 3


def test_equation_finder_in_pipeline():
    X = circle_points(30).points
    pipe = make_pipeline(EquationFinder(degree=2))
    assert pipe.fit_transform(X).shape == (30, 1)


def test_tangent_spaces_estimator():
    X = circle_points(30).points
    est = TangentSpaces(CIRCLE).fit(X)
    assert est.dimension_ == 1
    assert abs(est.reach_ - 1) < 1e-8
    assert np.all(est.predict(X) == 1)
    with pytest.raises(InvalidInputError):
        TangentSpaces().fit(X)


def test_ellipsoid_distance_estimator():
    X = circle_points(25).points
    E = EllipsoidDistance(CIRCLE, lam=1.0).fit(X).transform(X)
    np.testing.assert_allclose(E, distance_matrix(circle_points(25)).entries, atol=1e-12)
    with pytest.raises(InvalidInputError):
        EllipsoidDistance(CIRCLE, lam=2.0).fit(X)


def test_rips_persistence_metrics():
    X = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    bc = RipsPersistence().fit_transform(X)
    (bar,) = bc[1]
    assert bar == pytest.approx((1 / (2 * math.sqrt(2)), 0.5))
    D = distance_matrix(circle_points(20)).entries
    a = RipsPersistence(metric="precomputed").fit(D).barcode_
    b = RipsPersistence().fit(circle_points(20).points).barcode_
    assert a == b
    with pytest.raises(InvalidInputError):
        RipsPersistence(metric="manhattan").fit(X)
    with pytest.raises(InvalidInputError):
        RipsPersistence(max_dim=-1).fit(X)


def test_check_scalar():
    assert check_scalar(3, "k", lo=1, integer=True) == 3
    with pytest.raises(InvalidInputError):
        check_scalar(True, "k", integer=True)
    with pytest.raises(InvalidInputError):
        check_scalar(1.5, "k", integer=True)
    with pytest.raises(InvalidInputError):
        check_scalar(0, "eps", lo=0, lo_open=True)
    with pytest.raises(InvalidInputError):
        check_scalar(2, "eps", hi=1)
