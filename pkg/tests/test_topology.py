import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varlearn import (
    Barcode,
    CapacityError,
    DistanceMatrix,
    InvalidInputError,
    NswParameters,
    PointCloud,
    distance_matrix,
    nsw_bound,
    rips_filtration,
    vietoris_rips_barcode,
)
from varlearn.topology import boundary_persistence_pairs

from oracles import brute_barcode, brute_rips_simplices

SQUARE = distance_matrix(PointCloud([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


@st.composite
def small_complexes(draw):
    seed = draw(st.integers(0, 2**31))
    rng = np.random.default_rng(seed)
    m = draw(st.integers(2, 8))
    pts = rng.standard_normal((m, draw(st.integers(1, 3))))
    if draw(st.booleans()):
        pts = np.round(pts)  # coincident points and tied edge lengths
        if np.ptp(pts) == 0:
            pts[0, 0] += 1.0
    return distance_matrix(PointCloud(pts)), draw(st.integers(0, 2)), draw(st.floats(0.05, 1.0))


def _as_dict(barcode, max_dim):
    return {p: sorted(barcode[p]) for p in range(max_dim + 1)}


@settings(max_examples=60)
@given(small_complexes(), st.sampled_from(["coboundary", "boundary"]), st.sampled_from(["radius", "distance"]))
def test_barcode_matches_brute_force(cx, algorithm, scale):
    D, max_dim, max_scale = cx
    got = vietoris_rips_barcode(D, max_dim, max_scale, scale=scale, algorithm=algorithm)
    assert _as_dict(got, max_dim) == brute_barcode(D.entries, max_dim, max_scale, scale)


@settings(max_examples=40)
@given(small_complexes())
def test_filtration_matches_exhaustive_enumeration(cx):
    D, max_dim, max_scale = cx
    filt = rips_filtration(D, max_dim, max_scale)
    got = sorted((v, len(s) - 1, s) for s, v in filt)
    assert got == brute_rips_simplices(D.entries, max_dim, max_scale)
    assert filt.size == len(got)


@settings(max_examples=40)
@given(small_complexes())
def test_h0_invariants(cx):
    D, _, max_scale = cx
    bc = vietoris_rips_barcode(D, 0, max_scale)
    m = D.m
    assert len(bc[0]) == m
    assert all(b == 0.0 for b, _ in bc[0])
    # one infinite bar per component of the graph at the final scale
    from scipy.sparse.csgraph import connected_components

    k, _ = connected_components(D.entries / 2 <= max_scale, directed=False)
    assert sum(math.isinf(d) for _, d in bc[0]) == k


def test_square_cycle():
    bc = vietoris_rips_barcode(SQUARE, 1, 1.0)
    assert len(bc[1]) == 1
    (b, d), = bc[1]
    assert b == pytest.approx(1 / (2 * math.sqrt(2)), abs=1e-6)
    assert d == pytest.approx(0.5, abs=1e-6)
    assert len(bc[0]) == 4 and sum(math.isinf(x) for _, x in bc[0]) == 1


def test_square_distance_scale():
    (bar,) = vietoris_rips_barcode(SQUARE, 1, 1.0, scale="distance")[1]
    assert bar == pytest.approx((1 / math.sqrt(2), 1.0))


def test_circle_has_one_long_loop():
    t = np.linspace(0, 2 * np.pi, 24, endpoint=False)
    bc = vietoris_rips_barcode(distance_matrix(PointCloud(np.c_[np.cos(t), np.sin(t)])), 1, 1.0)
    lengths = bc.lengths(1)
    assert (lengths > 0.1).sum() == 1


def test_boundary_pairs_square():
    filt = rips_filtration(SQUARE, 1, 1.0)
    pairs = boundary_persistence_pairs(filt)
    # 4 vertices + 6 edges + 4 triangles; one vertex class survives, every 1-cycle dies
    assert filt.size == 14
    assert sum(k is None for _, k in pairs[0]) == 1 and len(pairs[0]) == 4
    assert len(pairs[1]) == 3 and all(k is not None for _, k in pairs[1])


def test_capacity_error_names_cap(rng):
    D = distance_matrix(PointCloud(rng.standard_normal((30, 2))))
    with pytest.raises(CapacityError, match="100"):
        vietoris_rips_barcode(D, 2, 1.0, cap=100)
    with pytest.raises(CapacityError, match="100"):
        rips_filtration(D, 2, 1.0, cap=100)


def test_argument_errors():
    with pytest.raises(InvalidInputError):
        vietoris_rips_barcode(SQUARE, -1, 1.0)
    with pytest.raises(InvalidInputError):
        vietoris_rips_barcode(SQUARE, 1, 0.0)
    with pytest.raises(InvalidInputError):
        vietoris_rips_barcode(SQUARE, 1, 1.0, scale="diameter")


def test_ties_and_duplicates():
    D = DistanceMatrix(np.array([[0, 0, 1], [0, 0, 1], [1, 1, 0.0]]))
    bc = vietoris_rips_barcode(D, 1, 1.0)
    assert _as_dict(bc, 1) == brute_barcode(D.entries, 1, 1.0)


def test_barcode_json_and_longest():
    bc = Barcode({0: [(0.0, 0.2), (0.0, math.inf)], 1: [(0.1, 0.15), (0.2, 0.5), (0.3, 0.35)]})
    assert Barcode.from_json(bc.to_json()) == bc
    top = bc.longest(2, 1)
    assert top[1] == [(0.1, 0.15), (0.2, 0.5)] or top[1] == [(0.2, 0.5), (0.3, 0.35)]
    assert (0.2, 0.5) in top[1] and len(top[1]) == 2
    assert top[0] == bc[0]
    assert '"inf"' in bc.dumps()


# -- NSW bound -----------------------------------------------------------------------


def test_nsw_quoted_value():
    assert abs(nsw_bound(NswParameters(d=4, tau=1.0, nu=1000, delta=0.1)) - 1_592_570_365) <= 2


def test_nsw_small_case():
    # beta = 16 * (1/4) * 4 = 16; 16 * (ln 16 + 1 + ln 2) = 71.45
    assert nsw_bound(d=1, tau=4.0, nu=4.0, delta=0.5) == 72


@given(st.integers(1, 6), st.floats(0.1, 10), st.floats(1, 1e4), st.floats(0.01, 0.9))
def test_nsw_exceeds_bound_and_is_monotone(d, tau, nu, delta):
    m = nsw_bound(d=d, tau=tau, nu=nu, delta=delta)
    beta = 16**d * tau**-d * nu
    target = beta * (math.log(beta) + d + math.log(1 / delta))
    assert target * (1 - 1e-12) < m <= target * (1 + 1e-12) + 1
    assert nsw_bound(d=d, tau=tau, nu=nu, delta=delta / 2) >= m


def test_nsw_warns_high_dimension():
    with pytest.warns(UserWarning):
        nsw_bound(d=18, tau=1.0, nu=1.0, delta=0.1)
    with pytest.raises(InvalidInputError):
        NswParameters(d=1, tau=1.0, nu=1.0, delta=1.5)
