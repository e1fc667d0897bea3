import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from varlearn import (
    Ambient,
    DegenerateSampleError,
    DistanceMatrix,
    InvalidInputError,
    Metric,
    PointCloud,
    distance_matrix,
    minimum_spanning_tree,
    read_csv,
    single_linkage_clusters,
    write_csv,
)
from varlearn.pointcloud import fubini_study_angles

coords = st.floats(-10, 10, allow_nan=False, width=64)


def clouds(min_m=2, max_m=8, n=3):
    return arrays(np.float64, st.tuples(st.integers(min_m, max_m), st.just(n)), elements=coords).filter(
        lambda a: np.ptp(a, axis=0).max() > 1e-3
    )


def test_pointcloud_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        PointCloud(np.zeros((0, 2)))
    with pytest.raises(InvalidInputError):
        PointCloud([[1.0, np.nan]])
    with pytest.raises(InvalidInputError):
        PointCloud([[0.0, 0.0], [1.0, 1.0]], Ambient.PROJECTIVE)


def test_pointcloud_is_read_only():
    c = PointCloud([[1.0, 2.0]])
    with pytest.raises(ValueError):
        c.points[0, 0] = 3.0


def test_collinear_scaling():
    D = distance_matrix(PointCloud([[0, 0], [1, 0], [2, 0]]))
    assert D.metric is Metric.SCALED_EUCLIDEAN
    np.testing.assert_allclose(D.entries[0], [0, 0.5, 1])
    assert D.entries.max() == 1


def test_projective_angles():
    D = distance_matrix(PointCloud([[1, 0], [0, 1], [1, 1]], Ambient.PROJECTIVE))
    # raw angles pi/2, pi/4, pi/4
    np.testing.assert_allclose(D.entries[0, 1], 1.0)
    np.testing.assert_allclose(D.entries[0, 2], 0.5)
    np.testing.assert_allclose(D.entries[1, 2], 0.5)


def test_projective_sign_is_ignored():
    D = distance_matrix(PointCloud([[1, 0], [-1, 0.0], [1, 1]], Ambient.PROJECTIVE))
    assert D.entries[0, 1] == 0.0


def test_degenerate_and_too_small():
    with pytest.raises(DegenerateSampleError):
        distance_matrix(PointCloud([[1, 1], [1, 1]]))
    with pytest.raises(InvalidInputError):
        distance_matrix(PointCloud([[1, 1]]))


def test_distance_matrix_validation():
    with pytest.raises(InvalidInputError):
        DistanceMatrix(np.array([[0, 1], [2, 0.0]]))
    with pytest.raises(InvalidInputError):
        DistanceMatrix(np.ones((2, 3)))


@given(clouds())
def test_distance_matrix_invariants(pts):
    D = distance_matrix(PointCloud(pts)).entries
    assert np.all(np.diag(D) == 0)
    np.testing.assert_array_equal(D, D.T)
    assert D.max() == pytest.approx(1.0)
    assert D.min() >= 0


@given(clouds(), st.randoms(use_true_random=False))
def test_permutation_equivariance(pts, rnd):
    perm = list(range(len(pts)))
    rnd.shuffle(perm)
    D = distance_matrix(PointCloud(pts)).entries
    Dp = distance_matrix(PointCloud(pts[perm])).entries
    np.testing.assert_allclose(Dp, D[np.ix_(perm, perm)], atol=1e-12)


@given(clouds(), st.floats(0.1, 10), st.integers(0, 2**31))
def test_rigid_motion_and_scaling_invariance(pts, scale, seed):
    q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((3, 3)))
    moved = scale * pts @ q.T + np.array([1.0, -2.0, 3.0])
    np.testing.assert_allclose(
        distance_matrix(PointCloud(moved)).entries, distance_matrix(PointCloud(pts)).entries, atol=1e-9
    )


@given(clouds().filter(lambda a: np.linalg.norm(a, axis=1).min() > 1e-2), st.integers(0, 2**31))
def test_fubini_study_invariance(pts, seed):
    assume(fubini_study_angles(pts).max() > 1e-3)
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    scales = rng.uniform(0.5, 2, size=len(pts)) * rng.choice([-1, 1], size=len(pts))
    a = distance_matrix(PointCloud(pts, Ambient.PROJECTIVE))
    b = distance_matrix(PointCloud(scales[:, None] * pts @ q.T, Ambient.PROJECTIVE))
    np.testing.assert_allclose(a.entries, b.entries, atol=1e-7)


def test_single_linkage_examples():
    D = distance_matrix(PointCloud([[0.0], [0.1], [0.9], [1.0]]))
    cl = single_linkage_clusters(D, 0.2)
    assert [sorted(g.tolist()) for g in cl.groups()] == [[0, 1], [2, 3]]
    assert single_linkage_clusters(D, 1.0).n_clusters == 1
    assert single_linkage_clusters(D, 0.0).n_clusters == 4


def _brute_components(D, eps):
    m = D.shape[0]
    label = list(range(m))
    changed = True
    while changed:
        changed = False
        for i in range(m):
            for j in range(m):
                if D[i, j] <= eps and label[j] > label[i]:
                    label[j] = label[i]
                    changed = True
    return {frozenset(i for i in range(m) if label[i] == l) for l in set(label)}


@given(clouds(max_m=9), st.floats(0, 1))
def test_single_linkage_matches_brute_force(pts, eps):
    D = distance_matrix(PointCloud(pts))
    cl = single_linkage_clusters(D, eps)
    assert {frozenset(g.tolist()) for g in cl.groups()} == _brute_components(D.entries, eps)
    assert sum(len(g) for g in cl.groups()) == len(pts)


@given(clouds(max_m=9), st.floats(0, 1), st.floats(0, 1))
def test_single_linkage_refinement(pts, a, b):
    lo, hi = sorted((a, b))
    D = distance_matrix(PointCloud(pts))
    fine = single_linkage_clusters(D, lo)
    coarse = single_linkage_clusters(D, hi)
    for g in fine.groups():
        assert len({coarse.assignment[i] for i in g}) == 1


def test_mst_examples():
    D = DistanceMatrix(np.array([[0, 0.4], [0.4, 0]]))
    assert minimum_spanning_tree(D) == [(0, 1, 0.4)]
    tri = DistanceMatrix(np.array([[0, 1, 3], [1, 0, 2], [3, 2, 0.0]]))
    assert sorted(w for _, _, w in minimum_spanning_tree(tri)) == [1, 2]
    line = distance_matrix(PointCloud([[0.0], [1.0], [2.0], [3.0]]))
    assert sorted((i, j) for i, j, _ in minimum_spanning_tree(line)) == [(0, 1), (1, 2), (2, 3)]
    with pytest.raises(InvalidInputError):
        minimum_spanning_tree(line, [])


def _brute_mst_weight(W):
    k = W.shape[0]
    edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
    best = math.inf
    for tree in itertools.combinations(edges, k - 1):
        parent = list(range(k))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for i, j in tree:
            ri, rj = find(i), find(j)
            if ri == rj:
                ok = False
                break
            parent[ri] = rj
        if ok:
            best = min(best, sum(W[i, j] for i, j in tree))
    return best


@given(clouds(min_m=2, max_m=6))
def test_mst_weight_is_minimal(pts):
    D = distance_matrix(PointCloud(pts))
    edges = minimum_spanning_tree(D)
    assert len(edges) == len(pts) - 1
    assert sum(w for *_, w in edges) == pytest.approx(_brute_mst_weight(D.entries), abs=1e-12)


def test_mst_on_members_uses_original_indices():
    D = distance_matrix(PointCloud([[0.0], [5.0], [1.0], [9.0]]))
    edges = minimum_spanning_tree(D, [0, 2, 3])
    assert {(i, j) for i, j, _ in edges} == {(0, 2), (2, 3)}


def test_csv_round_trip(tmp_path):
    pts = np.array([[1.5, -2.0, 1e-17], [3.0, 4.0, 5.0]])
    path = tmp_path / "p.csv"
    write_csv(PointCloud(pts), path)
    np.testing.assert_array_equal(read_csv(path).points, pts)
    write_csv(PointCloud(pts), path, header=True)
    np.testing.assert_array_equal(read_csv(path).points, pts)


def test_csv_header_and_transpose(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("a,b\n1,2\n3,4\n5,6\n")
    assert read_csv(path).points.shape == (3, 2)
    assert read_csv(path, columns_are_points=True).points.shape == (2, 3)


def test_csv_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\n3,x\n")
    with pytest.raises(InvalidInputError):
        read_csv(path)
    path.write_text("")
    with pytest.raises(InvalidInputError):
        read_csv(path)
