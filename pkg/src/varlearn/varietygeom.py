"""Tangent spaces, Jacobian corank, empirical reach and ellipsoid-weighted distances."""
from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .equations import numerical_rank
from .errors import DegenerateSampleError, InvalidInputError, VarLearnWarning
from .pointcloud import DistanceMatrix, Metric, PointCloud
from .polynomials import PolynomialSet

__all__ = [
    "TangentEstimate",
    "EllipsoidModel",
    "tangent_space",
    "tangent_spaces",
    "corank_dimension",
    "CorankResult",
    "empirical_reach",
    "ellipsoid_distance_matrix",
]


@dataclass(frozen=True)
class TangentEstimate:
    """Orthonormal tangent basis (rows of ``basis``) at a sample point."""

    basis: np.ndarray
    index: int | None = None
    singular: bool = False

    @property
    def corank(self) -> int:
        return int(self.basis.shape[0])

    @property
    def s(self) -> int:
        return self.corank

    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "corank": self.corank,
            "singular": self.singular,
            "basis": self.basis.tolist(),
        }


def _tangent_from_jacobian(J: np.ndarray, rule, index=None) -> TangentEstimate:
    k, n = J.shape
    if not np.any(J):
        warnings.warn(
            "all gradients vanish; returning the full space as tangent space",
            VarLearnWarning,
            stacklevel=3,
        )
        return TangentEstimate(np.eye(n), index, singular=True)
    _, sigma, vh = np.linalg.svd(J, full_matrices=True)
    rank, _ = numerical_rank(sigma, rule, k, n)
    return TangentEstimate(vh[rank:].copy(), index)


def tangent_spaces(F: PolynomialSet, cloud: PointCloud, rule=None) -> list[TangentEstimate]:
    if len(F) == 0:
        raise InvalidInputError("need at least one polynomial")
    jac = F.jacobian(cloud.points)
    out = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", VarLearnWarning)
        for i, J in enumerate(jac):
            out.append(_tangent_from_jacobian(J, rule, i))
    singular = sum(1 for w in caught if issubclass(w.category, VarLearnWarning))
    if singular:
        warnings.warn(f"{singular} points have a vanishing Jacobian", VarLearnWarning, stacklevel=2)
    return out


def tangent_space(F: PolynomialSet, u, rule=None, index: int | None = None) -> TangentEstimate:
    """Orthonormal basis of the kernel of the Jacobian of ``F`` at ``u``.

    A vanishing Jacobian yields the full space with ``singular=True``.
    """
    if len(F) == 0:
        raise InvalidInputError("need at least one polynomial")
    J = np.atleast_2d(F.jacobian(np.asarray(u, dtype=float)))
    return _tangent_from_jacobian(J, rule, index)


@dataclass(frozen=True)
class CorankResult:
    mode: int
    histogram: dict[int, int]


def corank_dimension(F: PolynomialSet, cloud: PointCloud, rule=None, *, return_histogram: bool = False):
    """Most frequent Jacobian corank over the sample (ties go to the smaller value)."""
    if cloud.m < 1:
        raise InvalidInputError("empty cloud")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", VarLearnWarning)
        coranks = [t.corank for t in tangent_spaces(F, cloud, rule)]
    hist = dict(sorted(Counter(coranks).items()))
    top = max(hist.values())
    mode = min(c for c, v in hist.items() if v == top)
    return CorankResult(mode, hist) if return_histogram else mode


def _tangents(cloud: PointCloud, F, rule, tangents):
    if tangents is not None:
        return tangents
    if F is None:
        raise InvalidInputError("need equations or precomputed tangent spaces")
    return tangent_spaces(F, cloud, rule)


def empirical_reach(cloud: PointCloud, F: PolynomialSet | None = None, rule=None, *, tangents=None) -> float:
    """Minimum over ordered pairs of ``|u - v|^2 / (2 * delta)``.

    ``delta`` is the length of the component of ``u - v`` normal to the
    tangent space at ``v``. Pairs with ``delta < 1e-12`` are skipped; if all
    pairs are skipped the reach is infinite.
    """
    if cloud.m < 2:
        raise InvalidInputError("reach needs at least two points")
    if cloud.projective:
        raise InvalidInputError("empirical reach is defined for Euclidean samples")
    tangents = _tangents(cloud, F, rule, tangents)
    pts = cloud.points
    best = math.inf
    for j, t in enumerate(tangents):
        diff = pts - pts[j]  # u - v for all u, with v = pts[j]
        diff = np.delete(diff, j, axis=0)
        if t.corank:
            normal = diff - (diff @ t.basis.T) @ t.basis
        else:
            normal = diff
        delta = np.linalg.norm(normal, axis=1)
        ok = delta >= 1e-12
        if ok.any():
            ratio = (diff[ok] ** 2).sum(axis=1) / (2.0 * delta[ok])
            best = min(best, float(ratio.min()))
    return best


@dataclass
class EllipsoidModel:
    lam: float
    tangents: list[TangentEstimate] = field(default_factory=list)

    def __post_init__(self):
        if not 0 < self.lam <= 1:
            raise InvalidInputError("lambda must lie in (0, 1]")


def ellipsoid_distance_matrix(
    cloud: PointCloud, F: PolynomialSet | None = None, lam: float = 0.01, rule=None, *, tangents=None
) -> DistanceMatrix:
    """Scaled distances divided by the mean ellipsoid radius in the pair direction.

    At point ``i`` the quadratic form is ``|P_T h|^2 + lam * |P_N h|^2`` for a
    unit direction ``h``; the result is rescaled so that its maximum is 1.
    """
    model = EllipsoidModel(lam)
    if cloud.m < 2:
        raise InvalidInputError("need at least two points")
    if cloud.projective:
        raise InvalidInputError("ellipsoid distances are defined for Euclidean samples")
    model.tangents = _tangents(cloud, F, rule, tangents)
    pts = cloud.points
    raw = squareform(pdist(pts))
    top = raw.max()
    if top == 0:
        raise DegenerateSampleError("all sample points coincide")
    scaled = raw / top
    diff = pts[None, :, :] - pts[:, None, :]  # diff[i, j] = u_j - u_i
    with np.errstate(invalid="ignore", divide="ignore"):
        h = diff / raw[:, :, None]
    h[raw == 0] = 0.0
    q = np.empty(raw.shape)
    for i, t in enumerate(model.tangents):
        tang = (h[i] @ t.basis.T) if t.corank else np.zeros((cloud.m, 0))
        tan2 = (tang**2).sum(axis=1)
        q[i] = lam + (1.0 - lam) * tan2  # |h|^2 = 1 splits as tangent + normal
    radii = (np.sqrt(q) + np.sqrt(q.T)) / 2.0
    out = np.where(raw > 0, scaled / radii, 0.0)
    out = 0.5 * (out + out.T)
    return DistanceMatrix(out / out.max(), Metric.ELLIPSOID_WEIGHTED)
