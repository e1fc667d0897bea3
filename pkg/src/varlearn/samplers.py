"""Seeded sample generators for model varieties and simple noise models."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .pointcloud import PointCloud, read_csv
from .polynomials import Polynomial, parse_polynomial

__all__ = [
    "Noise",
    "SamplerConfig",
    "TROTT",
    "OCTAHEDRON",
    "HANKEL_ORDER",
    "sample_trott",
    "sample_so3",
    "sample_low_rank",
    "sample_segre",
    "sample_toric",
    "sample_hankel",
    "sample_circle",
    "perturb",
    "sample",
    "load_cyclooctane",
    "squared_distances",
]

TROTT: Polynomial = parse_polynomial(
    "144*x1^4 + 144*x2^4 - 225*x1^2 - 225*x2^2 + 350*x1^2*x2^2 + 81", 2
)

OCTAHEDRON = np.array(
    [
        [1, 1, 1, 0, 0, 0],
        [1, 0, 0, 1, 1, 0],
        [0, 1, 0, 1, 0, 1],
        [0, 0, 1, 0, 1, 1],
    ]
)

# Powers k of t in  sum_i w_i s_i^(6-k) t_i^k  for the coordinates (c, f, b, e, a, d).
HANKEL_ORDER = (2, 6, 1, 5, 0, 4)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _trott_y(x: float) -> list[float]:
    """Real nonnegative ``y`` (and their negatives) on the Trott curve above ``x``."""
    x2 = x * x
    b = 350.0 * x2 - 225.0
    c = 144.0 * x2 * x2 - 225.0 * x2 + 81.0
    disc = b * b - 4.0 * 144.0 * c
    if disc < 0:
        return []
    root = np.sqrt(disc)
    ys = []
    for y2 in ((-b - root) / 288.0, (-b + root) / 288.0):
        if y2 >= 0:
            y = float(np.sqrt(y2))
            ys.extend([y, -y] if y > 0 else [0.0])
    return ys


def _trott_polish(x: float, y: float) -> float:
    """Newton steps on the quartic in ``y`` with ``x`` fixed."""
    for _ in range(4):
        x2, y2 = x * x, y * y
        f = 144 * (x2 * x2 + y2 * y2) - 225 * (x2 + y2) + 350 * x2 * y2 + 81
        df = 576 * y2 * y - 450 * y + 700 * x2 * y
        if df == 0 or f == 0:
            break
        step = f / df
        if abs(step) > 1e-6:
            break
        y -= step
    return y


def sample_trott(m: int, seed=None) -> PointCloud:
    """Points on the Trott quartic, drawn by solving for one coordinate.

    Even draws fix ``x`` uniform on ``[-1, 1]`` and solve for ``y``; odd draws
    swap the roles. All real solutions of a draw are kept.
    """
    if m < 1:
        raise InvalidInputError("m must be positive")
    rng = _rng(seed)
    pts: list[tuple[float, float]] = []
    k = 0
    while len(pts) < m:
        x = float(rng.uniform(-1.0, 1.0))
        for y in _trott_y(x):
            y = _trott_polish(x, y)
            pts.append((x, y) if k % 2 == 0 else (y, x))
        k += 1
    return PointCloud(np.array(pts[:m]))


def _haar_so3(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, -1] = -q[:, -1]
    return q


def sample_so3(m: int, seed=None) -> PointCloud:
    """Rotation matrices flattened row-major to ``R^9``."""
    if m < 1:
        raise InvalidInputError("m must be positive")
    rng = _rng(seed)
    return PointCloud(np.stack([_haar_so3(rng).ravel() for _ in range(m)]))


def sample_low_rank(m: int, p: int, q: int, r: int, seed=None) -> PointCloud:
    """Products of Gaussian ``p x r`` and ``r x q`` factors, flattened column by column.

    Column-major order makes ``x1*x4 - x2*x3`` the leading 2x2 minor of a
    ``2 x q`` sample.
    """
    if m < 1 or not 1 <= r <= min(p, q):
        raise InvalidInputError("need m >= 1 and 1 <= r <= min(p, q)")
    rng = _rng(seed)
    left = rng.standard_normal((m, p, r))
    right = rng.standard_normal((m, r, q))
    return PointCloud((left @ right).transpose(0, 2, 1).reshape(m, p * q))


def sample_segre(m: int, p: int, q: int, seed=None) -> PointCloud:
    return sample_low_rank(m, p, q, 1, seed)


def sample_toric(A, m: int, seed=None) -> PointCloud:
    """Monomial images ``prod_i t_i^A[i, j]`` of positive parameters ``t = exp(z)``."""
    A = np.asarray(A)
    if A.ndim != 2 or not np.issubdtype(A.dtype, np.integer):
        raise InvalidInputError("A must be an integer matrix")
    if np.any(~A.any(axis=0)):
        raise InvalidInputError("A has a zero column")
    if m < 1:
        raise InvalidInputError("m must be positive")
    rng = _rng(seed)
    logs = rng.standard_normal((m, A.shape[0])) @ A
    return PointCloud(np.exp(logs))


def sample_hankel(m: int, seed=None, order: Sequence[int] = HANKEL_ORDER) -> PointCloud:
    """Rank-two binary sextic moments with the middle coordinate removed.

    Each point is ``sum_i w_i s_i^(6-k) t_i^k`` over two summands for the
    powers ``k`` in ``order``; ``(s_i, t_i)`` lie on the unit circle and the
    weights ``w_i`` are uniform in ``[0.5, 1.5]``.
    """
    if m < 1:
        raise InvalidInputError("m must be positive")
    rng = _rng(seed)
    theta = rng.uniform(0.0, 2 * np.pi, size=(m, 2))
    w = rng.uniform(0.5, 1.5, size=(m, 2))
    s, t = np.cos(theta), np.sin(theta)
    k = np.asarray(order)
    coords = (w[:, :, None] * s[:, :, None] ** (6 - k) * t[:, :, None] ** k).sum(axis=1)
    return PointCloud(coords)


def sample_circle(m: int, seed=None, radius: float = 1.0) -> PointCloud:
    rng = _rng(seed)
    theta = rng.uniform(0.0, 2 * np.pi, size=m)
    return PointCloud(radius * np.column_stack([np.cos(theta), np.sin(theta)]))


@dataclass(frozen=True)
class Noise:
    """``kind`` is ``"none"``, ``"round"`` (``digits``) or ``"gaussian"`` (``sigma``)."""

    kind: str = "none"
    digits: int = 0
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "round", "gaussian"):
            raise InvalidInputError(f"unknown noise kind {self.kind!r}")
        if self.digits < 0 or self.sigma < 0:
            raise InvalidInputError("digits and sigma must be nonnegative")

    @classmethod
    def round_digits(cls, k: int) -> "Noise":
        return cls("round", digits=int(k))

    @classmethod
    def gaussian(cls, sigma: float) -> "Noise":
        return cls("gaussian", sigma=float(sigma))


def _round_half_away(x: np.ndarray, digits: int) -> np.ndarray:
    scale = 10.0**digits
    return np.sign(x) * np.floor(np.abs(x) * scale + 0.5) / scale


def perturb(cloud: PointCloud, noise: Noise, seed=None) -> PointCloud:
    if noise.kind == "none" or (noise.kind == "gaussian" and noise.sigma == 0):
        return cloud
    if noise.kind == "round":
        return PointCloud(_round_half_away(cloud.points, noise.digits), cloud.ambient)
    rng = _rng(seed)
    return PointCloud(cloud.points + noise.sigma * rng.standard_normal(cloud.points.shape), cloud.ambient)


@dataclass(frozen=True)
class SamplerConfig:
    variety: str
    m: int
    seed: int | None = None
    params: dict = field(default_factory=dict)
    noise: Noise = Noise()

    def __post_init__(self):
        if self.m < 1:
            raise InvalidInputError("m must be positive")


VARIETIES = ("trott", "so3", "lowrank", "segre", "toric", "hankel", "circle")


def sample(config: SamplerConfig) -> PointCloud:
    """Dispatch on ``config.variety`` and apply the configured noise."""
    v, m, seed, p = config.variety, config.m, config.seed, config.params
    rng = _rng(seed)
    # the noise stream is split off so the clean sample does not depend on it
    main_seed, noise_seed = rng.integers(0, 2**63, size=2) if seed is not None else (None, None)
    if v == "trott":
        cloud = sample_trott(m, main_seed)
    elif v == "so3":
        cloud = sample_so3(m, main_seed)
    elif v == "lowrank":
        cloud = sample_low_rank(m, int(p["p"]), int(p["q"]), int(p["r"]), main_seed)
    elif v == "segre":
        cloud = sample_segre(m, int(p["p"]), int(p["q"]), main_seed)
    elif v == "toric":
        cloud = sample_toric(np.asarray(p.get("A", OCTAHEDRON), dtype=int), m, main_seed)
    elif v == "hankel":
        cloud = sample_hankel(m, main_seed)
    elif v == "circle":
        cloud = sample_circle(m, main_seed)
    else:
        raise InvalidInputError(f"unknown variety {v!r}; choose from {', '.join(VARIETIES)}")
    return perturb(cloud, config.noise, noise_seed)


# -- cyclo-octane ------------------------------------------------------------

def load_cyclooctane(path: str | Path, *, columns_are_points: bool = False) -> PointCloud:
    """Load the 8-atom conformation dataset (24 coordinates per point)."""
    cloud = read_csv(path, columns_are_points=columns_are_points)
    if cloud.n != 24 and cloud.m == 24:
        cloud = PointCloud(cloud.points.T)
    if cloud.n != 24:
        raise InvalidInputError(f"expected 24 coordinates per conformation, got {cloud.n}")
    return cloud


def squared_distances(cloud: PointCloud) -> np.ndarray:
    """``(m, 8, 8)`` squared distances between the eight atoms of each point."""
    atoms = cloud.points.reshape(cloud.m, 8, 3)
    diff = atoms[:, :, None, :] - atoms[:, None, :, :]
    return np.einsum("mijk,mijk->mij", diff, diff)
