"""Real degree and volume of projective hypersurfaces from random line slices."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .polynomials import Polynomial, monomial_values

__all__ = [
    "SliceEstimate",
    "random_projective_line",
    "real_degree_hypersurface",
    "volume_estimate",
    "count_real_roots",
]

logger = logging.getLogger(__name__)

IMAG_TOL = 1e-8
INFINITY_TOL = 1e-12
MERGE_TOL = 1e-6
_MAX_REDRAWS = 100


@dataclass(frozen=True)
class SliceEstimate:
    trials: int
    counts: np.ndarray
    deg_R: float
    volume: float
    d: int
    stderr: float

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "deg_R": self.deg_R,
            "stderr": self.stderr,
            "volume": self.volume,
            "d": self.d,
        }


def volume_estimate(deg_R: float, d: int) -> float:
    """``vol(P^d) * deg_R`` where ``vol(P^d) = pi^((d+1)/2) / Gamma((d+1)/2)``."""
    if deg_R < 0:
        raise InvalidInputError("deg_R must be nonnegative")
    if d < 0 or int(d) != d:
        raise InvalidInputError("d must be a nonnegative integer")
    half = (d + 1) / 2.0
    return math.pi**half / math.gamma(half) * float(deg_R)


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def random_projective_line(n: int, rng=None) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal pair spanning a uniformly random line in ``P^n``."""
    if n < 1:
        raise InvalidInputError("n must be at least 1")
    gen = _as_generator(rng)
    for _ in range(_MAX_REDRAWS):
        A = gen.standard_normal((2, n + 1))
        q, r = np.linalg.qr(A.T)
        if abs(r[1, 1]) > 1e-10 * max(1.0, abs(r[0, 0])):
            return q[:, 0].copy(), q[:, 1].copy()
    raise RuntimeError("could not draw a nondegenerate line")  # pragma: no cover


def count_real_roots(coeffs) -> int:
    """Distinct real zeros in ``P^1`` of the binary form with ``t``-coefficients ``coeffs``.

    ``coeffs[k]`` multiplies ``t^k s^(D-k)`` with ``D = len(coeffs) - 1``.
    """
    c = np.asarray(coeffs, dtype=float)
    return int(_count_batch(c[None, :])[0])


def _count_batch(C: np.ndarray) -> np.ndarray:
    trials, width = C.shape
    norms = np.linalg.norm(C, axis=1)
    small = np.abs(C) < INFINITY_TOL * norms[:, None]
    # effective degree: highest coefficient that is not negligible
    eff = np.where(~small, np.arange(width)[None, :], -1).max(axis=1)
    counts = (eff < width - 1).astype(np.int64)  # root at infinity
    for deg in np.unique(eff):
        if deg < 1:
            continue
        rows = np.flatnonzero(eff == deg)
        c = C[rows, : deg + 1]
        monic = c[:, :deg] / c[:, deg : deg + 1]
        comp = np.zeros((rows.size, deg, deg))
        comp[:, np.arange(1, deg), np.arange(deg - 1)] = 1.0
        comp[:, :, -1] = -monic
        roots = np.linalg.eigvals(comp)
        for r, z in zip(rows, roots):
            counts[r] += _distinct_real(z)
    return counts


def _distinct_real(z: np.ndarray) -> int:
    scale = np.maximum(1.0, np.abs(z))
    real = np.sort(z.real[np.abs(z.imag) <= IMAG_TOL * scale])
    if real.size == 0:
        return 0
    gaps = np.diff(real) > MERGE_TOL * np.maximum(1.0, np.abs(real[1:]))
    return 1 + int(gaps.sum())


def _restriction_coefficients(f: Polynomial, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Coefficients of ``t -> f(a + t b)`` for a batch of lines, by interpolation."""
    D = max(f.degree, 0)
    nodes = np.cos(np.pi * (np.arange(D + 1) + 0.5) / (D + 1))
    pts = a[:, None, :] + nodes[None, :, None] * b[:, None, :]
    exps = list(f.terms)
    coef = np.array(list(f.terms.values()), dtype=float)
    vals = monomial_values(pts.reshape(-1, f.nvars), exps) @ coef
    V = np.vander(nodes, D + 1, increasing=True)
    return np.linalg.solve(V, vals.reshape(-1, D + 1).T).T


def real_degree_hypersurface(f: Polynomial, trials: int, rng=None) -> SliceEstimate:
    """Average number of real points of ``{f = 0}`` on uniformly random lines.

    ``f`` is a homogeneous form in ``n + 1`` variables. Each trial owns a
    random stream spawned from ``rng`` (an integer seed or a generator) and
    its index, so the result does not depend on evaluation order.
    """
    if not isinstance(f, Polynomial):
        raise InvalidInputError("f must be a Polynomial")
    if f.degree < 0:
        raise InvalidInputError("f must be nonzero")
    if not f.is_homogeneous():
        raise InvalidInputError("f must be homogeneous")
    if trials < 1:
        raise InvalidInputError("trials must be at least 1")
    n = f.nvars - 1
    if n < 1:
        raise InvalidInputError("f needs at least two variables")
    if isinstance(rng, np.random.Generator):
        root = np.random.SeedSequence(int(rng.integers(0, 2**63)))
    else:
        root = np.random.SeedSequence(rng)
    streams = [np.random.default_rng(s) for s in root.spawn(trials)]
    lines = [random_projective_line(n, g) for g in streams]
    a = np.array([x for x, _ in lines])
    b = np.array([y for _, y in lines])
    C = _restriction_coefficients(f, a, b)
    scale = float(np.abs(list(f.terms.values())).max())
    zero = np.linalg.norm(C, axis=1) <= 1e-14 * scale
    redraws = 0
    while zero.any():
        redraws += int(zero.sum())
        if redraws > _MAX_REDRAWS * trials:
            raise InvalidInputError("every line lies in the hypersurface")
        for i in np.flatnonzero(zero):
            a[i], b[i] = random_projective_line(n, streams[i])
        C[zero] = _restriction_coefficients(f, a[zero], b[zero])
        zero = np.linalg.norm(C, axis=1) <= 1e-14 * scale
    if redraws:
        logger.info("redrew %d lines contained in the hypersurface", redraws)
    counts = _count_batch(C)
    d = n - 1
    deg_R = float(counts.mean())
    stderr = float(counts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return SliceEstimate(trials, counts, deg_R, volume_estimate(deg_R, d), d, stderr)
