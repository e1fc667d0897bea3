"""Vanishing polynomials from the kernel of a multivariate Vandermonde matrix."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InvalidInputError
from .pointcloud import PointCloud
from .polynomials import (
    BasisMode,
    MonomialBasis,
    PolynomialSet,
    monomial_basis,
    monomial_values,
)

__all__ = [
    "KernelMethod",
    "ToleranceRule",
    "MachineRule",
    "GapRule",
    "Fixed",
    "VandermondeMatrix",
    "KernelResult",
    "vandermonde",
    "spectrum",
    "numerical_rank",
    "kernel",
    "kernel_basis",
    "find_equations",
    "rref",
    "gap_threshold",
    "echelon_form",
]

# Largest log10 gap needs to be at least this many decades to count as a
# rank drop; otherwise the matrix is treated as having full numerical rank.
DEFAULT_MIN_GAP = 1.5


class KernelMethod(str, enum.Enum):
    SVD = "svd"
    QR = "qr"
    RREF = "rref"


@dataclass(frozen=True)
class ToleranceRule:
    """How the numerical-rank threshold ``tau`` is chosen.

    ``kind`` is ``"machine"`` (``eps * sigma_1 * max(m, N)``), ``"gap"`` (midpoint
    of the largest drop in ``log10 sigma``) or ``"fixed"`` (``tau`` given).
    """

    kind: str = "gap"
    tau: float | None = None
    min_gap: float = DEFAULT_MIN_GAP

    def __post_init__(self):
        if self.kind not in ("machine", "gap", "fixed"):
            raise InvalidInputError(f"unknown tolerance rule {self.kind!r}")
        if self.kind == "fixed" and (self.tau is None or not self.tau >= 0):
            raise InvalidInputError("Fixed tolerance requires tau >= 0")

    @classmethod
    def coerce(cls, rule) -> "ToleranceRule":
        """Accept a rule, ``"gap"``/``"machine"``, or a number meaning ``Fixed``."""
        if rule is None:
            return cls("gap")
        if isinstance(rule, ToleranceRule):
            return rule
        if isinstance(rule, str):
            return cls(rule.lower())
        return cls("fixed", float(rule))


def MachineRule() -> ToleranceRule:
    return ToleranceRule("machine")


def GapRule(min_gap: float = DEFAULT_MIN_GAP) -> ToleranceRule:
    return ToleranceRule("gap", min_gap=min_gap)


def Fixed(tau: float) -> ToleranceRule:
    return ToleranceRule("fixed", float(tau))


@dataclass(frozen=True)
class VandermondeMatrix:
    matrix: np.ndarray
    basis: MonomialBasis
    source: PointCloud | None = None

    def __post_init__(self):
        if self.matrix.shape[1] != len(self.basis):
            raise InvalidInputError("matrix width differs from basis size")

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


@dataclass
class KernelResult:
    """Kernel vectors plus the rank bookkeeping that produced them."""

    polynomials: PolynomialSet
    vectors: np.ndarray  # (k, N), one kernel vector per row
    tau: float
    rank: int
    singular_values: np.ndarray
    method: KernelMethod
    basis: MonomialBasis = field(repr=False, default=None)

    @property
    def dimension(self) -> int:
        return self.vectors.shape[0]


def vandermonde(cloud: PointCloud | np.ndarray, basis: MonomialBasis) -> VandermondeMatrix:
    """Evaluate every basis monomial at every sample point."""
    pts = cloud.points if isinstance(cloud, PointCloud) else np.atleast_2d(np.asarray(cloud, dtype=float))
    if pts.shape[1] != basis.n:
        raise InvalidInputError(f"basis has {basis.n} variables but points have {pts.shape[1]} coordinates")
    mat = monomial_values(pts, basis.exponents)
    return VandermondeMatrix(mat, basis, cloud if isinstance(cloud, PointCloud) else None)


def spectrum(U: VandermondeMatrix | np.ndarray) -> np.ndarray:
    """All singular values of ``U`` in decreasing order."""
    mat = U.matrix if isinstance(U, VandermondeMatrix) else np.asarray(U, dtype=float)
    if mat.size == 0:
        return np.zeros(0)
    return scipy.linalg.svd(mat, compute_uv=False, lapack_driver="gesdd")


def _log_floor(sigma: np.ndarray, m: int, N: int) -> np.ndarray:
    floor = np.finfo(float).eps * sigma[0] * max(m, N)
    if floor <= 0:
        floor = np.finfo(float).tiny
    return np.log10(np.maximum(sigma, floor))


def gap_threshold(values, m: int, N: int, min_gap: float = DEFAULT_MIN_GAP) -> float:
    """Midpoint of the largest drop in ``log10`` of a nonincreasing sequence.

    Without a drop of at least ``min_gap`` decades the threshold is placed
    below the smallest value, so everything counts as rank.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0 or v[0] == 0.0:
        return 0.0
    if v.size == 1:
        return float(v[0]) / 2.0
    gaps = -np.diff(_log_floor(v, m, N))
    i = int(np.argmax(gaps))
    if gaps[i] < min_gap:
        return float(v[-1]) / 2.0
    return float(v[i] + v[i + 1]) / 2.0


def numerical_rank(singular_values, rule=None, m: int | None = None, N: int | None = None) -> tuple[int, float]:
    """Numerical rank ``#{sigma_i > tau}`` and the threshold used.

    Under the gap rule the singular values are floored at the machine
    threshold before taking logarithms, so exact zeros do not produce an
    infinite gap ahead of the real one.
    """
    sigma = np.asarray(singular_values, dtype=float)
    if sigma.size == 0:
        raise InvalidInputError("empty singular value sequence")
    if np.any(sigma < 0) or np.any(np.diff(sigma) > 1e-12 * max(sigma[0], 1.0)):
        raise InvalidInputError("singular values must be nonnegative and nonincreasing")
    rule = ToleranceRule.coerce(rule)
    m = sigma.size if m is None else m
    N = sigma.size if N is None else N
    if rule.kind == "fixed":
        tau = float(rule.tau)
    elif rule.kind == "machine":
        tau = float(np.finfo(float).eps * sigma[0] * max(m, N))
    else:
        tau = gap_threshold(sigma, m, N, rule.min_gap)
    return int(np.count_nonzero(sigma > tau)), tau


def rref(matrix: np.ndarray, tol: float, *, return_magnitudes: bool = False):
    """Reduced row-echelon form by Gauss-Jordan elimination with partial pivoting.

    Candidate pivots with magnitude ``<= tol`` are treated as zero. With
    ``return_magnitudes`` the largest candidate magnitude met at every
    processed column is also returned.
    """
    A = np.array(matrix, dtype=float, copy=True)
    m, N = A.shape
    pivots: list[int] = []
    magnitudes: list[float] = []
    row = 0
    for col in range(N):
        if row == m:
            break
        p = row + int(np.argmax(np.abs(A[row:, col])))
        mag = abs(A[p, col])
        magnitudes.append(mag)
        if mag <= tol:
            A[row:, col] = 0.0
            continue
        if p != row:
            A[[row, p]] = A[[p, row]]
        A[row] /= A[row, col]
        factors = A[:, col].copy()
        factors[row] = 0.0
        A -= np.outer(factors, A[row])
        A[:, col] = 0.0
        A[row, col] = 1.0
        pivots.append(col)
        row += 1
    if return_magnitudes:
        return A, pivots, np.array(magnitudes)
    return A, pivots


def _machine_tau(mat: np.ndarray, sigma: np.ndarray) -> float:
    return float(np.finfo(float).eps * (sigma[0] if sigma.size else 0.0) * max(mat.shape))


def _own_tau(values: np.ndarray, mat: np.ndarray, N: int, rule: ToleranceRule) -> float:
    """Gap threshold computed on a method's own rank-revealing sequence."""
    seq = np.sort(np.concatenate([values, np.zeros(N - values.size)]))[::-1]
    return gap_threshold(seq, mat.shape[0], N, rule.min_gap)


def _kernel_svd(mat: np.ndarray, rank: int) -> np.ndarray:
    _, _, vh = scipy.linalg.svd(mat, full_matrices=True, lapack_driver="gesdd")
    return vh[rank:].copy()


def _kernel_qr(mat: np.ndarray, tau: float | None, rule: ToleranceRule) -> tuple[np.ndarray, float]:
    m, N = mat.shape
    R, perm = scipy.linalg.qr(mat, mode="r", pivoting=True)
    k = min(m, N)
    diag = np.zeros(N)
    diag[:k] = np.abs(np.diag(R[:k, :k]))
    if tau is None:
        tau = _own_tau(diag[:k], mat, N, rule)
    small = np.flatnonzero(diag < tau)
    keep = np.setdiff1d(np.arange(N), small)
    out = np.zeros((small.size, N))
    if small.size == 0:
        return out, tau
    R_top = R[:k]
    if np.array_equal(keep, np.arange(keep.size)):
        y = scipy.linalg.solve_triangular(R_top[: keep.size, : keep.size], R_top[: keep.size][:, small])
    else:
        y = np.linalg.lstsq(R_top[:, keep], R_top[:, small], rcond=None)[0]
    for t, i in enumerate(small):
        a = np.zeros(N)
        # R[:, keep] a_keep + R[:, i] = 0
        a[keep] = -y[:, t]
        a[i] = 1.0
        out[t, perm] = a
    return out, tau


def _kernel_rref(mat: np.ndarray, tau: float | None, rule: ToleranceRule) -> tuple[np.ndarray, float]:
    m, N = mat.shape
    if tau is None:
        probe = np.finfo(float).eps * np.abs(mat).max(initial=0.0) * max(m, N)
        _, _, mags = rref(mat, probe, return_magnitudes=True)
        tau = _own_tau(mags, mat, N, rule)
    A, pivots = rref(mat, tau)
    # Rejected pivots zero their column, so dependent rows come out exactly
    # zero and pivot rows have norm >= 1; the row filter therefore runs at the
    # machine tolerance of the normalised echelon form.
    row_tol = np.sqrt(N) * np.finfo(float).eps * max(m, N)
    kept = np.flatnonzero(np.linalg.norm(A, axis=1) > row_tol)
    B = A[kept]
    pivots = pivots[: kept.size]
    pivot_set = set(pivots)
    free = [j for j in range(N) if j not in pivot_set]
    out = np.zeros((len(free), N))
    for t, j in enumerate(free):
        out[t, j] = 1.0
        for i, ji in enumerate(pivots):
            out[t, ji] = -B[i, j]
    return out, tau


def kernel(U: VandermondeMatrix, rule=None, method: KernelMethod | str = KernelMethod.SVD) -> KernelResult:
    """Kernel of ``U`` with full bookkeeping (``tau``, rank, spectrum).

    Under the gap rule QR and RREF place the threshold at the largest gap of
    their own pivot magnitudes (``|R_ii|`` and elimination pivots), which live
    on a different scale than the singular values.
    """
    method = KernelMethod(method)
    rule = ToleranceRule.coerce(rule)
    mat = U.matrix
    m, N = mat.shape
    sigma = spectrum(mat)
    if sigma.size == 0:
        rank, tau = 0, 0.0
    else:
        rank, tau = numerical_rank(sigma, rule, m, N)
    if method is KernelMethod.SVD:
        vecs = _kernel_svd(mat, rank)
    else:
        own = None if rule.kind == "gap" else tau
        solver = _kernel_qr if method is KernelMethod.QR else _kernel_rref
        vecs, tau = solver(mat, own, rule)
        rank = N - vecs.shape[0]
    polys = PolynomialSet([U.basis.polynomial(v) for v in vecs], nvars=U.basis.n)
    return KernelResult(polys, vecs, tau, rank, sigma, method, U.basis)


def echelon_form(result: KernelResult | np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Reduced row-echelon form of the kernel vectors (a canonical span basis)."""
    vecs = result.vectors if isinstance(result, KernelResult) else np.asarray(result, dtype=float)
    if vecs.shape[0] == 0:
        return vecs.copy()
    A, pivots = rref(vecs, tol * np.abs(vecs).max())
    return A[: len(pivots)]


def kernel_basis(U: VandermondeMatrix, rule=None, method: KernelMethod | str = KernelMethod.SVD) -> PolynomialSet:
    return kernel(U, rule, method).polynomials


def find_equations(
    cloud: PointCloud,
    degree: int,
    homogeneous: bool = False,
    method: KernelMethod | str = KernelMethod.SVD,
    rule=None,
    *,
    return_details: bool = False,
):
    """Polynomials of the given degree vanishing on the sample.

    Uses monomials of degree exactly ``degree`` when ``homogeneous`` and of
    degree at most ``degree`` otherwise.
    """
    if degree < 1:
        raise InvalidInputError("degree must be at least 1")
    if cloud.m < 2:
        raise InvalidInputError("need at least two sample points")
    mode = BasisMode.DEGREE_EXACTLY if homogeneous else BasisMode.DEGREE_AT_MOST
    basis = monomial_basis(cloud.n, degree, mode)
    result = kernel(vandermonde(cloud, basis), rule, method)
    return result if return_details else result.polynomials
